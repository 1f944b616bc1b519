//! Ground states by projected Sobolev-gradient descent, path scans, mountain-pass
//! estimates and the spatial workflow.

mod fd_check;
mod ground_state;
mod paths;
mod search;
mod spatial;

use serde::Serialize;
use thiserror::Error;

use crate::functionals::FunctionalError;
use crate::spectral::SpectralError;

pub use fd_check::{gradient_fd_check, FdFunctional, FdReport};
pub use ground_state::{
    ground_state_solve, ground_state_solve_from, initial_guess, nehari_project, pohozaev_project, tent,
    Projection, BOUNDARY_MARGIN_FRACTION, POLISH_SWITCH,
};
pub use paths::{mountain_pass_estimate, optimal_path_scan, MountainPassReport};
pub use search::{decreasing_root, golden_max, maximize_log};
pub use spatial::{spatial_workflow, SpatialReportOut};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub step: f64,
    pub max_iters: usize,
    /// On `‖G‖_α / ‖u‖_α` for the preconditioned gradient `G`.
    pub grad_tol: f64,
    /// On `|P(u)| / ‖u‖²_α`.
    pub pohozaev_tol: f64,
    pub project_every: usize,
    pub enforce_positive: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step: 0.5,
            max_iters: 20000,
            grad_tol: 1e-8,
            pohozaev_tol: 1e-8,
            project_every: 1,
            enforce_positive: true,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |what: &str| Err(SolverError::BadConfig(what.to_string()));
        if !(self.step > 0.0 && self.step < 2.0) {
            return bad("step must lie in (0, 2)");
        }
        if !(self.grad_tol > 0.0) || !(self.pohozaev_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.project_every == 0 || self.max_iters == 0 {
            return bad("project_every and max_iters must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub energy: f64,
    pub pohozaev_residual: f64,
    pub grad_norm: f64,
    pub c_mp_estimate: f64,
    pub boundary_mass: f64,
    pub wall_time_s: f64,
    pub norm_alpha_sq: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub projection: Projection,
    pub limit_mode: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub energy: f64,
    pub g_value: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("box too small: {0}")]
    BoxTooSmall(String),
    #[error("g does not change sign on the bracket (g(t_min) = {g_min}, g(t_max) = {g_max})")]
    NoSignChange { g_min: f64, g_max: f64 },
    #[error("no convergence after {} iterations (grad norm {})", .0.iterations, .0.grad_norm)]
    MaxItersExceeded(Box<SolveReport>),
    #[error("step size underflow after {} iterations (grad norm {})", .0.iterations, .0.grad_norm)]
    Stalled(Box<SolveReport>),
    #[error("stationary after {} iterations but Pohozaev residual {} exceeds tolerance", .0.iterations, .0.pohozaev_residual)]
    PohozaevResidual(Box<SolveReport>),
    #[error("endpoint energy {0} is not negative")]
    BadEndpoint(f64),
    #[error("limit problem failed: {0}")]
    LimitProblemFailed(String),
    #[error("iterates diverged: norm ratio {0}")]
    Diverged(f64),
    #[error("bad solver configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}
