use serde::Serialize;

use super::ground_state::{nehari_root, stationary_state, BOUNDARY_MARGIN_FRACTION};
use super::search::maximize_log;
use super::{SolveReport, SolverConfig, SolverError};
use crate::functionals::{energy_J, energy_J_inf, energy_J_path_from, grad_J, pohozaev_spatial, ModeWeights};
use crate::model::SpatialNonlinearity;
use crate::spectral::{boundary_mass, norm_alpha, norm_alpha_sq, resample_affine, Grid, RealField};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpatialReportOut {
    pub limit: SolveReport,
    pub d_inf: f64,
    pub d_mp_bound: f64,
    /// `d_inf - d_mp_bound`.
    pub margin: f64,
    pub best_shift: Vec<f64>,
    pub best_t: f64,
    pub descent_converged: bool,
    pub descent_iterations: usize,
    pub descent_grad_norm: f64,
    pub energy_j: f64,
    /// Spatial Pohozaev identity at the descent result, when gradients are known.
    pub pohozaev_spatial: Option<f64>,
    pub positive: bool,
    /// Largest `‖u_k‖_α / ‖u_0‖_α` seen during the descent.
    pub max_norm_ratio: f64,
    pub boundary_mass: f64,
}

/// Path energies along `x ↦ ω((x - z)/t)` over the shift lattice.
///
/// Returns `(min over z of max over t, argmin z, its maximizing t)`.
fn path_bound(omega: &RealField, sp: &SpatialNonlinearity) -> (f64, Vec<f64>, f64) {
    let grid = omega.grid();
    let dim = grid.dim();
    let modes = ModeWeights::new(omega);
    let l = grid.half_length();
    let offsets: Vec<f64> = (0..5).map(|i| -l / 2.0 + l * i as f64 / 4.0).collect();
    let mut best = (f64::INFINITY, vec![0.0; dim], 1.0);
    for flat in 0..5usize.pow(dim as u32) {
        let mut z = vec![0.0; dim];
        let mut rest = flat;
        for d in (0..dim).rev() {
            z[d] = offsets[rest % 5];
            rest /= 5;
        }
        let energy = |t: f64| energy_J_path_from(omega, &modes, sp, t, &z);
        let mut end = 2.0;
        while energy(end) >= 0.0 && end < 64.0 {
            end *= 2.0;
        }
        if energy(end) >= 0.0 {
            continue;
        }
        let (t, v) = maximize_log(energy, 0.05, end, 129, Some(1.0));
        if v < best.0 {
            best = (v, z, t);
        }
    }
    best
}

fn nehari_project_spatial(u: &RealField, sp: &SpatialNonlinearity) -> Result<RealField, SolverError> {
    let grid = u.grid();
    let q = norm_alpha_sq(u);
    let cell = grid.cell_volume();
    let xs: Vec<Vec<f64>> = (0..grid.len())
        .map(|i| {
            let mut x = vec![0.0; grid.dim()];
            grid.point(i, &mut x);
            x
        })
        .collect();
    let k = |lam: f64| {
        q - cell
            * u.values()
                .iter()
                .zip(&xs)
                .map(|(&s, x)| sp.f(x, lam * s) * s)
                .sum::<f64>()
                / lam
    };
    Ok(u.scaled(nehari_root(k, q)?))
}

/// Limit problem, path bound over dilations and shifts, then descent on `J`.
pub fn spatial_workflow(sp: &SpatialNonlinearity, grid: &Grid, cfg: &SolverConfig) -> Result<SpatialReportOut, SolverError> {
    let limit_f = sp.limit();
    let (omega, limit) =
        stationary_state(grid, &limit_f, cfg).map_err(|e| SolverError::LimitProblemFailed(e.to_string()))?;
    let d_inf = energy_J_inf(&omega, sp).total;
    let (d_mp_bound, best_shift, best_t) = path_bound(&omega, sp);

    let start = resample_affine(&omega, best_t, Some(&best_shift));
    let mut u = nehari_project_spatial(&start, sp)?;
    let norm0 = norm_alpha(&u);
    let mut energy = energy_J(&u, sp).total;
    let mut tau = cfg.step;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut max_norm_ratio: f64 = 1.0;
    let positive = |v: RealField| if cfg.enforce_positive { v.abs() } else { v };
    while iterations < cfg.max_iters {
        let grad = grad_J(&u, sp, true)?;
        grad_norm = norm_alpha(&grad) / norm_alpha(&u);
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }
        if iterations % 100 == 0 {
            tau = cfg.step;
        }
        iterations += 1;
        let mut accepted = false;
        while tau >= 1e-14 {
            let trial = nehari_project_spatial(&positive(u.axpy(-tau, &grad)?), sp)?;
            let e = energy_J(&trial, sp).total;
            if e <= energy + 1e-12 * (1.0 + energy.abs()) {
                u = trial;
                energy = e;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        let ratio = norm_alpha(&u) / norm0;
        max_norm_ratio = max_norm_ratio.max(ratio);
        if ratio > 1e3 {
            return Err(SolverError::Diverged(ratio));
        }
        if !accepted {
            break;
        }
    }
    Ok(SpatialReportOut {
        limit,
        d_inf,
        d_mp_bound,
        margin: d_inf - d_mp_bound,
        best_shift,
        best_t,
        descent_converged: converged,
        descent_iterations: iterations,
        descent_grad_norm: grad_norm,
        energy_j: energy,
        pohozaev_spatial: pohozaev_spatial(&u, sp).ok(),
        positive: u.min() >= 0.0 && u.max() > 0.0,
        max_norm_ratio,
        boundary_mass: boundary_mass(&u, BOUNDARY_MARGIN_FRACTION * grid.half_length()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{autonomous_spec, gaussian_bump_spec, make_spatial_problem, AutonomousNonlinearity, ValidationLattice};

    fn cfg() -> SolverConfig {
        SolverConfig {
            enforce_positive: false,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn autonomous_reduction_matches_limit() {
        let grid = Grid::new(2, 0.75, 8.0, 64).unwrap();
        let spec = autonomous_spec(0.0, AutonomousNonlinearity::power(3.0).unwrap(), 4.0);
        let sp = make_spatial_problem(spec, &ValidationLattice::new(2)).unwrap();
        let r = spatial_workflow(&sp, &grid, &cfg()).unwrap();
        assert!(r.d_mp_bound >= r.d_inf - 1e-12);
        assert!((r.energy_j - r.d_inf).abs() < 1e-5 * r.d_inf, "{r:?}");
        assert!(r.max_norm_ratio < 1.5);
    }

    #[test]
    fn attractive_bump_lowers_the_level() {
        let grid = Grid::new(2, 0.75, 8.0, 64).unwrap();
        let sp = make_spatial_problem(gaussian_bump_spec(0.5, 0.5, 2.0, 3.0).unwrap(), &ValidationLattice::new(2)).unwrap();
        let r = spatial_workflow(&sp, &grid, &cfg()).unwrap();
        assert!(r.margin > 0.0, "{r:?}");
        assert!(r.energy_j < r.d_inf);
        assert!(r.pohozaev_spatial.is_some());
    }
}
