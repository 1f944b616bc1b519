//! Energies, gradients and the scaling identities.
//!
//! Quadratic terms are spectral sums; potential terms are physical-space
//! quadratures `h^N Σ F(u_j)`.

#![allow(non_snake_case)]

use serde::Serialize;
use thiserror::Error;

use crate::model::{AutonomousNonlinearity, Envelope, SpatialNonlinearity};
use crate::spectral::{
    apply_fractional_op, apply_inverse_fractional_op, shell_power, shell_sum, Grid, RealField, SpectralError,
    FOUR_PI_SQ,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error("the potential has no analytic gradient")]
    MissingPotentialGradient,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub quadratic: f64,
    pub potential: f64,
    pub total: f64,
    pub pohozaev: f64,
    pub dtheta0: f64,
}

/// Shell-summed `|c_k|²` of a field, for repeated evaluation of
/// `Q_β(s) = (2L)^N Σ (1 + 4π² |ξ_k|² s)^β |c_k|²`.
#[derive(Clone, Debug)]
pub struct ModeWeights {
    grid: Grid,
    power: Vec<f64>,
}

impl ModeWeights {
    pub fn new(u: &RealField) -> Self {
        ModeWeights {
            grid: u.grid().clone(),
            power: shell_power(u),
        }
    }

    pub fn q(&self, beta: f64, scale: f64) -> f64 {
        shell_sum(&self.grid, &self.power, beta, scale)
    }

    /// `dQ_β/ds`.
    pub fn dq_ds(&self, beta: f64, scale: f64) -> f64 {
        let s: f64 = self
            .grid
            .shell_xi_sq()
            .iter()
            .zip(&self.power)
            .map(|(&xi2, &w)| beta * (1.0 + FOUR_PI_SQ * xi2 * scale).powf(beta - 1.0) * FOUR_PI_SQ * xi2 * w)
            .sum();
        self.grid.box_volume() * s
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
}

/// `h^N Σ F(u_j)`.
pub fn potential_integral(u: &RealField, f: &AutonomousNonlinearity) -> f64 {
    u.grid().cell_volume() * u.values().iter().map(|&s| f.F(s)).sum::<f64>()
}

/// `(N - 2α)/2 · Q_α + α · Q_{α-1} - N · pot`.
fn pohozaev_bracket(grid: &Grid, modes: &ModeWeights, scale: f64, pot: f64) -> f64 {
    let n = grid.dim() as f64;
    let a = grid.alpha();
    (n - 2.0 * a) / 2.0 * modes.q(a, scale) + a * modes.q(a - 1.0, scale) - n * pot
}

/// `I(u) = ½‖u‖²_α - ∫F(u)` with its scaling derivative.
pub fn energy_I(u: &RealField, f: &AutonomousNonlinearity) -> EnergyBreakdown {
    let modes = ModeWeights::new(u);
    let pot = potential_integral(u, f);
    let quadratic = 0.5 * modes.q(u.grid().alpha(), 1.0);
    let p = pohozaev_bracket(u.grid(), &modes, 1.0, pot);
    EnergyBreakdown {
        quadratic,
        potential: pot,
        total: quadratic - pot,
        pohozaev: p,
        dtheta0: p,
    }
}

/// Raw: `(1 - Δ)^α u - f(u)`. Preconditioned: `u - (1 - Δ)^{-α} f(u)`.
pub fn grad_I(u: &RealField, f: &AutonomousNonlinearity, preconditioned: bool) -> Result<RealField, SpectralError> {
    let fu = u.map(|s| f.f(s))?;
    if preconditioned {
        u.axpy(-1.0, &apply_inverse_fractional_op(&fu)?)
    } else {
        apply_fractional_op(u)?.axpy(-1.0, &fu)
    }
}

pub fn pohozaev_P(u: &RealField, f: &AutonomousNonlinearity) -> f64 {
    pohozaev_bracket(u.grid(), &ModeWeights::new(u), 1.0, potential_integral(u, f))
}

/// `Ĩ(θ, u) = I(u(·/e^θ))`, evaluated in spectral space.
pub fn augmented_I(theta: f64, u: &RealField, f: &AutonomousNonlinearity) -> f64 {
    augmented_from(theta, u.grid(), &ModeWeights::new(u), potential_integral(u, f))
}

pub(crate) fn augmented_from(theta: f64, grid: &Grid, modes: &ModeWeights, pot: f64) -> f64 {
    let en = (grid.dim() as f64 * theta).exp();
    let scale = (-2.0 * theta).exp();
    en * (0.5 * modes.q(grid.alpha(), scale)) - en * pot
}

/// `∂_θ Ĩ(θ, u)`, which equals `P(u(·/e^θ))`.
pub fn dtheta_I(theta: f64, u: &RealField, f: &AutonomousNonlinearity) -> f64 {
    let grid = u.grid();
    let en = (grid.dim() as f64 * theta).exp();
    let scale = (-2.0 * theta).exp();
    en * pohozaev_bracket(grid, &ModeWeights::new(u), scale, potential_integral(u, f))
}

/// `g(t)` with `d/dt I(u(·/t)) = t^{N-1} g(t)`; `g(1) = P(u)`.
pub fn g_of_t(u: &RealField, f: &AutonomousNonlinearity, t: f64) -> f64 {
    g_from(u.grid(), &ModeWeights::new(u), potential_integral(u, f), t)
}

pub(crate) fn g_from(grid: &Grid, modes: &ModeWeights, pot: f64, t: f64) -> f64 {
    pohozaev_bracket(grid, modes, 1.0 / (t * t), pot)
}

/// `g'(t)`; the potential term does not depend on `t`.
pub(crate) fn g_prime_from(grid: &Grid, modes: &ModeWeights, t: f64) -> f64 {
    let n = grid.dim() as f64;
    let a = grid.alpha();
    let scale = 1.0 / (t * t);
    let ds_dt = -2.0 / (t * t * t);
    ds_dt * ((n - 2.0 * a) / 2.0 * modes.dq_ds(a, scale) + a * modes.dq_ds(a - 1.0, scale))
}

/// `I(u(·/t)) = t^N/2 · Q_α(1/t²) - t^N ∫F(u)`.
pub(crate) fn path_energy_from(grid: &Grid, modes: &ModeWeights, pot: f64, t: f64) -> f64 {
    augmented_from(t.ln(), grid, modes, pot)
}

/// `Ī(u) = δ₀/2 ‖u‖²_α - ∫H̄(u)`.
pub fn comparison_I_bar(u: &RealField, env: &Envelope) -> f64 {
    let q = ModeWeights::new(u).q(u.grid().alpha(), 1.0);
    let pot = u.grid().cell_volume() * u.values().iter().map(|&s| env.H_bar_at(s)).sum::<f64>();
    env.delta0 / 2.0 * q - pot
}

fn spatial_potential(u: &RealField, sp: &SpatialNonlinearity) -> f64 {
    let grid = u.grid();
    let mut x = vec![0.0; grid.dim()];
    let s: f64 = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            grid.point(i, &mut x);
            sp.big_f(&x, v)
        })
        .sum();
    grid.cell_volume() * s
}

fn spatial_virial(u: &RealField, sp: &SpatialNonlinearity) -> Option<f64> {
    let grid = u.grid();
    let mut x = vec![0.0; grid.dim()];
    let mut scratch = vec![0.0; grid.dim()];
    let mut s = 0.0;
    for (i, &v) in u.values().iter().enumerate() {
        grid.point(i, &mut x);
        s += sp.x_dot_grad_f(&x, v, &mut scratch)?;
    }
    Some(grid.cell_volume() * s)
}

/// `J(u(·/t - z/t))`, i.e. the field `x ↦ u((x - z)/t)`, without resampling.
pub fn energy_J_path(u: &RealField, sp: &SpatialNonlinearity, t: f64, shift: &[f64]) -> f64 {
    energy_J_path_from(u, &ModeWeights::new(u), sp, t, shift)
}

pub(crate) fn energy_J_path_from(u: &RealField, modes: &ModeWeights, sp: &SpatialNonlinearity, t: f64, shift: &[f64]) -> f64 {
    let grid = u.grid();
    let dim = grid.dim();
    let tn = t.powi(dim as i32);
    let mut x = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    let s: f64 = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            grid.point(i, &mut x);
            for d in 0..dim {
                y[d] = t * x[d] + shift[d];
            }
            sp.big_f(&y, v)
        })
        .sum();
    0.5 * tn * modes.q(grid.alpha(), 1.0 / (t * t)) - tn * grid.cell_volume() * s
}

/// `J(u) = ½‖u‖²_α - ∫F(x, u)`.
///
/// `pohozaev` is the spatial identity including `-∫ x·∇ₓF`; without an
/// analytic gradient it falls back to `dtheta0`, a central difference of
/// `θ ↦ J(u(·/e^θ))`.
pub fn energy_J(u: &RealField, sp: &SpatialNonlinearity) -> EnergyBreakdown {
    let modes = ModeWeights::new(u);
    let pot = spatial_potential(u, sp);
    let quadratic = 0.5 * modes.q(u.grid().alpha(), 1.0);
    let zero = vec![0.0; u.grid().dim()];
    let eps: f64 = 1e-5;
    let dtheta0 = (energy_J_path_from(u, &modes, sp, eps.exp(), &zero)
        - energy_J_path_from(u, &modes, sp, (-eps).exp(), &zero))
        / (2.0 * eps);
    let pohozaev = spatial_virial(u, sp)
        .map(|vir| pohozaev_bracket(u.grid(), &modes, 1.0, pot) - vir)
        .unwrap_or(dtheta0);
    EnergyBreakdown {
        quadratic,
        potential: pot,
        total: quadratic - pot,
        pohozaev,
        dtheta0,
    }
}

/// `J∞(u) = ½‖u‖²_α - ∫F∞(u)`.
pub fn energy_J_inf(u: &RealField, sp: &SpatialNonlinearity) -> EnergyBreakdown {
    let modes = ModeWeights::new(u);
    let pot = u.grid().cell_volume() * u.values().iter().map(|&s| sp.big_f_inf(s)).sum::<f64>();
    let quadratic = 0.5 * modes.q(u.grid().alpha(), 1.0);
    let p = pohozaev_bracket(u.grid(), &modes, 1.0, pot);
    EnergyBreakdown {
        quadratic,
        potential: pot,
        total: quadratic - pot,
        pohozaev: p,
        dtheta0: p,
    }
}

/// `(N-2α)/2 ‖u‖²_α + α Q_{α-1} - N∫F(x,u) - ∫ x·∇ₓF(x,u)`.
pub fn pohozaev_spatial(u: &RealField, sp: &SpatialNonlinearity) -> Result<f64, FunctionalError> {
    let vir = spatial_virial(u, sp).ok_or(FunctionalError::MissingPotentialGradient)?;
    let modes = ModeWeights::new(u);
    Ok(pohozaev_bracket(u.grid(), &modes, 1.0, spatial_potential(u, sp)) - vir)
}

/// Raw: `(1 - Δ)^α u - f(x, u)`. Preconditioned: `u - (1 - Δ)^{-α} f(x, u)`.
pub fn grad_J(u: &RealField, sp: &SpatialNonlinearity, preconditioned: bool) -> Result<RealField, SpectralError> {
    let grid = u.grid();
    let mut x = vec![0.0; grid.dim()];
    let fu: Vec<f64> = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            grid.point(i, &mut x);
            sp.f(&x, v)
        })
        .collect();
    let fu = RealField::new(grid, fu)?;
    if preconditioned {
        u.axpy(-1.0, &apply_inverse_fractional_op(&fu)?)
    } else {
        apply_fractional_op(u)?.axpy(-1.0, &fu)
    }
}
