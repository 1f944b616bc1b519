use std::time::Instant;

use serde::Serialize;

use super::search::{decreasing_root, maximize_log};
use super::{SolveReport, SolverConfig, SolverError};
use crate::functionals::{
    energy_I, g_from, g_prime_from, grad_I, path_energy_from, potential_integral, ModeWeights,
};
use crate::model::{check_bl_conditions, AutonomousNonlinearity};
use crate::spectral::{
    boundary_mass, dilate_field_with, gaussian_bump, norm_alpha, norm_alpha_sq, DilationGuard, Grid, RealField,
};

/// Fraction of `L` used as the margin of the reported boundary mass.
pub const BOUNDARY_MARGIN_FRACTION: f64 = 0.1;

/// How iterates are pulled back onto the constraint set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// Dilation `u ↦ u(·/t*)` with `g(t*) = 0`.
    Pohozaev,
    /// Amplitude `u ↦ λ* u` maximizing `λ ↦ I(λu)`.
    Nehari,
}

impl Projection {
    /// The dilation path peaks at `t*` only when `N ≥ 2` and `N > 2α`.
    pub fn for_grid(grid: &Grid) -> Projection {
        let n = grid.dim() as f64;
        if grid.dim() >= 2 && n > 2.0 * grid.alpha() {
            Projection::Pohozaev
        } else {
            Projection::Nehari
        }
    }
}

/// Radial tent: `s0` on `|x| ≤ R`, linear down to 0 at `|x| = R + 1`.
pub fn tent(grid: &Grid, s0: f64, radius: f64) -> RealField {
    RealField::from_fn(grid, |x| {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r <= radius {
            s0
        } else if r <= radius + 1.0 {
            s0 * (radius + 1.0 - r)
        } else {
            0.0
        }
    })
    .expect("finite tent")
}

/// A tent with negative energy, doubling `R` until `I < 0`.
pub fn initial_guess(grid: &Grid, f: &AutonomousNonlinearity, s0: f64, radius: f64) -> Result<RealField, SolverError> {
    let limit = grid.half_length() - 2.0 * grid.spacing();
    if !(radius > 0.0) || radius + 1.0 >= limit {
        return Err(SolverError::BoxTooSmall(format!("R + 1 = {} must stay below {limit}", radius + 1.0)));
    }
    if s0 == 0.0 {
        return Ok(RealField::zeros(grid));
    }
    let mut r = radius;
    while r + 1.0 < limit {
        let u = tent(grid, s0, r);
        if energy_I(&u, f).total < 0.0 {
            return Ok(u);
        }
        r *= 2.0;
    }
    Err(SolverError::BoxTooSmall(format!("no tent of height {s0} with negative energy fits")))
}

/// Dilates `u` onto `P = 0`. Returns `t*` and `u(·/t*)`.
pub fn pohozaev_project(u: &RealField, f: &AutonomousNonlinearity) -> Result<(f64, RealField), SolverError> {
    pohozaev_project_with(u, f, &DilationGuard::default())
}

pub(crate) fn pohozaev_project_with(
    u: &RealField,
    f: &AutonomousNonlinearity,
    guard: &DilationGuard,
) -> Result<(f64, RealField), SolverError> {
    let grid = u.grid();
    let modes = ModeWeights::new(u);
    let pot = potential_integral(u, f);
    let tol = 1e-12 * (1.0 + modes.q(grid.alpha(), 1.0));
    let g = |t: f64| g_from(grid, &modes, pot, t);
    let t = if g(1.0).abs() <= tol {
        1.0
    } else {
        let (g_min, g_max) = (g(guard.t_min), g(guard.t_max));
        if !(g_min > 0.0 && g_max < 0.0) {
            return Err(SolverError::NoSignChange { g_min, g_max });
        }
        decreasing_root(g, |t| g_prime_from(grid, &modes, t), guard.t_min, guard.t_max, tol)
    };
    Ok((t, dilate_field_with(u, t, guard)?))
}

/// Scales `u` onto the Nehari set `λ ↦ I(λu)` stationary. Returns `λ*` and `λ* u`.
pub fn nehari_project(u: &RealField, f: &AutonomousNonlinearity) -> Result<(f64, RealField), SolverError> {
    let q = norm_alpha_sq(u);
    let cell = u.grid().cell_volume();
    let k = |lam: f64| q - cell * u.values().iter().map(|&s| f.f(lam * s) * s).sum::<f64>() / lam;
    let lam = nehari_root(k, q)?;
    Ok((lam, u.scaled(lam)))
}

/// Root of the decreasing `k(λ) = Q - ∫f(λu)u/λ` on `[1e-3, 1e3]`.
pub(crate) fn nehari_root(k: impl Fn(f64) -> f64, q: f64) -> Result<f64, SolverError> {
    let (lo, hi) = (1e-3, 1e3);
    let tol = 1e-13 * (1.0 + q);
    if k(1.0).abs() <= tol {
        return Ok(1.0);
    }
    let (g_min, g_max) = (k(lo), k(hi));
    if !(g_min > 0.0 && g_max < 0.0) {
        return Err(SolverError::NoSignChange { g_min, g_max });
    }
    let dk = |lam: f64| {
        let h = 1e-6 * lam;
        (k(lam + h) - k(lam - h)) / (2.0 * h)
    };
    Ok(decreasing_root(&k, dk, lo, hi, tol))
}

/// Projection with the amplitude bootstrap: rescale by 1.5 while `g` keeps
/// one sign on the bracket, at most 40 times.
fn project(u: &RealField, f: &AutonomousNonlinearity, mode: Projection) -> Result<RealField, SolverError> {
    match mode {
        Projection::Nehari => Ok(nehari_project(u, f)?.1),
        Projection::Pohozaev => {
            let mut v = u.clone();
            for _ in 0..40 {
                match pohozaev_project(&v, f) {
                    Ok((_, w)) => return Ok(w),
                    Err(SolverError::NoSignChange { g_min, g_max }) => {
                        if g_max >= 0.0 {
                            v = v.scaled(1.5);
                        } else if g_min <= 0.0 {
                            v = v.scaled(1.0 / 1.5);
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
            let (_, w) = pohozaev_project(&v, f)?;
            Ok(w)
        }
    }
}

/// Default start: a unit Gaussian with the height of the located witness `s₀`.
fn default_start(grid: &Grid, f: &AutonomousNonlinearity) -> RealField {
    let report = check_bl_conditions(f, grid.dim(), grid.alpha(), 1000);
    let amplitude = report.witness.map_or(1.0, |s| 1.5 * s);
    gaussian_bump(grid, &vec![0.0; grid.dim()], 1.0, amplitude)
}

pub fn ground_state_solve(
    grid: &Grid,
    f: &AutonomousNonlinearity,
    cfg: &SolverConfig,
) -> Result<(RealField, SolveReport), SolverError> {
    ground_state_solve_from(&default_start(grid, f), f, cfg)
}

/// The stationary point reached from the default start, accepted when only
/// the Pohozaev tolerance is missed.
pub(crate) fn stationary_state(
    grid: &Grid,
    f: &AutonomousNonlinearity,
    cfg: &SolverConfig,
) -> Result<(RealField, SolveReport), SolverError> {
    let (u, report, outcome) = descend(&default_start(grid, f), f, cfg)?;
    match outcome {
        Outcome::Converged | Outcome::Residual => Ok((u, report)),
        Outcome::Stalled => Err(SolverError::Stalled(Box::new(report))),
        Outcome::MaxIters => Err(SolverError::MaxItersExceeded(Box::new(report))),
    }
}

/// Gradient level below which the dilation projection hands over to the
/// amplitude projection.
pub const POLISH_SWITCH: f64 = 1e-3;

/// Iterations over which an energy change below round-off counts as a stall.
const STAGNATION_WINDOW: usize = 500;

/// Descent from a given start. Each step is `u ← u - τ (u - (1-Δ)^{-α} f(u))`,
/// then `u ← |u|` when positivity is enforced, then the projection.
///
/// In Pohozaev mode the projection is the dilation onto `P = 0` until the
/// gradient drops below [`POLISH_SWITCH`] or the line search fails; from
/// then on the amplitude projection is used, which is exact on the grid.
/// `P(u*)` is then a check on the result rather than a constraint.
pub fn ground_state_solve_from(
    start: &RealField,
    f: &AutonomousNonlinearity,
    cfg: &SolverConfig,
) -> Result<(RealField, SolveReport), SolverError> {
    let (u, report, outcome) = descend(start, f, cfg)?;
    match outcome {
        Outcome::Converged => Ok((u, report)),
        Outcome::Residual => Err(SolverError::PohozaevResidual(Box::new(report))),
        Outcome::Stalled => Err(SolverError::Stalled(Box::new(report))),
        Outcome::MaxIters => Err(SolverError::MaxItersExceeded(Box::new(report))),
    }
}

pub(crate) fn descend(
    start: &RealField,
    f: &AutonomousNonlinearity,
    cfg: &SolverConfig,
) -> Result<(RealField, SolveReport, Outcome), SolverError> {
    cfg.validate()?;
    let clock = Instant::now();
    let grid = start.grid().clone();
    let mode = Projection::for_grid(&grid);
    let positive = |v: RealField| if cfg.enforce_positive { v.abs() } else { v };
    let mut u = positive(project(&positive(start.clone()), f, mode)?);
    let mut energy = energy_I(&u, f).total;
    let mut tau = cfg.step;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    let mut polishing = mode == Projection::Nehari;
    let mut outcome = Outcome::MaxIters;
    let mut checkpoint = energy;
    while iterations < cfg.max_iters {
        let grad = grad_I(&u, f, true)?;
        let norm_u = norm_alpha(&u);
        grad_norm = norm_alpha(&grad) / norm_u;
        if grad_norm <= cfg.grad_tol {
            let p = energy_I(&u, f).pohozaev;
            if p.abs() <= cfg.pohozaev_tol * norm_u * norm_u {
                outcome = Outcome::Converged;
                break;
            }
            if polishing {
                outcome = Outcome::Residual;
                break;
            }
        }
        if !polishing && grad_norm <= POLISH_SWITCH {
            polishing = nehari_project(&u, f).is_ok();
        }
        if iterations % 100 == 0 {
            tau = cfg.step;
        }
        if iterations % STAGNATION_WINDOW == 0 {
            if iterations > 0 && polishing && checkpoint - energy <= 1e-14 * (1.0 + energy.abs()) {
                outcome = Outcome::Stalled;
                break;
            }
            checkpoint = energy;
        }
        iterations += 1;
        let accepted = loop {
            let mut trial = Some(positive(u.axpy(-tau, &grad)?));
            if iterations % cfg.project_every == 0 {
                let v = trial.take().expect("trial set");
                trial = if polishing {
                    nehari_project(&v, f).ok().map(|(_, w)| positive(w))
                } else {
                    Some(positive(project(&v, f, mode)?))
                };
            }
            let e = trial.as_ref().map_or(f64::INFINITY, |v| energy_I(v, f).total);
            if let Some(trial) = trial.filter(|_| e <= energy + 1e-12 * (1.0 + energy.abs())) {
                u = trial;
                energy = e;
                break true;
            }
            tau *= 0.5;
            if tau < 1e-14 {
                break false;
            }
        };
        if !accepted {
            if !polishing && nehari_project(&u, f).is_ok() {
                polishing = true;
                tau = cfg.step;
                continue;
            }
            outcome = Outcome::Stalled;
            break;
        }
    }
    let report = make_report(&u, f, mode, outcome == Outcome::Converged, iterations, grad_norm, clock)?;
    Ok((u, report, outcome))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Converged,
    /// Stationary with the Pohozaev residual above tolerance.
    Residual,
    Stalled,
    MaxIters,
}

fn make_report(
    u: &RealField,
    f: &AutonomousNonlinearity,
    mode: Projection,
    converged: bool,
    iterations: usize,
    grad_norm: f64,
    clock: Instant,
) -> Result<SolveReport, SolverError> {
    let grid = u.grid();
    let e = energy_I(u, f);
    let c_mp_estimate = match mode {
        Projection::Pohozaev => {
            let modes = ModeWeights::new(u);
            maximize_log(|t| path_energy_from(grid, &modes, e.potential, t), 0.25, 4.0, 129, Some(1.0)).1
        }
        Projection::Nehari => {
            let q = 2.0 * e.quadratic;
            let cell = grid.cell_volume();
            let energy_at =
                |lam: f64| 0.5 * lam * lam * q - cell * u.values().iter().map(|&s| f.F(lam * s)).sum::<f64>();
            maximize_log(energy_at, 0.25, 4.0, 129, Some(1.0)).1
        }
    };
    Ok(SolveReport {
        converged,
        iterations,
        energy: e.total,
        pohozaev_residual: e.pohozaev,
        grad_norm,
        c_mp_estimate,
        boundary_mass: boundary_mass(u, BOUNDARY_MARGIN_FRACTION * grid.half_length()),
        wall_time_s: clock.elapsed().as_secs_f64(),
        norm_alpha_sq: 2.0 * e.quadratic,
        min_value: u.min(),
        max_value: u.max(),
        projection: mode,
        limit_mode: grid.limit_mode(),
    })
}
