use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ground_state::{ground_state_solve, Projection};
use super::search::maximize_log;
use super::{PathSample, SolverConfig, SolverError};
use crate::functionals::{energy_I, g_from, path_energy_from, potential_integral, ModeWeights};
use crate::model::AutonomousNonlinearity;
use crate::spectral::{norm_alpha_sq, random_smooth_field, RealField};

/// `(t, I(u(·/t)), g(t))` on `n` equally spaced `t` in `[t0, t1]`.
pub fn optimal_path_scan(u_star: &RealField, f: &AutonomousNonlinearity, t_range: (f64, f64), n: usize) -> Vec<PathSample> {
    let grid = u_star.grid();
    let modes = ModeWeights::new(u_star);
    let pot = potential_integral(u_star, f);
    let (t0, t1) = t_range;
    (0..n)
        .map(|i| {
            let t = if n == 1 {
                t0
            } else {
                let s = i as f64 / (n - 1) as f64;
                (1.0 - s) * t0 + s * t1
            };
            PathSample {
                t,
                energy: path_energy_from(grid, &modes, pot, t),
                g_value: g_from(grid, &modes, pot, t),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MountainPassReport {
    /// Smallest path maximum found: an upper bound for the mountain-pass level.
    pub estimate: f64,
    pub least_energy: f64,
    pub straight_segment: f64,
    pub optimal_path: f64,
    /// Maxima of the randomized paths, in path order.
    pub random_paths: Vec<f64>,
    pub seed: u64,
}

/// `max_{λ ∈ (0, Λ]} I(λ v)` with `Λ ≥ 1` grown until `I(Λ v) < 0`.
fn segment_max(v: &RealField, f: &AutonomousNonlinearity) -> Option<f64> {
    let q = norm_alpha_sq(v);
    let cell = v.grid().cell_volume();
    let energy = |lam: f64| 0.5 * lam * lam * q - cell * v.values().iter().map(|&s| f.F(lam * s)).sum::<f64>();
    let mut end = 1.0;
    while energy(end) >= 0.0 {
        end *= 2.0;
        if end > 1e3 {
            return None;
        }
    }
    Some(maximize_log(energy, 1e-3 * end, end, 129, Some(1.0)).1)
}

/// `max_t I(v(·/t))` for `t` up to the first doubling with negative energy.
fn dilation_max(v: &RealField, f: &AutonomousNonlinearity) -> Option<f64> {
    let grid = v.grid();
    let modes = ModeWeights::new(v);
    let pot = potential_integral(v, f);
    let energy = |t: f64| path_energy_from(grid, &modes, pot, t);
    let mut end = 2.0;
    while energy(end) >= 0.0 {
        end *= 2.0;
        if end > 1e3 {
            return None;
        }
    }
    Some(maximize_log(energy, 1e-2, end, 257, Some(1.0)).1)
}

/// Upper bound for the mountain-pass level from admissible trial paths.
///
/// Paths: the segment `λ u1`; the optimal path through `u*` (dilations, or
/// amplitudes where dilation paths are not mountain passes); `trial_paths`
/// perturbed copies of the optimal path, alternating between dilation and
/// amplitude families.
pub fn mountain_pass_estimate(
    f: &AutonomousNonlinearity,
    u1: &RealField,
    u_star: Option<&RealField>,
    trial_paths: usize,
    cfg: &SolverConfig,
) -> Result<MountainPassReport, SolverError> {
    let end = energy_I(u1, f).total;
    if end >= 0.0 {
        return Err(SolverError::BadEndpoint(end));
    }
    let grid = u1.grid();
    let solved;
    let u_star = match u_star {
        Some(u) => u,
        None => {
            solved = ground_state_solve(grid, f, cfg)?.0;
            &solved
        }
    };
    let mode = Projection::for_grid(grid);
    let least_energy = energy_I(u_star, f).total;
    let straight_segment = segment_max(u1, f).ok_or(SolverError::BadEndpoint(end))?;
    let through = |v: &RealField, dilation: bool| {
        if dilation && mode == Projection::Pohozaev {
            dilation_max(v, f).or_else(|| segment_max(v, f))
        } else {
            segment_max(v, f)
        }
    };
    let optimal_path = through(u_star, true).ok_or(SolverError::BadEndpoint(end))?;
    let scale = u_star.max_abs();
    let random_paths: Vec<f64> = (0..trial_paths)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
            let phi = random_smooth_field(grid, &mut rng, true);
            let eps = rng.gen_range(0.05..0.3) * scale / phi.max_abs().max(f64::MIN_POSITIVE);
            let v = u_star.axpy(eps, &phi).expect("same grid");
            through(&v, k % 2 == 0).unwrap_or(f64::INFINITY)
        })
        .collect();
    let estimate = random_paths
        .iter()
        .copied()
        .fold(straight_segment.min(optimal_path), f64::min);
    Ok(MountainPassReport {
        estimate,
        least_energy,
        straight_segment,
        optimal_path,
        random_paths,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::initial_guess;
    use crate::spectral::Grid;

    #[test]
    fn soliton_paths_bound_the_least_energy() {
        let grid = Grid::new(1, 1.0, 16.0, 128).unwrap();
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        let cfg = SolverConfig::default();
        let (u, _) = ground_state_solve(&grid, &f, &cfg).unwrap();
        let u1 = initial_guess(&grid, &f, 2.0, 1.0).unwrap();
        let r = mountain_pass_estimate(&f, &u1, Some(&u), 8, &cfg).unwrap();
        assert!((r.optimal_path - r.least_energy).abs() < 1e-8 * r.least_energy);
        assert!(r.random_paths.iter().all(|&m| m >= r.least_energy - 1e-9));
        assert!(r.straight_segment >= r.least_energy);
        let again = mountain_pass_estimate(&f, &u1, Some(&u), 8, &cfg).unwrap();
        assert_eq!(r, again);
        assert!(matches!(
            mountain_pass_estimate(&f, &u, Some(&u), 1, &cfg),
            Err(SolverError::BadEndpoint(_))
        ));
    }

    #[test]
    fn path_scan_endpoints() {
        let grid = Grid::new(2, 0.75, 8.0, 32).unwrap();
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        let u = crate::spectral::gaussian_bump(&grid, &[0.0, 0.0], 1.0, 2.5);
        let s = optimal_path_scan(&u, &f, (0.5, 2.0), 4);
        assert_eq!(s.len(), 4);
        assert_eq!(s[0].t, 0.5);
        assert_eq!(s[3].t, 2.0);
        for p in &s {
            let e = crate::functionals::augmented_I(p.t.ln(), &u, &f);
            assert!((p.energy - e).abs() < 1e-12 * (1.0 + e.abs()));
            assert!((p.g_value - crate::functionals::g_of_t(&u, &f, p.t)).abs() < 1e-12 * (1.0 + e.abs()));
        }
    }
}
