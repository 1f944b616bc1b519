use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::KernelError;
use crate::spectral::{gaussian_bump, norm_alpha, random_smooth_field, resolvent_solve, Grid};

/// Relative slack of the pointwise comparison.
pub const COMPARISON_TOL: f64 = 1e-8;
/// Relative slack of the rectification inequality.
pub const RECTIFICATION_TOL: f64 = 1e-8;

/// Independent generator for sample `index` of a batch seeded with `seed`.
pub(crate) fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub passed: bool,
    /// `min_x (v₂ - v₁) / ‖v₂‖_∞` over all pairs.
    pub worst_margin: f64,
    pub violations: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Solves `((1-Δ)^α - (1-δ₀)) v = g` for pairs `g₁ ≤ g₂ = g₁ + bump` and
/// counts points with `v₁ > v₂ + tol·‖v₂‖_∞`.
pub fn comparison_check(pairs: usize, delta0: f64, grid: &Grid, seed: u64) -> Result<ComparisonReport, KernelError> {
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(KernelError::BadDelta(delta0));
    }
    let l = grid.half_length();
    let h = grid.spacing();
    let results = (0..pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let g1 = random_smooth_field(grid, &mut rng, true);
            let center: Vec<f64> = (0..grid.dim()).map(|_| rng.gen_range(-l / 3.0..l / 3.0)).collect();
            let sigma = rng.gen_range((3.0 * h)..(4.0 * h).max(l / 8.0));
            let bump = gaussian_bump(grid, &center, sigma, rng.gen_range(0.1..2.0));
            let g2 = g1.axpy(1.0, &bump)?;
            let v1 = resolvent_solve(&g1, delta0)?;
            let v2 = resolvent_solve(&g2, delta0)?;
            let scale = v2.max_abs().max(f64::MIN_POSITIVE);
            let diffs = v2.values().iter().zip(v1.values()).map(|(b, a)| (b - a) / scale);
            let violations = diffs.clone().filter(|&d| d < -COMPARISON_TOL).count();
            let margin = diffs.fold(f64::INFINITY, f64::min);
            Ok((margin, violations))
        })
        .collect::<Result<Vec<_>, KernelError>>()?;
    let worst_margin = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let violations: usize = results.iter().map(|r| r.1).sum();
    Ok(ComparisonReport {
        passed: violations == 0,
        worst_margin,
        violations,
        samples: pairs,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RectificationReport {
    pub passed: bool,
    /// `min (1 + tol) - ‖|u|‖_α / ‖u‖_α` over the samples.
    pub worst_margin: f64,
    pub max_ratio: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `‖|u|‖_α ≤ ‖u‖_α (1 + tol)` on random sign-changing smooth fields.
pub fn abs_inequality_check(fields: usize, grid: &Grid, seed: u64) -> RectificationReport {
    let ratios: Vec<f64> = (0..fields)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let u = random_smooth_field(grid, &mut rng, true);
            norm_alpha(&u.abs()) / norm_alpha(&u)
        })
        .collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    RectificationReport {
        passed: ratios.iter().all(|&r| r <= 1.0 + RECTIFICATION_TOL),
        worst_margin: 1.0 + RECTIFICATION_TOL - max_ratio,
        max_ratio,
        samples: fields,
        seed,
    }
}
