//! Fourier multipliers, the `H^α` norm and resolvent solves.

use super::{to_physical, to_spectral, Grid, RealField, SpectralError, FOUR_PI_SQ};

/// Applies the real symbol `m(ξ)` to `u`.
///
/// `m` receives the frequency vector of each lattice point, with the Nyquist
/// component taken positive.
pub fn apply_multiplier(u: &RealField, m: impl Fn(&[f64]) -> f64) -> Result<RealField, SpectralError> {
    let grid = u.grid();
    let mut coeffs = to_spectral(u);
    let mut idx = vec![0usize; grid.dim()];
    let mut xi = vec![0.0; grid.dim()];
    for (flat, c) in coeffs.coeffs_mut().iter_mut().enumerate() {
        grid.unflatten(flat, &mut idx);
        for (x, &i) in xi.iter_mut().zip(&idx) {
            *x = grid.axis_frequency(i);
        }
        let w = m(&xi);
        if !w.is_finite() {
            return Err(SpectralError::NonFiniteMultiplier(flat));
        }
        *c *= w;
    }
    to_physical(&coeffs)
}

/// Applies a symbol given per flat coefficient index, e.g. a function of `|ξ|²`.
pub fn apply_symbol(u: &RealField, symbol: &[f64]) -> Result<RealField, SpectralError> {
    let mut coeffs = to_spectral(u);
    for (flat, (c, &w)) in coeffs.coeffs_mut().iter_mut().zip(symbol).enumerate() {
        if !w.is_finite() {
            return Err(SpectralError::NonFiniteMultiplier(flat));
        }
        *c *= w;
    }
    to_physical(&coeffs)
}

/// `(1 - Δ)^α u` with the grid's `α`.
pub fn apply_fractional_op(u: &RealField) -> Result<RealField, SpectralError> {
    apply_symbol(u, u.grid().symbol())
}

/// `(1 - Δ)^{-α} u`; the Sobolev preconditioner.
pub fn apply_inverse_fractional_op(u: &RealField) -> Result<RealField, SpectralError> {
    let inv: Vec<f64> = u.grid().symbol().iter().map(|s| 1.0 / s).collect();
    apply_symbol(u, &inv)
}

/// `(2L)^N Σ_k (1 + 4π²|ξ_k|²)^α |c_k|²`.
pub fn norm_alpha_sq(u: &RealField) -> f64 {
    let grid = u.grid();
    shell_sum(grid, &shell_power(u), grid.alpha(), 1.0)
}

/// `Σ |c_k|²` grouped by the shells of equal `|ξ|²`.
pub fn shell_power(u: &RealField) -> Vec<f64> {
    let grid = u.grid();
    let mut power = vec![0.0; grid.shell_xi_sq().len()];
    for (c, &s) in to_spectral(u).coeffs().iter().zip(grid.shell_of()) {
        power[s as usize] += c.norm_sqr();
    }
    power
}

/// `(2L)^N Σ_shells (1 + 4π²|ξ|² scale)^β P_shell`.
pub fn shell_sum(grid: &Grid, power: &[f64], beta: f64, scale: f64) -> f64 {
    let s: f64 = grid
        .shell_xi_sq()
        .iter()
        .zip(power)
        .map(|(&xi2, &w)| (1.0 + FOUR_PI_SQ * xi2 * scale).powf(beta) * w)
        .sum();
    grid.box_volume() * s
}

/// The `H^α` norm `‖u‖_α` computed spectrally.
pub fn norm_alpha(u: &RealField) -> f64 {
    norm_alpha_sq(u).sqrt()
}

/// `(2L)^N Σ_k w_k |c_k|²`.
pub fn weighted_coefficient_sum(u: &RealField, weight: &[f64]) -> f64 {
    let coeffs = to_spectral(u);
    let s: f64 = coeffs
        .coeffs()
        .iter()
        .zip(weight)
        .map(|(c, w)| w * c.norm_sqr())
        .sum();
    u.grid().box_volume() * s
}

/// `(1 + 4π²|ξ|²)^α - (1 - δ₀)` per coefficient; strictly positive for `δ₀ > 0`.
pub fn resolvent_symbol(grid: &Grid, delta0: f64) -> Result<Vec<f64>, SpectralError> {
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(SpectralError::BadDelta(delta0));
    }
    Ok(grid.symbol().iter().map(|s| s - (1.0 - delta0)).collect())
}

/// Solves `(1 - Δ)^α v - (1 - δ₀) v = g` by spectral division.
pub fn resolvent_solve(g: &RealField, delta0: f64) -> Result<RealField, SpectralError> {
    let inv: Vec<f64> = resolvent_symbol(g.grid(), delta0)?
        .into_iter()
        .map(|d| 1.0 / d)
        .collect();
    apply_symbol(g, &inv)
}

/// Fraction of `Σ u²` carried by the region `‖x‖_∞ > L - margin`.
///
/// Each sample stands for its cell of side `h`; a cell straddling the cutoff
/// contributes the fraction of its volume outside the inner cube.
pub fn boundary_mass(u: &RealField, margin: f64) -> f64 {
    if margin <= 0.0 {
        return 0.0;
    }
    let grid = u.grid();
    let cutoff = (grid.half_length() - margin).max(0.0);
    let h = grid.spacing();
    let inside: Vec<f64> = (0..grid.points())
        .map(|i| {
            let x = grid.coordinate(i);
            let lo = (x - 0.5 * h).max(-cutoff);
            let hi = (x + 0.5 * h).min(cutoff);
            ((hi - lo) / h).clamp(0.0, 1.0)
        })
        .collect();
    let mut idx = vec![0usize; grid.dim()];
    let (mut outer, mut total) = (0.0, 0.0);
    for (i, &v) in u.values().iter().enumerate() {
        let w = v * v;
        total += w;
        grid.unflatten(i, &mut idx);
        let kept: f64 = idx.iter().map(|&k| inside[k]).product();
        outer += w * (1.0 - kept);
    }
    if total > 0.0 {
        outer / total
    } else {
        0.0
    }
}

/// `1 + 4π²|ξ|²` for a frequency vector.
pub fn bessel_base(xi: &[f64]) -> f64 {
    1.0 + FOUR_PI_SQ * xi.iter().map(|x| x * x).sum::<f64>()
}
