use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::{erf, erfc};
use statrs::function::gamma::gamma;

use super::diagnostics::{line_fit, radial_profile};
use super::quadrature::adaptive_simpson;
use super::KernelError;
use crate::spectral::{resolvent_symbol, to_physical, Grid, RealField, SpectralField, FOUR_PI_SQ};

/// Relative tolerance of each kernel quadrature.
pub const KERNEL_TOL: f64 = 1e-10;
const KERNEL_BUDGET: usize = 2_000_000;
/// Exponent below which the integrand is treated as zero.
const CUTOFF: f64 = 900.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    G2Alpha,
    ResolventK { delta0: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub alpha: f64,
    pub dim: usize,
    pub kind: KernelKind,
}

impl KernelTable {
    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// Strictly decreasing from the second sample on.
    pub fn is_decreasing(&self) -> bool {
        self.values.windows(2).skip(1).all(|w| w[1] < w[0])
    }
}

fn check_alpha_dim(alpha: f64, dim: usize) -> Result<(), KernelError> {
    if !(alpha > 0.0 && alpha < 1.0) || !(1..=3).contains(&dim) {
        return Err(KernelError::InvalidArgument(format!("need 0 < alpha < 1 and N in 1..=3, got alpha = {alpha}, N = {dim}")));
    }
    Ok(())
}

fn prefactor(alpha: f64) -> f64 {
    (4.0 * PI).powf(-alpha) / gamma(alpha)
}

/// Upper end in `s = ln t`, where `e^s / 4π` exceeds the cutoff.
fn s_upper() -> f64 {
    (4.0 * PI * CUTOFF).ln()
}

/// `G_{2α}(r)` from the subordination integral in `s = ln t`.
pub fn bessel_kernel_value(alpha: f64, dim: usize, r: f64) -> Result<f64, KernelError> {
    check_alpha_dim(alpha, dim)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(KernelError::InvalidArgument(format!("radius {r} must be positive")));
    }
    let power = (2.0 * alpha - dim as f64) / 2.0;
    let r2 = PI * r * r;
    let integrand = |s: f64| (-r2 * (-s).exp() - s.exp() / (4.0 * PI) + s * power).exp();
    let mut lo = (r2 / CUTOFF).ln();
    if power > 0.0 {
        lo = lo.max(-CUTOFF / power);
    }
    let hi = s_upper();
    Ok(prefactor(alpha) * adaptive_simpson(integrand, lo, hi, KERNEL_TOL, KERNEL_BUDGET)?)
}

pub fn bessel_kernel(alpha: f64, dim: usize, radii: &[f64]) -> Result<KernelTable, KernelError> {
    check_alpha_dim(alpha, dim)?;
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KernelError::InvalidArgument("radii must be strictly increasing".into()));
    }
    let values = radii
        .par_iter()
        .map(|&r| bessel_kernel_value(alpha, dim, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KernelTable {
        radii: radii.to_vec(),
        values,
        alpha,
        dim,
        kind: KernelKind::G2Alpha,
    })
}

/// Surface area of the unit sphere in `R^N`.
pub fn sphere_area(dim: usize) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma(dim as f64 / 2.0)
}

/// `∫_{r_min}^{r_max} G_{2α}(r) |S^{N-1}| r^{N-1} dr`, integrated in `ln r`.
pub fn kernel_l1_mass(alpha: f64, dim: usize, r_min: f64, r_max: f64) -> Result<f64, KernelError> {
    check_alpha_dim(alpha, dim)?;
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(KernelError::InvalidArgument(format!("bad radial range [{r_min}, {r_max}]")));
    }
    let area = sphere_area(dim);
    let n = dim as f64;
    let failure = std::cell::Cell::new(None);
    let integrand = |rho: f64| {
        let r = rho.exp();
        match bessel_kernel_value(alpha, dim, r) {
            Ok(g) => g * area * (n * rho).exp(),
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let mass = adaptive_simpson(integrand, r_min.ln(), r_max.ln(), 1e-8, KERNEL_BUDGET)?;
    match failure.take() {
        Some(e) => Err(e),
        None => Ok(mass),
    }
}

/// Least-squares slope of `ln G` against `ln r` on `samples` log-spaced radii in `[r1, r2]`.
pub fn small_r_slope(alpha: f64, dim: usize, r1: f64, r2: f64, samples: usize) -> Result<f64, KernelError> {
    if samples < 2 || !(r1 > 0.0 && r2 > r1) {
        return Err(KernelError::InvalidArgument("need two or more samples on 0 < r1 < r2".into()));
    }
    let radii: Vec<f64> = (0..samples)
        .map(|i| r1 * (r2 / r1).powf(i as f64 / (samples - 1) as f64))
        .collect();
    let table = bessel_kernel(alpha, dim, &radii)?;
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = table.values.iter().map(|v| v.ln()).collect();
    Ok(line_fit(&xs, &ys).slope)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierCheck {
    /// Largest `|Ĝ_grid(ξ) - (1 + 4π²|ξ|²)^{-α}|` over the checked modes.
    pub max_error: f64,
    pub modes_checked: usize,
    pub max_index: usize,
}

/// Mean of `e^{-π x² / t}` over `[a, b]`.
fn cell_gauss(a: f64, b: f64, t: f64) -> f64 {
    let k = (PI / t).sqrt();
    let (ka, kb) = (k * a, k * b);
    let diff = if ka >= 0.0 {
        erfc(ka) - erfc(kb)
    } else if kb <= 0.0 {
        erfc(-kb) - erfc(-ka)
    } else {
        erf(kb) - erf(ka)
    };
    0.5 * t.sqrt() * diff / (b - a)
}

/// Cell averages of `G_{2α}` on `grid`, from the subordination integral with
/// the Gaussian averaged exactly over each cell.
pub fn bessel_cell_averages(grid: &Grid) -> Result<RealField, KernelError> {
    let alpha = grid.alpha();
    let dim = grid.dim();
    check_alpha_dim(alpha, dim)?;
    let h = grid.spacing();
    let power = (2.0 * alpha - dim as f64) / 2.0;
    let hi = s_upper();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut x = vec![0.0; dim];
            grid.point(flat, &mut x);
            let cells: Vec<(f64, f64)> = x.iter().map(|&c| (c - 0.5 * h, c + 0.5 * h)).collect();
            let d2: f64 = cells
                .iter()
                .map(|&(a, b)| if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()).powi(2) })
                .sum();
            let lo = if d2 > 0.0 { (PI * d2 / CUTOFF).ln() } else { (-CUTOFF / alpha).max(-700.0) };
            let integrand = |s: f64| {
                let t = s.exp();
                let avg: f64 = cells.iter().map(|&(a, b)| cell_gauss(a, b, t)).product();
                avg * (-t / (4.0 * PI) + s * power).exp()
            };
            adaptive_simpson(integrand, lo, hi, KERNEL_TOL, KERNEL_BUDGET).map(|v| prefactor(alpha) * v)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RealField::new(grid, values)?)
}

/// Transforms the cell-averaged kernel and compares it, after dividing out
/// the cell-averaging sinc factors, with `(1 + 4π²|ξ|²)^{-α}` for modes with
/// `|k_d| ≤ max_index`.
pub fn bessel_fourier_check(grid: &Grid, max_index: usize) -> Result<FourierCheck, KernelError> {
    let avg = bessel_cell_averages(grid)?;
    let spec = crate::spectral::to_spectral(&avg);
    let h = grid.spacing();
    let volume = grid.box_volume();
    let dim = grid.dim();
    let mut idx = vec![0usize; dim];
    let mut max_error: f64 = 0.0;
    let mut modes = 0;
    for flat in 0..grid.len() {
        grid.unflatten(flat, &mut idx);
        let ks: Vec<i64> = idx.iter().map(|&i| grid.signed_index(i)).collect();
        if ks.iter().any(|k| k.unsigned_abs() as usize > max_index) {
            continue;
        }
        let xi: Vec<f64> = idx.iter().map(|&i| grid.axis_frequency(i)).collect();
        let sinc: f64 = xi
            .iter()
            .map(|&x| if x == 0.0 { 1.0 } else { (PI * x * h).sin() / (PI * x * h) })
            .product();
        let approx = volume * spec.coeffs()[flat].re / sinc;
        let exact = (1.0 + FOUR_PI_SQ * xi.iter().map(|v| v * v).sum::<f64>()).powf(-grid.alpha());
        max_error = max_error.max((approx - exact).abs());
        modes += 1;
    }
    Ok(FourierCheck {
        max_error,
        modes_checked: modes,
        max_index,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailFit {
    /// `max_{r ∈ [r1, r2]} |K(r)| r^k`.
    pub constant: f64,
    pub exponent: f64,
    pub radius: f64,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventKernel {
    pub table: KernelTable,
    /// Least-squares `k` in `|K| ≈ c r^{-k}` over `r ∈ [3, 8]`.
    pub poly_exponent: f64,
    /// Least-squares `λ` in `|K| ≈ c e^{-λ r}` over `r ∈ [3, 8]`.
    pub exp_rate: f64,
    /// Exact on the stored table.
    pub positive_beyond_one: bool,
    pub decreasing_beyond_one: bool,
    /// Largest `|K|` over shells with `r ≥ 0.9 L`.
    pub noise_floor: f64,
    /// Radius where the exponential fit reaches `10 · noise_floor`.
    pub resolved_radius: f64,
    /// Positive on `[1, resolved_radius]`.
    pub positive_resolved: bool,
    /// Decreasing on `[1, resolved_radius]` up to `noise_floor`.
    pub decreasing_resolved: bool,
    #[serde(skip)]
    pub field: RealField,
}

/// `K(x) = Σ_k m(ξ_k) e^{2πi ξ_k·x} / (2L)^N` with
/// `m = 1 / ((1 + 4π²|ξ|²)^α - (1 - δ₀))`, radialized over shells of width `h`.
pub fn resolvent_kernel(alpha: f64, delta0: f64, grid: &Grid) -> Result<ResolventKernel, KernelError> {
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(KernelError::BadDelta(delta0));
    }
    let grid = grid.with_alpha(alpha)?;
    let symbol: Vec<f64> = resolvent_symbol(&grid, delta0)?.into_iter().map(|d| 1.0 / d).collect();
    let field = kernel_from_symbol(&grid, &symbol)?;
    let (radii, values) = radial_profile(&field);
    let keep: Vec<usize> = (0..radii.len()).filter(|&i| radii[i] > 0.0).collect();
    let table = KernelTable {
        radii: keep.iter().map(|&i| radii[i]).collect(),
        values: keep.iter().map(|&i| values[i]).collect(),
        alpha,
        dim: grid.dim(),
        kind: KernelKind::ResolventK { delta0 },
    };
    let beyond: Vec<usize> = (0..table.radii.len()).filter(|&i| table.radii[i] >= 1.0).collect();
    let positive_beyond_one = beyond.iter().all(|&i| table.values[i] > 0.0);
    let decreasing_beyond_one = beyond.windows(2).all(|w| table.values[w[1]] < table.values[w[0]]);
    let fit: Vec<usize> = (0..table.radii.len())
        .filter(|&i| (3.0..=8.0).contains(&table.radii[i]) && table.values[i] > 0.0)
        .collect();
    let ys: Vec<f64> = fit.iter().map(|&i| table.values[i].ln()).collect();
    let log_r: Vec<f64> = fit.iter().map(|&i| table.radii[i].ln()).collect();
    let r: Vec<f64> = fit.iter().map(|&i| table.radii[i]).collect();
    let poly_exponent = -line_fit(&log_r, &ys).slope;
    let exp_fit = line_fit(&r, &ys);
    let exp_rate = -exp_fit.slope;
    let outer = 0.9 * grid.half_length();
    let noise_floor = table
        .radii
        .iter()
        .zip(&table.values)
        .filter(|(r, _)| **r >= outer)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    let resolved_radius = if exp_rate > 0.0 && noise_floor > 0.0 {
        ((exp_fit.intercept - (10.0 * noise_floor).ln()) / exp_rate).clamp(1.0, outer)
    } else {
        outer
    };
    let resolved: Vec<usize> = beyond.iter().copied().filter(|&i| table.radii[i] <= resolved_radius).collect();
    let positive_resolved = resolved.iter().all(|&i| table.values[i] > 0.0);
    let decreasing_resolved = resolved.windows(2).all(|w| table.values[w[1]] < table.values[w[0]] + noise_floor);
    Ok(ResolventKernel {
        table,
        poly_exponent,
        exp_rate,
        positive_beyond_one,
        decreasing_beyond_one,
        noise_floor,
        resolved_radius,
        positive_resolved,
        decreasing_resolved,
        field,
    })
}

/// Inverse transform of a multiplier given per grid mode.
pub(crate) fn kernel_from_symbol(grid: &Grid, symbol: &[f64]) -> Result<RealField, KernelError> {
    let scale = 1.0 / grid.box_volume();
    let coeffs: Vec<Complex64> = symbol.iter().map(|&m| Complex64::new(m * scale, 0.0)).collect();
    Ok(to_physical(&SpectralField::new(grid, coeffs)?)?)
}

/// Checks `|K(radius)| ≤ c r^{-k}` with `c` the largest `|K| r^k` on `[r1, r2]`.
pub fn tail_fit(table: &KernelTable, exponent: f64, (r1, r2): (f64, f64), radius: f64) -> Result<TailFit, KernelError> {
    let constant = table
        .radii
        .iter()
        .zip(&table.values)
        .filter(|(r, _)| (r1..=r2).contains(*r))
        .map(|(r, v)| v.abs() * r.powf(exponent))
        .fold(f64::NAN, f64::max);
    if constant.is_nan() {
        return Err(KernelError::InvalidArgument(format!("no samples in [{r1}, {r2}]")));
    }
    let nearest = table
        .radii
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - radius).abs().total_cmp(&(b.1 - radius).abs()))
        .map(|(i, _)| i)
        .ok_or_else(|| KernelError::InvalidArgument("empty table".into()))?;
    let r = table.radii[nearest];
    let value = table.values[nearest].abs();
    let bound = constant * r.powf(-exponent);
    Ok(TailFit {
        constant,
        exponent,
        radius: r,
        value,
        bound,
        passed: value < bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_smooth_field, resolvent_solve};
    use rand::SeedableRng;

    /// `c (2πr)^ν · 2 K_ν(r)` with `K_ν(r) = ∫_0^∞ e^{-r cosh u} cosh(νu) du` by the trapezoid rule.
    fn cosh_oracle(alpha: f64, dim: usize, r: f64) -> f64 {
        let nu = alpha - dim as f64 / 2.0;
        let du: f64 = 1e-3;
        let mut bessel_k = 0.5 * (-r).exp();
        let mut u = du;
        loop {
            let term = (-r * u.cosh()).exp() * (nu * u).cosh();
            bessel_k += term;
            if term < 1e-300 || u > 60.0 {
                break;
            }
            u += du;
        }
        bessel_k *= du;
        prefactor(alpha) * (2.0 * PI * r).powf(nu) * 2.0 * bessel_k
    }

    #[test]
    fn values_match_the_modified_bessel_form() {
        for (dim, alpha) in [(1, 0.5), (2, 0.4), (2, 0.75), (3, 0.6)] {
            for r in [0.05, 0.5, 2.0, 7.0] {
                let v = bessel_kernel_value(alpha, dim, r).unwrap();
                let o = cosh_oracle(alpha, dim, r);
                assert!((v - o).abs() < 1e-8 * o, "N={dim} alpha={alpha} r={r}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn table_is_positive_and_decreasing() {
        let radii: Vec<f64> = (1..200).map(|i| 0.05 * i as f64).collect();
        let t = bessel_kernel(0.75, 2, &radii).unwrap();
        assert!(t.is_positive());
        assert!(t.is_decreasing());
        assert_eq!(t.kind, KernelKind::G2Alpha);
        assert!(bessel_kernel(1.5, 2, &radii).is_err());
        assert!(bessel_kernel_value(0.5, 2, 0.0).is_err());
    }

    #[test]
    fn unit_mass() {
        for (dim, alpha) in [(2, 0.4), (2, 0.75), (3, 0.6)] {
            let m = kernel_l1_mass(alpha, dim, 1e-4, 50.0).unwrap();
            assert!((m - 1.0).abs() < 1e-3, "N={dim} alpha={alpha}: {m}");
        }
    }

    #[test]
    fn singularity_exponent() {
        for (dim, alpha) in [(2, 0.4), (2, 0.75), (3, 0.6)] {
            let s = small_r_slope(alpha, dim, 1e-4, 1e-2, 20).unwrap();
            assert!((s + (dim as f64 - 2.0 * alpha)).abs() < 0.05, "N={dim} alpha={alpha}: {s}");
        }
    }

    #[test]
    fn transform_of_cell_averages() {
        let grid = Grid::new(2, 0.75, 16.0, 128).unwrap();
        let c = bessel_fourier_check(&grid, 2).unwrap();
        assert_eq!(c.modes_checked, 25);
        assert!(c.max_error < 1e-4, "{c:?}");
    }

    #[test]
    fn resolvent_kernel_convolves_to_the_solve() {
        let grid = Grid::new(2, 0.6, 8.0, 32).unwrap();
        let k = resolvent_kernel(0.6, 0.5, &grid).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = random_smooth_field(&grid, &mut rng, true);
        let v = resolvent_solve(&g, 0.5).unwrap();
        let m = grid.points();
        let cell = grid.cell_volume();
        let kv = k.field.values();
        let gv = g.values();
        let mut worst: f64 = 0.0;
        for i0 in 0..m {
            for i1 in 0..m {
                let mut acc = 0.0;
                for j0 in 0..m {
                    for j1 in 0..m {
                        let a = (i0 + m + m / 2 - j0) % m;
                        let b = (i1 + m + m / 2 - j1) % m;
                        acc += kv[a * m + b] * gv[j0 * m + j1];
                    }
                }
                worst = worst.max((cell * acc - v.values()[i0 * m + i1]).abs());
            }
        }
        assert!(worst < 1e-6 * v.max_abs(), "{worst}");
    }

    #[test]
    fn resolvent_kernel_tends_to_the_bessel_kernel() {
        let grid = Grid::new(2, 0.6, 8.0, 32).unwrap();
        let k = resolvent_kernel(0.6, 1.0 - 1e-8, &grid).unwrap();
        let symbol: Vec<f64> = grid.symbol().iter().map(|d| 1.0 / d).collect();
        let g = kernel_from_symbol(&grid, &symbol).unwrap();
        let diff = k.field.axpy(-1.0, &g).unwrap().max_abs();
        assert!(diff < 1e-6 * g.max_abs(), "{diff}");
    }

    #[test]
    fn resolvent_kernel_tail() {
        let grid = Grid::new(2, 0.6, 16.0, 128).unwrap();
        let k = resolvent_kernel(0.6, 0.9, &grid).unwrap();
        assert!(k.positive_resolved);
        assert!(k.resolved_radius > 8.0);
        let fit = tail_fit(&k.table, 8.0, (3.0, 8.0), 10.0).unwrap();
        assert!(fit.passed, "{fit:?}");
        assert!(k.exp_rate > 1.0 && k.exp_rate < 1.3, "{}", k.exp_rate);
        let k = resolvent_kernel(0.6, 0.25, &grid).unwrap();
        assert!(k.positive_resolved && k.decreasing_resolved);
        assert!(matches!(resolvent_kernel(0.6, 1.0, &grid), Err(KernelError::BadDelta(_))));
    }

    #[test]
    fn cell_means_match_simpson() {
        for (a, b, t) in [(-0.5, 0.5, 1e4), (-0.1, 0.3, 0.2), (2.0, 2.25, 1.0), (-3.0, -2.5, 0.01)] {
            let n = 2000;
            let w = (b - a) / n as f64;
            let f = |x: f64| (-PI * x * x / t).exp();
            let sum: f64 = (0..=n)
                .map(|i| {
                    let c = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    c * f(a + w * i as f64)
                })
                .sum();
            let o = sum * w / 3.0 / (b - a);
            let v = cell_gauss(a, b, t);
            assert!((v - o).abs() < 1e-10 * o.max(1e-300), "[{a}, {b}] t={t}: {v} vs {o}");
        }
    }
}
