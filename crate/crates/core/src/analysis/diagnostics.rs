use std::collections::BTreeMap;

use serde::Serialize;

use super::KernelError;
use crate::spectral::RealField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / n).sqrt();
    LineFit {
        slope,
        intercept,
        residual,
    }
}

/// Shell averages over bins `[(i - ½)h, (i + ½)h)` of radius, for `r ≤ L`.
/// Returns the mean radius and mean value of each non-empty bin.
pub fn radial_profile(u: &RealField) -> (Vec<f64>, Vec<f64>) {
    let grid = u.grid();
    let h = grid.spacing();
    let l = grid.half_length();
    let mut bins: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
    let mut x = vec![0.0; grid.dim()];
    for (i, &v) in u.values().iter().enumerate() {
        grid.point(i, &mut x);
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r > l {
            continue;
        }
        let slot = bins.entry((r / h).round() as usize).or_insert((0.0, 0.0, 0));
        slot.0 += r;
        slot.1 += v;
        slot.2 += 1;
    }
    bins.values().map(|&(r, v, c)| (r / c as f64, v / c as f64)).unzip()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    /// `k` in `|u| ≈ c r^{-k}`.
    pub poly_exponent: f64,
    pub poly_residual: f64,
    /// `λ` in `|u| ≈ c e^{-λ r}`.
    pub exp_rate: f64,
    pub exp_residual: f64,
    pub samples: usize,
    pub fit_range: (f64, f64),
}

/// Log-log and log-linear fits of the shell profile of `|u|` over `[r1, r2]`.
pub fn decay_diagnostic(u: &RealField, (r1, r2): (f64, f64)) -> Result<DecayReport, KernelError> {
    let grid = u.grid();
    let limit = 0.9 * grid.half_length();
    if !(r1 > 0.0 && r2 > r1 && r2 < limit) {
        return Err(KernelError::InvalidArgument(format!("fit range [{r1}, {r2}] must lie in (0, {limit})")));
    }
    let (radii, values) = radial_profile(&u.abs());
    let peak = u.max_abs();
    let floor = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(floor < 1e-3 * peak) {
        return Err(KernelError::InsufficientDecay { floor, peak });
    }
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&values)
        .filter(|(r, v)| (r1..=r2).contains(*r) && **v > 0.0)
        .map(|(&r, &v)| (r, v.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(KernelError::InvalidArgument(format!("only {} usable shells in the fit range", pts.len())));
    }
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let rs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let logs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let poly = line_fit(&logs, &ys);
    let expo = line_fit(&rs, &ys);
    Ok(DecayReport {
        poly_exponent: -poly.slope,
        poly_residual: poly.residual,
        exp_rate: -expo.slope,
        exp_residual: expo.residual,
        samples: pts.len(),
        fit_range: (r1, r2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub min_value: f64,
    pub max_abs: f64,
    /// `Σ x |u| / Σ |u|`.
    pub center_of_mass: Vec<f64>,
    pub center_offset: f64,
    /// `max |u - shell average|` over exact lattice shells about the origin.
    pub radiality_defect: f64,
    /// Largest increase of the shell profile from one shell to the next.
    pub monotonicity_defect: f64,
    pub shells: usize,
}

/// Shells are the exact lattice spheres `Σ (i_d - M/2)² = const`.
pub fn symmetry_diagnostic(u: &RealField) -> SymmetryReport {
    let grid = u.grid();
    let dim = grid.dim();
    let half = (grid.points() / 2) as i64;
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut shells: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    let keys: Vec<i64> = (0..grid.len())
        .map(|flat| {
            grid.unflatten(flat, &mut idx);
            idx.iter().map(|&i| (i as i64 - half).pow(2)).sum()
        })
        .collect();
    let mut mass = 0.0;
    let mut moment = vec![0.0; dim];
    for (flat, (&key, &v)) in keys.iter().zip(u.values()).enumerate() {
        let slot = shells.entry(key).or_insert((0.0, 0));
        slot.0 += v;
        slot.1 += 1;
        grid.point(flat, &mut x);
        mass += v.abs();
        for (m, c) in moment.iter_mut().zip(&x) {
            *m += c * v.abs();
        }
    }
    let average: BTreeMap<i64, f64> = shells.iter().map(|(&k, &(s, c))| (k, s / c as f64)).collect();
    let radiality_defect = keys
        .iter()
        .zip(u.values())
        .map(|(k, v)| (v - average[k]).abs())
        .fold(0.0, f64::max);
    let profile: Vec<f64> = average.values().copied().collect();
    let monotonicity_defect = profile.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max);
    let center_of_mass: Vec<f64> = moment.iter().map(|m| if mass > 0.0 { m / mass } else { 0.0 }).collect();
    SymmetryReport {
        min_value: u.min(),
        max_abs: u.max_abs(),
        center_offset: center_of_mass.iter().map(|c| c * c).sum::<f64>().sqrt(),
        center_of_mass,
        radiality_defect,
        monotonicity_defect,
        shells: profile.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{gaussian_bump, Grid};

    fn radial(grid: &Grid, f: impl Fn(f64) -> f64) -> RealField {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.point(i, &mut x);
                f(x.iter().map(|c| c * c).sum::<f64>().sqrt())
            })
            .collect();
        RealField::new(grid, values).unwrap()
    }

    #[test]
    fn fits_recover_exact_lines() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = line_fit(&xs, &ys);
        assert!((fit.slope - 2.5).abs() < 1e-14 && (fit.intercept + 1.0).abs() < 1e-14 && fit.residual < 1e-14);
    }

    #[test]
    fn exponential_and_algebraic_decay() {
        let grid = Grid::new(2, 0.5, 20.0, 128).unwrap();
        let e = decay_diagnostic(&radial(&grid, |r| (-r).exp()), (3.0, 12.0)).unwrap();
        assert!((e.exp_rate - 1.0).abs() < 1e-2, "{e:?}");
        assert!(e.exp_residual < e.poly_residual);
        let p = decay_diagnostic(&radial(&grid, |r| (1.0 + r * r).powi(-2)), (3.0, 12.0)).unwrap();
        assert!((p.poly_exponent - 4.0).abs() < 0.2, "{p:?}");
        assert!(p.poly_residual < p.exp_residual);
    }

    #[test]
    fn flat_fields_are_rejected() {
        let grid = Grid::new(1, 0.5, 10.0, 64).unwrap();
        let flat = RealField::new(&grid, vec![1.0; 64]).unwrap();
        assert!(matches!(decay_diagnostic(&flat, (1.0, 5.0)), Err(KernelError::InsufficientDecay { .. })));
        assert!(decay_diagnostic(&flat, (1.0, 9.5)).is_err());
    }

    #[test]
    fn radial_gaussian_is_symmetric() {
        let grid = Grid::new(2, 0.5, 8.0, 64).unwrap();
        let s = symmetry_diagnostic(&gaussian_bump(&grid, &[0.0, 0.0], 1.0, 2.0));
        assert!(s.radiality_defect < 1e-12, "{s:?}");
        assert!(s.monotonicity_defect < 1e-12);
        assert!(s.center_offset < 1e-12);
        assert!(s.min_value > 0.0);
    }

    #[test]
    fn shifted_gaussian_center() {
        let grid = Grid::new(2, 0.5, 8.0, 64).unwrap();
        let s = symmetry_diagnostic(&gaussian_bump(&grid, &[1.3, -0.7], 0.8, 1.0));
        assert!((s.center_of_mass[0] - 1.3).abs() < grid.spacing());
        assert!((s.center_of_mass[1] + 0.7).abs() < grid.spacing());
        assert!(s.radiality_defect > 0.1);
    }
}
