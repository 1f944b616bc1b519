//! Dilation and translation by exact evaluation of the trigonometric interpolant.

use std::f64::consts::PI;

use super::{boundary_mass, Grid, RealField, SpectralError};

/// Admissible dilation factors and the escape-mass threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilationGuard {
    pub t_min: f64,
    pub t_max: f64,
    pub threshold: f64,
}

impl Default for DilationGuard {
    fn default() -> Self {
        DilationGuard {
            t_min: 0.2,
            t_max: 20.0,
            threshold: 1e-6,
        }
    }
}

/// Fraction of `u`'s mass that a dilation by `t` would push out of the box
/// (for `t > 1`) or smear across the periodic seam (for `t < 1`).
pub fn escape_mass(u: &RealField, t: f64) -> f64 {
    let grid = u.grid();
    let l = grid.half_length();
    let margin = if t > 1.0 { l - l / t + grid.spacing() } else { grid.spacing() };
    boundary_mass(u, margin)
}

/// Samples of `x ↦ u(x / t)` with the default [`DilationGuard`].
pub fn dilate_field(u: &RealField, t: f64) -> Result<RealField, SpectralError> {
    dilate_field_with(u, t, &DilationGuard::default())
}

pub fn dilate_field_with(u: &RealField, t: f64, guard: &DilationGuard) -> Result<RealField, SpectralError> {
    if !(t >= guard.t_min && t <= guard.t_max) {
        return Err(SpectralError::DilationOutOfRange {
            t,
            min: guard.t_min,
            max: guard.t_max,
        });
    }
    if t == 1.0 {
        return Ok(u.clone());
    }
    let mass = escape_mass(u, t);
    if mass > guard.threshold {
        return Err(SpectralError::SupportEscapesBox { t, mass });
    }
    Ok(resample_affine(u, t, None))
}

/// Samples of `x ↦ u((x - shift) / t)`; points whose preimage leaves the box
/// are set to zero. No guard is applied.
pub fn resample_affine(u: &RealField, t: f64, shift: Option<&[f64]>) -> RealField {
    let grid = u.grid();
    let dim = grid.dim();
    let mut data = u.values().to_vec();
    let mut buffer = vec![0.0; data.len()];
    for axis in 0..dim {
        let z = shift.map_or(0.0, |s| s[axis]);
        let mat = interpolation_matrix(grid, t, z);
        apply_along_axis(grid, axis, &mat, &data, &mut buffer);
        std::mem::swap(&mut data, &mut buffer);
    }
    RealField::from_vec_unchecked(grid, data)
}

/// Row `j` evaluates the 1-D interpolant at `(x_j - z) / t`.
fn interpolation_matrix(grid: &Grid, t: f64, z: f64) -> Vec<f64> {
    let m = grid.points();
    let l = grid.half_length();
    let half_order = (m / 2 - 1) as f64;
    let mut mat = vec![0.0; m * m];
    let nyquist_sign: Vec<f64> = (0..m)
        .map(|i| if (i + m / 2) % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    for j in 0..m {
        let y = (grid.coordinate(j) - z) / t;
        if !(-l..=l).contains(&y) {
            continue;
        }
        let nyq_y = (PI * m as f64 * y / (2.0 * l)).cos();
        let row = &mut mat[j * m..(j + 1) * m];
        for (i, slot) in row.iter_mut().enumerate() {
            let theta = wrap_angle(PI * (y - grid.coordinate(i)) / l);
            let half = 0.5 * theta;
            let dirichlet = if half.abs() < 1e-9 {
                2.0 * half_order + 1.0
            } else {
                ((half_order + 0.5) * theta).sin() / half.sin()
            };
            *slot = (dirichlet + nyq_y * nyquist_sign[i]) / m as f64;
        }
    }
    mat
}

fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = theta % two_pi;
    if w > PI {
        w -= two_pi;
    } else if w <= -PI {
        w += two_pi;
    }
    w
}

fn apply_along_axis(grid: &Grid, axis: usize, mat: &[f64], src: &[f64], dst: &mut [f64]) {
    let m = grid.points();
    let stride = m.pow((grid.dim() - 1 - axis) as u32);
    let block = m * stride;
    let mut line = vec![0.0; m];
    for outer in 0..src.len() / block {
        for inner in 0..stride {
            let start = outer * block + inner;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = src[start + i * stride];
            }
            for j in 0..m {
                let row = &mat[j * m..(j + 1) * m];
                dst[start + j * stride] = row.iter().zip(&line).map(|(a, b)| a * b).sum();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &Grid, sigma: f64) -> RealField {
        RealField::from_fn(grid, |x| {
            (-x.iter().map(|c| c * c).sum::<f64>() / (2.0 * sigma * sigma)).exp()
        })
        .unwrap()
    }

    #[test]
    fn unit_dilation_is_identity() {
        let g = Grid::new(2, 0.5, 8.0, 32).unwrap();
        let u = gaussian(&g, 1.0);
        assert_eq!(dilate_field(&u, 1.0).unwrap().values(), u.values());
        // The interpolation matrix itself reproduces the samples at t = 1.
        let v = resample_affine(&u, 1.0, None);
        assert!(v.max_abs_diff(&u).unwrap() < 1e-13);
    }

    #[test]
    fn dilation_matches_analytic_gaussian() {
        let g = Grid::new(2, 0.5, 10.0, 64).unwrap();
        let u = gaussian(&g, 1.0);
        let v = dilate_field(&u, 1.7).unwrap();
        let expect = gaussian(&g, 1.7);
        assert!(v.max_abs_diff(&expect).unwrap() < 1e-10);
        let w = dilate_field(&u, 0.8).unwrap();
        assert!(w.max_abs_diff(&gaussian(&g, 0.8)).unwrap() < 1e-10);
    }

    #[test]
    fn shift_moves_the_bump() {
        let g = Grid::new(1, 0.5, 10.0, 64).unwrap();
        let u = gaussian(&g, 1.0);
        let v = resample_affine(&u, 1.0, Some(&[1.3]));
        let expect = RealField::from_fn(&g, |x| (-(x[0] - 1.3).powi(2) / 2.0).exp()).unwrap();
        assert!(v.max_abs_diff(&expect).unwrap() < 1e-10);
    }

    #[test]
    fn guard_rejects_escaping_support() {
        let g = Grid::new(1, 0.5, 5.0, 32).unwrap();
        let wide = gaussian(&g, 2.0);
        assert!(matches!(
            dilate_field(&wide, 3.0),
            Err(SpectralError::SupportEscapesBox { .. })
        ));
        assert!(matches!(
            dilate_field(&wide, 0.1),
            Err(SpectralError::DilationOutOfRange { .. })
        ));
    }
}
