use num_complex::Complex64;

use super::{Grid, SpectralError};

/// Real samples on a [`Grid`], row-major over the axes.
#[derive(Clone, Debug)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<RealField, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::NonFiniteValue(i));
        }
        Ok(RealField {
            grid: grid.clone(),
            values,
        })
    }

    /// Internal constructor for values produced by trusted arithmetic.
    pub(crate) fn from_vec_unchecked(grid: &Grid, values: Vec<f64>) -> RealField {
        debug_assert_eq!(values.len(), grid.len());
        RealField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn zeros(grid: &Grid) -> RealField {
        RealField::from_vec_unchecked(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: &Grid, c: f64) -> RealField {
        RealField::from_vec_unchecked(grid, vec![c; grid.len()])
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> Result<RealField, SpectralError> {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.point(i, &mut x);
                f(&x)
            })
            .collect();
        RealField::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pointwise map. Non-finite results are rejected.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<RealField, SpectralError> {
        RealField::new(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> RealField {
        RealField::from_vec_unchecked(&self.grid, self.values.iter().map(|v| c * v).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &RealField) -> Result<RealField, SpectralError> {
        self.check_grid(other)?;
        RealField::new(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    pub fn abs(&self) -> RealField {
        RealField::from_vec_unchecked(&self.grid, self.values.iter().map(|v| v.abs()).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `h^N Σ u²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    /// `h^N Σ u v`.
    pub fn inner(&self, other: &RealField) -> Result<f64, SpectralError> {
        self.check_grid(other)?;
        Ok(self.grid.cell_volume()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>())
    }

    pub fn max_abs_diff(&self, other: &RealField) -> Result<f64, SpectralError> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub(crate) fn check_grid(&self, other: &RealField) -> Result<(), SpectralError> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch)
        }
    }
}

/// Fourier coefficients of the trigonometric interpolant of a [`RealField`].
///
/// Coefficient `c_k` multiplies `exp(2πi ξ_k · x)`, with `x` measured from the
/// box centre; coefficients are stored in FFT index order.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: &Grid, coeffs: Vec<Complex64>) -> Result<SpectralField, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(SpectralError::NonFiniteValue(i));
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub(crate) fn from_vec_unchecked(grid: &Grid, coeffs: Vec<Complex64>) -> SpectralField {
        SpectralField {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Flat index of the coefficient at lattice integers `k` (each in `[-M/2, M/2)`).
    pub fn index_of(&self, k: &[i64]) -> usize {
        let m = self.grid.points() as i64;
        k.iter().fold(0usize, |acc, &ki| acc * m as usize + ki.rem_euclid(m) as usize)
    }

    /// Largest `|c(-k) - conj(c(k))|`, with Nyquist entries paired to themselves.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.grid.points();
        let dim = self.grid.dim();
        let mut idx = vec![0usize; dim];
        let mut worst: f64 = 0.0;
        for flat in 0..self.coeffs.len() {
            self.grid.unflatten(flat, &mut idx);
            let mirror = idx.iter().fold(0usize, |acc, &i| acc * m + (m - i) % m);
            let d = (self.coeffs[mirror] - self.coeffs[flat].conj()).norm();
            worst = worst.max(d);
        }
        worst
    }

    /// `Σ |c_k|`, an upper bound for the sup norm of the physical field.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}
