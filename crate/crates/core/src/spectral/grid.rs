use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::SpectralError;

/// `4π²`, the factor in front of `|ξ|²` in every Bessel-type symbol.
pub const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// Periodic box `[-L, L)^N` sampled with `M` points per axis.
///
/// Sample `i` on an axis sits at `x_i = -L + i h` with `h = 2L / M`, so the
/// origin is the grid point `i = M / 2`. The frequency lattice is
/// `ξ_k = k / (2L)` for `k` in `[-M/2, M/2)`; the Nyquist index `-M/2` is
/// evaluated at its positive frequency whenever a symbol is applied.
///
/// Cloning is cheap: FFT plans and the cached symbol tables are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    dim: usize,
    alpha: f64,
    half_length: f64,
    points: usize,
    len: usize,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
    xi_sq: Vec<f64>,
    symbol: Vec<f64>,
    parity: Vec<f64>,
    shell_xi_sq: Vec<f64>,
    shell_of: Vec<u32>,
}

impl Grid {
    pub fn new(dim: usize, alpha: f64, half_length: f64, points: usize) -> Result<Grid, SpectralError> {
        if !(1..=3).contains(&dim) {
            return Err(SpectralError::InvalidGrid(format!("dimension {dim} not in {{1, 2, 3}}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(SpectralError::InvalidGrid(format!("alpha = {alpha} not in (0, 1]")));
        }
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(SpectralError::InvalidGrid(format!("half length L = {half_length} must be positive")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(SpectralError::InvalidGrid(format!("points per axis M = {points} must be even and >= 8")));
        }
        let len = points.pow(dim as u32);
        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(points);
        let fft_inverse = planner.plan_fft_inverse(points);

        let axis_xi: Vec<f64> = (0..points)
            .map(|i| axis_frequency_of(i, points, half_length))
            .collect();
        let mut xi_sq = vec![0.0; len];
        let mut parity = vec![0.0; len];
        let mut key = vec![0u64; len];
        let mut idx = vec![0usize; dim];
        for flat in 0..len {
            unflatten_into(flat, points, &mut idx);
            let mut s = 0.0;
            let mut odd = 0usize;
            let mut k2 = 0u64;
            for &i in &idx {
                s += axis_xi[i] * axis_xi[i];
                odd += i;
                let k = i.min(points - i) as u64;
                k2 += k * k;
            }
            xi_sq[flat] = s;
            key[flat] = k2;
            parity[flat] = if odd % 2 == 0 { 1.0 } else { -1.0 };
        }
        let mut keys = key.clone();
        keys.sort_unstable();
        keys.dedup();
        let shell_of = key
            .iter()
            .map(|k| keys.binary_search(k).expect("key present") as u32)
            .collect();
        let shell_xi_sq = keys
            .iter()
            .map(|&k| k as f64 / (4.0 * half_length * half_length))
            .collect();
        let symbol = xi_sq.iter().map(|&q| (1.0 + FOUR_PI_SQ * q).powf(alpha)).collect();

        Ok(Grid {
            inner: Arc::new(GridInner {
                dim,
                alpha,
                half_length,
                points,
                len,
                fft_forward,
                fft_inverse,
                xi_sq,
                symbol,
                parity,
                shell_xi_sq,
                shell_of,
            }),
        })
    }

    /// Same geometry, different fractional order.
    pub fn with_alpha(&self, alpha: f64) -> Result<Grid, SpectralError> {
        Grid::new(self.dim(), alpha, self.half_length(), self.points())
    }

    /// Same box, different resolution.
    pub fn with_points(&self, points: usize) -> Result<Grid, SpectralError> {
        Grid::new(self.dim(), self.alpha(), self.half_length(), points)
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    pub fn half_length(&self) -> f64 {
        self.inner.half_length
    }

    pub fn points(&self) -> usize {
        self.inner.points
    }

    /// Total number of samples, `M^N`.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.inner.half_length / self.inner.points as f64
    }

    /// `h^N`, the quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.inner.dim as i32)
    }

    /// `(2L)^N`, the Parseval weight of the coefficient sums.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.inner.half_length).powi(self.inner.dim as i32)
    }

    /// Outside the paper regime: `alpha = 1` or `N = 1`.
    pub fn limit_mode(&self) -> bool {
        self.inner.alpha == 1.0 || self.inner.dim == 1
    }

    /// `2N / (N - 2α)`, or infinity when `N <= 2α`.
    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.inner.dim, self.inner.alpha)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.inner.half_length + i as f64 * self.spacing()
    }

    /// Physical coordinates of the flat sample index `flat`.
    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let m = self.inner.points;
        let mut rest = flat;
        for d in (0..self.inner.dim).rev() {
            out[d] = self.coordinate(rest % m);
            rest /= m;
        }
    }

    /// Multi-index of the flat sample or coefficient index `flat`.
    pub fn unflatten(&self, flat: usize, out: &mut [usize]) {
        unflatten_into(flat, self.inner.points, out)
    }

    /// Frequency of FFT index `i` on one axis (Nyquist taken positive).
    pub fn axis_frequency(&self, i: usize) -> f64 {
        axis_frequency_of(i, self.inner.points, self.inner.half_length)
    }

    /// Signed lattice integer of FFT index `i` on one axis, in `[-M/2, M/2)`.
    pub fn signed_index(&self, i: usize) -> i64 {
        let m = self.inner.points as i64;
        let i = i as i64;
        if i < m / 2 {
            i
        } else {
            i - m
        }
    }

    /// `|ξ|²` per flat coefficient index.
    pub fn xi_sq(&self) -> &[f64] {
        &self.inner.xi_sq
    }

    /// `(1 + 4π²|ξ|²)^α` per flat coefficient index.
    pub fn symbol(&self) -> &[f64] {
        &self.inner.symbol
    }

    /// Distinct values of `|ξ|²`, ascending.
    pub fn shell_xi_sq(&self) -> &[f64] {
        &self.inner.shell_xi_sq
    }

    /// Index into [`Grid::shell_xi_sq`] per flat coefficient index.
    pub fn shell_of(&self) -> &[u32] {
        &self.inner.shell_of
    }

    /// `(-1)^(i_1 + ... + i_N)`: the phase that moves the DFT origin to `x = 0`.
    pub(crate) fn parity(&self) -> &[f64] {
        &self.inner.parity
    }

    pub(crate) fn fft(&self, inverse: bool) -> &Arc<dyn Fft<f64>> {
        if inverse {
            &self.inner.fft_inverse
        } else {
            &self.inner.fft_forward
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self == other
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.alpha() == other.alpha()
            && self.half_length() == other.half_length()
            && self.points() == other.points()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim())
            .field("alpha", &self.alpha())
            .field("half_length", &self.half_length())
            .field("points", &self.points())
            .finish()
    }
}

pub fn critical_exponent(dim: usize, alpha: f64) -> f64 {
    let n = dim as f64;
    if n <= 2.0 * alpha {
        f64::INFINITY
    } else {
        2.0 * n / (n - 2.0 * alpha)
    }
}

fn axis_frequency_of(i: usize, m: usize, half_length: f64) -> f64 {
    let k = if i <= m / 2 { i as f64 } else { i as f64 - m as f64 };
    k / (2.0 * half_length)
}

fn unflatten_into(flat: usize, m: usize, out: &mut [usize]) {
    let mut rest = flat;
    for d in (0..out.len()).rev() {
        out[d] = rest % m;
        rest /= m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(0, 0.5, 1.0, 16).is_err());
        assert!(Grid::new(4, 0.5, 1.0, 16).is_err());
        assert!(Grid::new(2, 0.0, 1.0, 16).is_err());
        assert!(Grid::new(2, 1.5, 1.0, 16).is_err());
        assert!(Grid::new(2, 0.5, -1.0, 16).is_err());
        assert!(Grid::new(2, 0.5, 1.0, 15).is_err());
        assert!(Grid::new(2, 0.5, 1.0, 6).is_err());
    }

    #[test]
    fn geometry_is_consistent() {
        let g = Grid::new(2, 0.75, 5.0, 16).unwrap();
        assert_eq!(g.len(), 256);
        assert!((g.spacing() * 16.0 - 10.0).abs() < 1e-15);
        assert_eq!(g.coordinate(8), 0.0);
        assert!(!g.limit_mode());
        assert!(Grid::new(1, 0.5, 5.0, 16).unwrap().limit_mode());
        assert!(Grid::new(2, 1.0, 5.0, 16).unwrap().limit_mode());
    }

    #[test]
    fn lattice_is_symmetric_except_nyquist() {
        let g = Grid::new(1, 0.5, 3.0, 12).unwrap();
        for i in 1..6 {
            assert_eq!(g.axis_frequency(i), -g.axis_frequency(12 - i));
        }
        assert!(g.axis_frequency(6) > 0.0);
        assert_eq!(g.signed_index(6), -6);
        assert_eq!(g.signed_index(11), -1);
    }

    #[test]
    fn critical_exponent_values() {
        assert!((critical_exponent(2, 0.75) - 8.0).abs() < 1e-14);
        assert!(critical_exponent(1, 1.0).is_infinite());
    }
}
