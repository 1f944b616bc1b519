use num_complex::Complex64;

use super::{Grid, RealField, SpectralError, SpectralField};

/// Relative size of the imaginary residue that `to_physical` silently drops.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// In-place N-dimensional FFT (unnormalized), one axis at a time.
pub(crate) fn fft_nd(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let m = grid.points();
    let dim = grid.dim();
    let fft = grid.fft(inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..dim {
        let stride = m.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(m) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = m * stride;
        for outer in 0..data.len() / block {
            for inner in 0..stride {
                let start = outer * block + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}

/// Coefficients of the trigonometric interpolant,
/// `c_k = M^{-N} Σ_j u_j exp(-2πi ξ_k · x_j)`.
pub fn to_spectral(u: &RealField) -> SpectralField {
    let grid = u.grid();
    let mut data: Vec<Complex64> = u.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(grid, &mut data, false);
    let scale = 1.0 / grid.len() as f64;
    for (c, p) in data.iter_mut().zip(grid.parity()) {
        *c *= p * scale;
    }
    SpectralField::from_vec_unchecked(grid, data)
}

/// Samples of the interpolant with coefficients `coeffs`.
///
/// Fails with [`SpectralError::NonHermitianInput`] when the imaginary part of
/// the result exceeds `1e-10` times its largest modulus.
pub fn to_physical(coeffs: &SpectralField) -> Result<RealField, SpectralError> {
    let grid = coeffs.grid();
    let mut data: Vec<Complex64> = coeffs
        .coeffs()
        .iter()
        .zip(grid.parity())
        .map(|(c, p)| c * p)
        .collect();
    fft_nd(grid, &mut data, true);
    let (mut residue, mut size) = (0.0f64, 0.0f64);
    for z in &data {
        residue = residue.max(z.im.abs());
        size = size.max(z.norm());
    }
    let tolerance = IMAG_TOLERANCE * size;
    if residue > tolerance {
        return Err(SpectralError::NonHermitianInput { residue, tolerance });
    }
    RealField::new(grid, data.into_iter().map(|z| z.re).collect())
}
