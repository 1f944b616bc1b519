//! Periodic-box discretization: grids, fields, transforms, multipliers and dilation.

mod dilate;
mod field;
mod grid;
mod io;
mod ops;
mod sample;
mod transform;

use thiserror::Error;

pub use dilate::{dilate_field, dilate_field_with, escape_mass, resample_affine, DilationGuard};
pub use field::{RealField, SpectralField};
pub use grid::{critical_exponent, Grid, FOUR_PI_SQ};
pub use io::{read_fgs1, write_fgs1, FGS1_MAGIC};
pub use ops::{
    apply_fractional_op, apply_inverse_fractional_op, apply_multiplier, apply_symbol, bessel_base,
    boundary_mass, norm_alpha, norm_alpha_sq, shell_power, shell_sum, resolvent_solve, resolvent_symbol, weighted_coefficient_sum,
};
pub use sample::{gaussian_bump, random_smooth_field};
pub use transform::{to_physical, to_spectral, IMAG_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    NonHermitianInput { residue: f64, tolerance: f64 },
    #[error("multiplier is not finite at coefficient {0}")]
    NonFiniteMultiplier(usize),
    #[error("dilation by t = {t} moves mass {mass:e} out of the safe region")]
    SupportEscapesBox { t: f64, mass: f64 },
    #[error("dilation factor {t} outside [{min}, {max}]")]
    DilationOutOfRange { t: f64, min: f64, max: f64 },
    #[error("delta0 = {0} not in (0, 1)")]
    BadDelta(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("snapshot: {0}")]
    Snapshot(String),
}
