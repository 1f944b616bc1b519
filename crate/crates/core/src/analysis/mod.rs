//! Bessel-potential and resolvent kernels, comparison and rectification
//! checks, decay and symmetry diagnostics.

mod checks;
mod diagnostics;
mod kernel;
mod quadrature;

use thiserror::Error;

use crate::spectral::SpectralError;

pub use checks::{abs_inequality_check, comparison_check, ComparisonReport, RectificationReport, COMPARISON_TOL, RECTIFICATION_TOL};
pub use diagnostics::{decay_diagnostic, line_fit, radial_profile, symmetry_diagnostic, DecayReport, LineFit, SymmetryReport};
pub use kernel::{
    bessel_cell_averages, bessel_fourier_check, bessel_kernel, bessel_kernel_value, kernel_l1_mass, resolvent_kernel,
    small_r_slope, sphere_area, tail_fit, FourierCheck, KernelKind, KernelTable, ResolventKernel, TailFit, KERNEL_TOL,
};
pub use quadrature::adaptive_simpson;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("adaptive quadrature exceeded its budget after {evaluations} evaluations")]
    QuadratureFailure { evaluations: usize },
    #[error("delta0 = {0} not in (0, 1)")]
    BadDelta(f64),
    #[error("field does not decay: smallest shell average {floor} against peak {peak}")]
    InsufficientDecay { floor: f64, peak: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
