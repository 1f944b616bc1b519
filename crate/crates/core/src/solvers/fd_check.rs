use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SolverError;
use crate::functionals::{augmented_I, dtheta_I, energy_I, energy_J, grad_I, grad_J};
use crate::model::{AutonomousNonlinearity, SpatialNonlinearity};
use crate::spectral::{random_smooth_field, RealField};

#[derive(Clone, Copy)]
pub enum FdFunctional<'a> {
    /// `I` in the direction of random fields.
    I(&'a AutonomousNonlinearity),
    /// `θ ↦ Ĩ(θ, u)` at the given `θ`.
    AugmentedTheta(&'a AutonomousNonlinearity, f64),
    /// `J` in the direction of random fields.
    J(&'a SpatialNonlinearity),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdReport {
    /// `max |analytic - central difference| / (1 + |value|)`.
    pub max_mismatch: f64,
    pub directions: usize,
    pub eps: f64,
    pub seed: u64,
    pub value: f64,
}

/// Compares analytic directional derivatives with central differences.
pub fn gradient_fd_check(
    u: &RealField,
    functional: FdFunctional<'_>,
    directions: usize,
    eps: f64,
    seed: u64,
) -> Result<FdReport, SolverError> {
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(SolverError::BadConfig(format!("eps {eps} outside [1e-7, 1e-3]")));
    }
    let grid = u.grid();
    let (value, max_mismatch, directions) = match functional {
        FdFunctional::AugmentedTheta(f, theta) => {
            let value = augmented_I(theta, u, f);
            let fd = (augmented_I(theta + eps, u, f) - augmented_I(theta - eps, u, f)) / (2.0 * eps);
            let analytic = dtheta_I(theta, u, f);
            (value, (analytic - fd).abs() / (1.0 + value.abs()), 1)
        }
        FdFunctional::I(_) | FdFunctional::J(_) => {
            let eval = |v: &RealField| match functional {
                FdFunctional::I(f) => energy_I(v, f).total,
                FdFunctional::J(sp) => energy_J(v, sp).total,
                FdFunctional::AugmentedTheta(..) => unreachable!(),
            };
            let grad = match functional {
                FdFunctional::I(f) => grad_I(u, f, false)?,
                FdFunctional::J(sp) => grad_J(u, sp, false)?,
                FdFunctional::AugmentedTheta(..) => unreachable!(),
            };
            let value = eval(u);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..directions {
                let phi = random_smooth_field(grid, &mut rng, true);
                let phi = phi.scaled(1.0 / phi.max_abs().max(f64::MIN_POSITIVE));
                let fd = (eval(&u.axpy(eps, &phi)?) - eval(&u.axpy(-eps, &phi)?)) / (2.0 * eps);
                let analytic = grad.inner(&phi)?;
                worst = worst.max((analytic - fd).abs() / (1.0 + value.abs()));
            }
            (value, worst, directions)
        }
    };
    Ok(FdReport {
        max_mismatch,
        directions,
        eps,
        seed,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gaussian_bump_spec, make_spatial_problem, ValidationLattice};
    use crate::spectral::{gaussian_bump, Grid};

    fn grid() -> Grid {
        Grid::new(1, 0.7, 12.0, 128).unwrap()
    }

    #[test]
    fn energy_gradient_matches_differences() {
        let g = grid();
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        let u = gaussian_bump(&g, &[0.3], 1.2, 1.4);
        let r = gradient_fd_check(&u, FdFunctional::I(&f), 10, 1e-5, 3).unwrap();
        assert!(r.max_mismatch < 1e-6, "{r:?}");
    }

    #[test]
    fn theta_derivative_matches_differences() {
        let g = Grid::new(2, 0.6, 10.0, 32).unwrap();
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        let u = gaussian_bump(&g, &[0.0, 0.5], 1.5, 1.0);
        let r = gradient_fd_check(&u, FdFunctional::AugmentedTheta(&f, 0.2), 1, 1e-5, 0).unwrap();
        assert!(r.max_mismatch < 1e-7, "{r:?}");
    }

    #[test]
    fn spatial_gradient_matches_differences() {
        let g = grid();
        let sp = make_spatial_problem(gaussian_bump_spec(0.5, 0.3, 1.0, 3.0).unwrap(), &ValidationLattice::new(1)).unwrap();
        let u = gaussian_bump(&g, &[-0.4], 1.0, 1.1);
        let r = gradient_fd_check(&u, FdFunctional::J(&sp), 6, 1e-5, 9).unwrap();
        assert!(r.max_mismatch < 1e-6, "{r:?}");
    }

    #[test]
    fn zero_field_has_zero_derivatives() {
        let g = grid();
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        let u = RealField::zeros(&g);
        let r = gradient_fd_check(&u, FdFunctional::I(&f), 4, 1e-4, 1).unwrap();
        assert!(r.max_mismatch < 1e-12 * (1.0 + 1.0), "{r:?}");
        assert!(gradient_fd_check(&u, FdFunctional::I(&f), 1, 1.0, 1).is_err());
    }
}
