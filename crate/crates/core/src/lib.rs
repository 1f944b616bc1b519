//! Pseudospectral ground states for `(1 - Δ)^α u = f(u)` on a periodic box.

pub mod spectral;
pub mod model;
pub mod functionals;
pub mod solvers;
pub mod analysis;
