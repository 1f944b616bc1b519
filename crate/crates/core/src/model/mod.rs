//! Nonlinearities, sampled structural checks and the comparison envelope.

mod envelope;
mod nonlinearity;
mod spatial;

use thiserror::Error;

pub use envelope::{build_envelope, Envelope, DEFAULT_RESOLUTION};
pub use nonlinearity::{
    check_bl_conditions, check_bl_conditions_up_to, pick_small_s_constants, small_s_bound_holds,
    AutonomousNonlinearity, BlReport, Descriptor, SmallSConstants, DEFAULT_S_MAX, DELTA_LADDER, S1_LADDER,
};
pub use spatial::{
    autonomous_spec, gaussian_bump_spec, make_spatial_problem, SpatialNonlinearity, SpatialReport, SpatialSpec,
    ValidationLattice,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("no admissible (delta0, s1) on the candidate ladder")]
    NoAdmissibleConstants,
    #[error("p0 = {p0} not in (1, {upper})")]
    BadExponent { p0: f64, upper: f64 },
    #[error("V = {value} <= -1 at x = {x:?}")]
    PotentialBelowMinusOne { x: Vec<f64>, value: f64 },
    #[error("mu G = {mu_g} exceeds g s = {gs} at x = {x:?}, s = {s}")]
    ARConditionViolated { x: Vec<f64>, s: f64, mu_g: f64, gs: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bad table: {0}")]
    BadTable(String),
}
