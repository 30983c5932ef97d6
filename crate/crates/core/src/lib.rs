//! Dissipative relativistic shock profiles for a scalar-field fluid model.
//!
//! The crate provides the state algebra of the model, the two rest points of a
//! shock, the classification of the downstream rest point in the
//! `(eps, q_tilde)` parameter plane, and a shooting method that integrates the
//! heteroclinic profile between them.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classification;
pub mod cubic;
pub mod equilibria;
pub mod error;
pub mod integrator;
pub mod mat2;
pub mod model;
pub mod oscillation;
pub mod profile;
pub mod scan;
pub mod verify;

pub use classification::{
    classify, classify_detailed, in_omega, separatrix_q1, separatrix_q2, Classification,
    RegionLabel,
};
pub use cubic::{cubic_roots, epsilon_hat, CubicRoots};
pub use equilibria::{rest_points, EquilibriumPair, ShockParams};
pub use error::{Error, Result};
pub use model::{causality_check, CausalityClass, CausalityVerdict, GodunovState, Kinematics};
pub use oscillation::{CoordinateSystem, OscillationReport};
pub use profile::{shoot, ProfileResult, ProfileSample, ShootOptions, Verdict};
