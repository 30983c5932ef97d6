//! Node/focus classification of the downstream rest point over the parameter
//! square `(0, 1] x (3/4, 1)`.
//!
//! `psi_plus` is a focus exactly when `P(v_+^2, eps) < 0`. Equivalently,
//! with `w1 < w2 < w3` the roots of `P(., eps)`, it is a focus between the
//! curves `q1(eps) = V^-1(w3)` and `q2(eps) = V^-1(w2)`, where `V` is the
//! decreasing map `q_tilde -> v_+^2`. The upper curve only exists for
//! `eps < eps_hat`; above it the focus region extends up to `q_tilde = 1`.

use std::fmt;

use num_complex::Complex64;

use crate::cubic::{cubic_roots, epsilon_hat};
use crate::equilibria::{q_of_vplus, rest_points, v_plus_squared};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::model::{
    b_sharp, kinematics, lin_matrix, regular_det, trace_adj_closed_form, GodunovState,
};
use crate::profile::{fd_jacobian, vector_field};

/// Half-width of the band around a separatrix where the label is the curve itself.
pub const SEPARATRIX_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    NodeBelow,
    Focus,
    NodeAbove,
    Separatrix1,
    Separatrix2,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 5] = [
        RegionLabel::NodeBelow,
        RegionLabel::Focus,
        RegionLabel::NodeAbove,
        RegionLabel::Separatrix1,
        RegionLabel::Separatrix2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::NodeBelow => "NodeBelow",
            RegionLabel::Focus => "Focus",
            RegionLabel::NodeAbove => "NodeAbove",
            RegionLabel::Separatrix1 => "Separatrix1",
            RegionLabel::Separatrix2 => "Separatrix2",
        }
    }

    pub fn is_node(&self) -> bool {
        matches!(self, RegionLabel::NodeBelow | RegionLabel::NodeAbove)
    }

    pub fn is_separatrix(&self) -> bool {
        matches!(self, RegionLabel::Separatrix1 | RegionLabel::Separatrix2)
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn in_omega(eps: f64, q_tilde: f64) -> bool {
    eps > 0.0 && eps <= 1.0 && q_tilde > 0.75 && q_tilde < 1.0
}

pub fn check_omega(eps: f64, q_tilde: f64) -> Result<()> {
    if in_omega(eps, q_tilde) {
        Ok(())
    } else {
        Err(Error::ParamsOutOfOmega { eps, q_tilde })
    }
}

/// Lower separatrix `q1(eps) = V^-1(w3(eps))`, defined on `(0, 1]`.
pub fn separatrix_q1(eps: f64) -> Result<f64> {
    let roots = cubic_roots(eps)?;
    q_of_vplus(roots.w3)
}

/// Upper separatrix `q2(eps) = V^-1(w2(eps))`, defined on `(0, eps_hat)`.
pub fn separatrix_q2(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    if eps >= epsilon_hat() {
        return Err(Error::EpsilonAboveHat(eps));
    }
    let roots = cubic_roots(eps)?;
    // w2 may round onto 1/8 right below eps_hat.
    q_of_vplus(roots.w2).map_err(|_| Error::EpsilonAboveHat(eps))
}

/// Everything `classify` computes for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub eps: f64,
    pub q_tilde: f64,
    pub label: RegionLabel,
    pub v_plus_sq: f64,
    /// `P(v_+^2, eps)`; negative exactly in the focus region.
    pub discriminant: f64,
    pub q1: f64,
    pub q2: Option<f64>,
}

pub fn classify(eps: f64, q_tilde: f64) -> Result<RegionLabel> {
    classify_detailed(eps, q_tilde).map(|c| c.label)
}

/// Classify by comparing against the separatrices and cross-check against the
/// sign of `P(v_+^2, eps)`.
pub fn classify_detailed(eps: f64, q_tilde: f64) -> Result<Classification> {
    check_omega(eps, q_tilde)?;
    let z = v_plus_squared(q_tilde)?;
    let roots = cubic_roots(eps)?;
    let disc = roots.eval(z);
    let q1 = q_of_vplus(roots.w3)?;
    let q2 = if eps < epsilon_hat() {
        q_of_vplus(roots.w2).ok()
    } else {
        None
    };

    let label = if (q_tilde - q1).abs() <= SEPARATRIX_BAND {
        RegionLabel::Separatrix1
    } else if q2.is_some_and(|q2| (q_tilde - q2).abs() <= SEPARATRIX_BAND) {
        RegionLabel::Separatrix2
    } else if q_tilde < q1 {
        RegionLabel::NodeBelow
    } else if q2.is_some_and(|q2| q_tilde > q2) {
        RegionLabel::NodeAbove
    } else {
        RegionLabel::Focus
    };

    let consistent = match label {
        RegionLabel::Focus => disc < 0.0,
        RegionLabel::NodeBelow | RegionLabel::NodeAbove => disc > 0.0,
        RegionLabel::Separatrix1 | RegionLabel::Separatrix2 => true,
    };
    if !consistent {
        return Err(Error::InternalInconsistency { eps, q_tilde });
    }
    Ok(Classification {
        eps,
        q_tilde,
        label,
        v_plus_sq: z,
        discriminant: disc,
        q1,
        q2,
    })
}

/// `B#(psi, eps)^-1 A(psi)`.
pub fn linearization(psi: &GodunovState, eps: f64) -> Result<Mat2> {
    let kin = kinematics(psi)?;
    let bs = b_sharp(&kin, eps)?;
    let det = regular_det(&kin, eps)?;
    Ok((bs.adj() * lin_matrix(&kin)).scale(1.0 / det))
}

/// Eigenvalues of `B#(psi, eps)^-1 A(psi)`, from the closed forms of its trace
/// and determinant.
///
/// For fast states the matrix entries grow like `v^4` while the determinant
/// grows like `v^2`, so eigenvalues of the assembled matrix lose the small root.
pub fn local_spectrum(psi: &GodunovState, eps: f64) -> Result<[Complex64; 2]> {
    let kin = kinematics(psi)?;
    let det_b = regular_det(&kin, eps)?;
    let v = kin.v;
    let tr = trace_adj_closed_form(v, eps) / det_b;
    let det = (2.0 * v * v - 1.0) / det_b;
    Ok(Mat2::eigenvalues_from_invariants(tr, det))
}

/// Spectra at `(psi_minus, psi_plus)` for a parameter point.
pub fn rest_point_spectra(eps: f64, q_tilde: f64) -> Result<([Complex64; 2], [Complex64; 2])> {
    check_omega(eps, q_tilde)?;
    let pair = rest_points(q_tilde)?;
    Ok((
        local_spectrum(&pair.psi_minus, eps)?,
        local_spectrum(&pair.psi_plus, eps)?,
    ))
}

/// Step of the central differences used for Jacobians of the vector field.
pub const FD_STEP: f64 = 1e-6;

/// Characteristic discriminant of the finite-difference Jacobian of
/// `B#^-1 F` at `psi_plus`. At a rest point this Jacobian is `B#^-1 DF`, so
/// its sign is an independent check of the `A`-based classification.
pub fn jacobian_discriminant(eps: f64, q_tilde: f64) -> Result<f64> {
    check_omega(eps, q_tilde)?;
    let pair = rest_points(q_tilde)?;
    let field = |x: [f64; 2]| vector_field(&GodunovState::from_array(x), eps, q_tilde);
    let jac = fd_jacobian(field, pair.psi_plus.as_array(), FD_STEP)?;
    Ok(jac.char_discriminant())
}
