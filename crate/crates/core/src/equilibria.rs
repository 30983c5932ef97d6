//! Rest points of the profile system for the normalised flux `q1 = 1`,
//! `q0 = q_tilde^(-1/2) > 0`. Both rest points are taken on the right-moving
//! branch `v > 0`; the left-moving family is its mirror image under
//! `(q0, psi1) -> (-q0, -psi1)`.

use crate::error::{Error, Result};
use crate::model::{flux_residual, GodunovState};

/// Distance from `q_tilde = 3/4` below which the two rest points are treated as coalesced.
pub const DEGENERATE_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockParams {
    pub q_tilde: f64,
    pub q0: f64,
    pub q1: f64,
}

impl ShockParams {
    pub fn new(q_tilde: f64) -> Result<Self> {
        check_q(q_tilde)?;
        Ok(ShockParams {
            q_tilde,
            q0: 1.0 / q_tilde.sqrt(),
            q1: 1.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPair {
    /// Upstream state (saddle).
    pub psi_minus: GodunovState,
    /// Downstream state (attractor).
    pub psi_plus: GodunovState,
    pub v_minus_sq: f64,
    pub v_plus_sq: f64,
}

impl EquilibriumPair {
    /// Shock amplitude `|psi_minus - psi_plus|`.
    pub fn separation(&self) -> f64 {
        self.psi_minus.distance(&self.psi_plus)
    }
}

fn check_q(q_tilde: f64) -> Result<()> {
    if q_tilde > 0.75 && q_tilde < 1.0 {
        Ok(())
    } else {
        Err(Error::QOutOfRange(q_tilde))
    }
}

fn sqrt_q_term(q: f64) -> f64 {
    (q * (4.0 * q - 3.0)).sqrt()
}

/// `v_+^2 = ((2q-1) - sqrt(q(4q-3))) / (4(1-q))`, evaluated in the
/// rationalised form `1 / (4 ((2q-1) + sqrt(q(4q-3))))`.
pub fn v_plus_squared(q_tilde: f64) -> Result<f64> {
    check_q(q_tilde)?;
    Ok(0.25 / ((2.0 * q_tilde - 1.0) + sqrt_q_term(q_tilde)))
}

/// `v_-^2 = ((2q-1) + sqrt(q(4q-3))) / (4(1-q))`.
pub fn v_minus_squared(q_tilde: f64) -> Result<f64> {
    check_q(q_tilde)?;
    Ok(((2.0 * q_tilde - 1.0) + sqrt_q_term(q_tilde)) / (4.0 * (1.0 - q_tilde)))
}

/// `((4/3) v^2 + 1/3)^(1/4) (sqrt(1 + v^2), v)`: the state with velocity `v`
/// on which the second flux component vanishes for `q1 = 1`.
pub fn state_from_v(v: f64) -> GodunovState {
    let pref = ((4.0 / 3.0) * v * v + 1.0 / 3.0).powf(0.25);
    GodunovState {
        psi0: pref * (1.0 + v * v).sqrt(),
        psi1: pref * v,
    }
}

pub fn rest_points(q_tilde: f64) -> Result<EquilibriumPair> {
    check_q(q_tilde)?;
    if q_tilde - 0.75 < DEGENERATE_BAND {
        return Err(Error::DegenerateShock(q_tilde));
    }
    let v_plus_sq = v_plus_squared(q_tilde)?;
    let v_minus_sq = v_minus_squared(q_tilde)?;
    Ok(EquilibriumPair {
        psi_minus: state_from_v(v_minus_sq.sqrt()),
        psi_plus: state_from_v(v_plus_sq.sqrt()),
        v_minus_sq,
        v_plus_sq,
    })
}

/// Inverse of `v_plus_squared` on `(1/8, 1/2)`:
/// `q = (4z+1)^2 / (16 z (1+z)) = 3/4 + (2z-1)^2 / (16 z (1+z))`.
pub fn q_of_vplus(z: f64) -> Result<f64> {
    if !(z > 0.125 && z < 0.5) {
        return Err(Error::ZOutOfRange(z));
    }
    let d = 2.0 * z - 1.0;
    Ok(0.75 + d * d / (16.0 * z * (1.0 + z)))
}

/// Whether `(q0, q1)` admits two rest points (right- or left-moving).
pub fn admissible(q0: f64, q1: f64) -> bool {
    if !(q1 > 0.0) || !q0.is_finite() {
        return false;
    }
    let q_tilde = (q1 / q0).powi(2);
    q_tilde > 0.75 && q_tilde < 1.0
}

/// Largest flux-residual component at both rest points.
pub fn max_rest_residual(q_tilde: f64) -> Result<f64> {
    let pair = rest_points(q_tilde)?;
    let sp = ShockParams::new(q_tilde)?;
    let mut worst = 0.0f64;
    for psi in [pair.psi_minus, pair.psi_plus] {
        let f = flux_residual(&psi, sp.q0, sp.q1)?;
        worst = worst.max(f[0].abs()).max(f[1].abs());
    }
    Ok(worst)
}
