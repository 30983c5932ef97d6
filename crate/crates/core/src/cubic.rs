//! The cubic `P(z, eps) = a3 z^3 + a2 z^2 + a1 z + a0` whose sign at
//! `z = v^2` decides between real and complex spectra, and its three real
//! roots `w1 < w2 <= w3`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Coefficients `[a0, a1, a2, a3]` of `P(., eps)`.
pub fn p_coefficients(eps: f64) -> Result<[f64; 4]> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    Ok(coefficients(eps))
}

fn coefficients(e: f64) -> [f64; 4] {
    let a0 = e * ((4.0 * e - 20.0) * e + 16.0);
    let a1 = (((e - 16.0) * e + 84.0) * e - 112.0) * e + 16.0;
    let a2 = (((2.0 * e - 20.0) * e - 24.0) * e + 160.0) * e - 64.0;
    let a3 = (e * e + 16.0) * e * e + 64.0;
    [a0, a1, a2, a3]
}

/// `P(z, eps)` by nested multiplication.
pub fn p_eval(z: f64, eps: f64) -> f64 {
    let [a0, a1, a2, a3] = coefficients(eps);
    ((a3 * z + a2) * z + a1) * z + a0
}

/// `dP/dz`.
pub fn p_derivative(z: f64, eps: f64) -> f64 {
    let [_, a1, a2, a3] = coefficients(eps);
    (3.0 * a3 * z + 2.0 * a2) * z + a1
}

/// The dissipation value at which the middle root crosses `1/8`:
/// `(2/3)(3 sqrt 6 - 2 sqrt(16 - 6 sqrt 6) - 4)`.
pub fn epsilon_hat() -> f64 {
    let s6 = 6f64.sqrt();
    (2.0 / 3.0) * (3.0 * s6 - 2.0 * (16.0 - 6.0 * s6).sqrt() - 4.0)
}

/// Quintic factor `-4e^5 + 179e^4 - 844e^3 + 880e^2 - 32e + 64` of the cubic's discriminant.
pub fn reduced_discriminant(e: f64) -> f64 {
    ((((-4.0 * e + 179.0) * e - 844.0) * e + 880.0) * e - 32.0) * e + 64.0
}

/// Discriminant of `P(., eps)` in factored form `1296 eps^5 (4 - eps)^3 D(eps)`.
pub fn cubic_discriminant(eps: f64) -> f64 {
    1296.0 * eps.powi(5) * (4.0 - eps).powi(3) * reduced_discriminant(eps)
}

/// Discriminant `18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2` from raw coefficients.
pub fn cubic_discriminant_expanded(eps: f64) -> f64 {
    discriminant_terms(eps).iter().sum()
}

fn discriminant_terms(eps: f64) -> [f64; 5] {
    let [d, c, b, a] = coefficients(eps);
    [
        18.0 * a * b * c * d,
        -4.0 * b.powi(3) * d,
        b * b * c * c,
        -4.0 * a * c.powi(3),
        -27.0 * a * a * d * d,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub eps: f64,
}

impl CubicRoots {
    pub fn as_array(&self) -> [f64; 3] {
        [self.w1, self.w2, self.w3]
    }

    /// `P(z, eps)` in factored form `a3 (z - w1)(z - w2)(z - w3)`. Unlike the
    /// expanded form its sign is reliable next to the nearly double pair.
    pub fn eval(&self, z: f64) -> f64 {
        coefficients(self.eps)[3] * (z - self.w1) * (z - self.w2) * (z - self.w3)
    }

    pub fn max_residual(&self) -> f64 {
        self.as_array()
            .iter()
            .map(|&w| p_eval(w, self.eps).abs())
            .fold(0.0, f64::max)
    }
}

/// Real roots of a cubic with three real roots by the trigonometric method, ascending.
pub fn trig_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> [f64; 3] {
    let b = a2 / a3;
    let c = a1 / a3;
    let d = a0 / a3;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    if p >= 0.0 {
        // Triple root (p = q = 0) is the only three-real-root case here.
        return [shift; 3];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut r = [0.0; 3];
    for (k, slot) in r.iter_mut().enumerate() {
        *slot = m * (phi - 2.0 * PI * k as f64 / 3.0).cos() + shift;
    }
    r.sort_by(f64::total_cmp);
    r
}

fn newton_polish(mut z: f64, eps: f64, max_step: f64) -> f64 {
    for _ in 0..2 {
        let f = p_eval(z, eps);
        let df = p_derivative(z, eps);
        if f == 0.0 || df == 0.0 {
            break;
        }
        let step = f / df;
        if step.abs() > max_step {
            break;
        }
        let next = z - step;
        if p_eval(next, eps).abs() >= f.abs() {
            break;
        }
        z = next;
    }
    z
}

/// Residual bound accepted after polishing.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// The three real roots of `P(., eps)` for `0 < eps <= 1`.
///
/// Initial values come from the trigonometric formula. The isolated root `w1`
/// is then polished, and the upper pair is rebuilt from its midpoint
/// `(-a2/a3 - w1) / 2` and gap `sqrt(Disc) / (a3 |P'(w1)|)`. Near `eps = 0` the
/// pair is almost a double root, so neither the trigonometric values nor
/// Newton steps on `P` resolve the gap.
pub fn cubic_roots(eps: f64) -> Result<CubicRoots> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let [a0, a1, a2, a3] = coefficients(eps);
    let [t1, t2, _] = trig_roots(a3, a2, a1, a0);

    let w1 = newton_polish(t1, eps, 0.5 * (t2 - t1).abs().max(f64::EPSILON));
    let disc = cubic_discriminant(eps).max(0.0);
    let mid = 0.5 * (-a2 / a3 - w1);
    let half_gap = 0.5 * disc.sqrt() / (a3 * p_derivative(w1, eps).abs());
    // Both inputs are well conditioned, so the pair needs no polishing; Newton
    // on the nearly flat P would only add rounding noise near eps = 0.
    let w2 = mid - half_gap;
    let w3 = mid + half_gap;

    let roots = CubicRoots { w1, w2, w3, eps };
    let residual = roots.max_residual();
    if !(residual <= ROOT_RESIDUAL_TOL * a3.max(1.0)) || !(w1 < w2 && w2 <= w3) {
        return Err(Error::RootFindingFailure { eps, residual });
    }
    Ok(roots)
}
