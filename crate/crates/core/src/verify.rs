//! Sampled check of the algebraic identities the classification rests on.
//!
//! Each identity is evaluated both ways (closed form and direct computation)
//! and reported as a maximum relative error against a tolerance. Quantities
//! that vanish on a curve are measured against the magnitude of the terms
//! that cancel, not against the result itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classification::separatrix_q1;
use crate::cubic::{
    cubic_discriminant, cubic_discriminant_expanded, cubic_roots, epsilon_hat, p_coefficients,
    p_eval, reduced_discriminant,
};
use crate::equilibria::{q_of_vplus, v_plus_squared};
use crate::error::Result;
use crate::model::{
    b_sharp, det_b_sharp_closed_form, kinematics, lin_matrix, trace_adj_closed_form, GodunovState,
    Kinematics,
};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Relative tolerance of the sampled matrix identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// `|P|` below this is treated as zero when comparing signs.
pub const SIGN_BAND: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub samples: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A random state with `v^2` in `(0, 2)` and `theta` in `(1/4, 4)`, and a
/// dissipation value in `(0, 1]`.
pub fn sample_state(rng: &mut impl Rng) -> (GodunovState, Kinematics, f64) {
    let v2: f64 = rng.gen_range(f64::MIN_POSITIVE..2.0);
    let v = if rng.gen_bool(0.5) {
        v2.sqrt()
    } else {
        -v2.sqrt()
    };
    let theta = 4f64.powf(rng.gen_range(-1.0..1.0));
    let kin = Kinematics::from_velocity(v);
    let psi = GodunovState {
        psi0: kin.u / theta,
        psi1: v / theta,
    };
    let eps = 1.0 - rng.gen_range(0.0..1.0);
    (psi, Kinematics { theta, ..kin }, eps)
}

struct Acc {
    name: &'static str,
    tolerance: f64,
    samples: usize,
    max: f64,
}

impl Acc {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Acc {
            name,
            tolerance,
            samples: 0,
            max: 0.0,
        }
    }

    fn push(&mut self, got: f64, want: f64, scale: f64) {
        self.samples += 1;
        let err = (got - want).abs() / scale.max(f64::MIN_POSITIVE);
        // NaN must fail the check, not vanish in max().
        self.max = if err.is_nan() {
            f64::INFINITY
        } else {
            self.max.max(err)
        };
    }

    fn finish(self) -> IdentityCheck {
        IdentityCheck {
            name: self.name,
            samples: self.samples,
            max_rel_error: self.max,
            tolerance: self.tolerance,
        }
    }
}

/// Sampled matrix identities: `det B#`, `det A`, `trace(adj(B#) A)` and the
/// sign agreement between the spectral discriminant and `P(v^2, eps)`.
pub fn matrix_identities(samples: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut det_b = Acc::new("det B# closed form", IDENTITY_TOL);
    let mut det_a = Acc::new("det A = 2v^2 - 1", IDENTITY_TOL);
    let mut trace = Acc::new("trace(adj(B#) A) closed form", IDENTITY_TOL);
    // Reported as the fraction of sign disagreements.
    let mut sign = Acc::new("sign(D) = sign(P(v^2, eps))", 0.0);

    for _ in 0..samples {
        let (psi, _, eps) = sample_state(&mut rng);
        let kin = kinematics(&psi)?;
        let v = kin.v;
        let bs = b_sharp(&kin, eps)?;
        let a = lin_matrix(&kin);
        det_b.push(bs.det(), det_b_sharp_closed_form(v, eps), bs.det_scale());
        det_a.push(a.det(), 2.0 * v * v - 1.0, a.det_scale());

        let adj = bs.adj();
        let t = adj.0[0][0] * a.0[0][0]
            + adj.0[0][1] * a.0[1][0]
            + adj.0[1][0] * a.0[0][1]
            + adj.0[1][1] * a.0[1][1];
        let t_scale = (adj.0[0][0] * a.0[0][0]).abs()
            + (adj.0[0][1] * a.0[1][0]).abs()
            + (adj.0[1][0] * a.0[0][1]).abs()
            + (adj.0[1][1] * a.0[1][1]).abs();
        trace.push(t, trace_adj_closed_form(v, eps), t_scale);

        // D det(B#)^2 = trace(adj(B#) A)^2 - 4 det(B#) det(A), so the signs agree.
        let p = p_eval(v * v, eps);
        if p.abs() > SIGN_BAND {
            let d = t * t - 4.0 * bs.det() * a.det();
            sign.samples += 1;
            if (d > 0.0) != (p > 0.0) {
                sign.max += 1.0;
            }
        }
    }
    if sign.samples > 0 {
        sign.max /= sign.samples as f64;
    }
    Ok(vec![
        det_b.finish(),
        det_a.finish(),
        trace.finish(),
        sign.finish(),
    ])
}

/// Identities of the cubic and the separatrices at fixed points.
pub fn cubic_identities() -> Result<Vec<IdentityCheck>> {
    let mut half = Acc::new("P(1/2, eps) = (9/8) eps^2 (eps - 4)^2", 1e-12);
    let mut third = Acc::new(
        "P(1/3, eps) = (16/27)(eps - 1)^2 (eps^2 - 4 eps + 1)",
        1e-12,
    );
    let mut disc = Acc::new("discriminant = 1296 eps^5 (4 - eps)^3 D(eps), D > 0", 1e-12);
    for i in 1..=1000 {
        let e = i as f64 / 1000.0;
        let scale: f64 = p_coefficients(e)?.iter().map(|a| a.abs()).sum();
        half.push(p_eval(0.5, e), 9.0 / 8.0 * e * e * (e - 4.0).powi(2), scale);
        third.push(
            p_eval(1.0 / 3.0, e),
            16.0 / 27.0 * (e - 1.0).powi(2) * (e * e - 4.0 * e + 1.0),
            scale,
        );
        let [d, c, b, a] = p_coefficients(e)?;
        let terms = (18.0 * a * b * c * d).abs()
            + (4.0 * b.powi(3) * d).abs()
            + (b * b * c * c).abs()
            + (4.0 * a * c.powi(3)).abs()
            + (27.0 * a * a * d * d).abs();
        disc.push(cubic_discriminant_expanded(e), cubic_discriminant(e), terms);
        if !(reduced_discriminant(e) > 0.0) {
            disc.max = f64::INFINITY;
        }
    }

    let eh = epsilon_hat();
    let mut hat = Acc::new("P(1/8, eps_hat) = 0", 1e-10);
    hat.push(p_eval(0.125, eh), 0.0, 1.0);
    let mut sharp = Acc::new("P(1/3, 2 - sqrt 3) = 0", 1e-10);
    sharp.push(p_eval(1.0 / 3.0, 2.0 - 3f64.sqrt()), 0.0, 1.0);

    let mut triple = Acc::new("roots at eps = 1 are (-1, 0, 1/3)", 1e-12);
    let r = cubic_roots(1.0)?;
    for (got, want) in r.as_array().into_iter().zip([-1.0, 0.0, 1.0 / 3.0]) {
        triple.push(got, want, 1.0);
    }
    let mut q1 = Acc::new("q1(1) = 49/64", 1e-12);
    q1.push(separatrix_q1(1.0)?, 49.0 / 64.0, 1.0);

    let mut round = Acc::new("v_plus^2(q(z)) = z on (1/8, 1/2)", 1e-10);
    for i in 1..1000 {
        let z = 0.125 + 0.375 * i as f64 / 1000.0;
        round.push(v_plus_squared(q_of_vplus(z)?)?, z, z);
    }

    Ok(vec![
        half.finish(),
        third.finish(),
        hat.finish(),
        sharp.finish(),
        disc.finish(),
        triple.finish(),
        q1.finish(),
        round.finish(),
    ])
}

/// The full suite with `samples` random states drawn from `seed`.
pub fn run_identity_suite(samples: usize, seed: u64) -> Result<VerifyReport> {
    let mut checks = matrix_identities(samples, seed)?;
    checks.extend(cubic_identities()?);
    Ok(VerifyReport { seed, checks })
}
