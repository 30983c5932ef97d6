//! State algebra of the planar profile system.
//!
//! A state is a pair of Godunov components `psi = (psi0, psi1)` with
//! `psi0 > |psi1|`. Temperature and the two velocity components follow as
//! `theta = (psi0^2 - psi1^2)^(-1/2)`, `(u, v) = theta * (psi0, psi1)`.
//!
//! The dissipation parameter used throughout is `eps = 4 eta / (3 mu)`. With
//! this choice the sharply causal bound on `nu` turns the coefficient of the
//! second causality matrix into `9 eps / (4 - eps)` and `mu >= 4 eta / 3`
//! becomes `eps <= 1`.

use crate::error::{Error, Result};
use crate::mat2::Mat2;

/// Point of the planar state space `psi0 > |psi1|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GodunovState {
    pub psi0: f64,
    pub psi1: f64,
}

impl GodunovState {
    pub fn new(psi0: f64, psi1: f64) -> Result<Self> {
        let s = GodunovState { psi0, psi1 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.psi0.is_finite() && self.psi1.is_finite() && self.psi0 > self.psi1.abs() {
            Ok(())
        } else {
            Err(Error::StateOutsideDomain {
                psi0: self.psi0,
                psi1: self.psi1,
            })
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.psi0, self.psi1]
    }

    pub fn from_array(x: [f64; 2]) -> Self {
        GodunovState {
            psi0: x[0],
            psi1: x[1],
        }
    }

    pub fn distance(&self, other: &GodunovState) -> f64 {
        (self.psi0 - other.psi0).hypot(self.psi1 - other.psi1)
    }
}

/// Temperature and 2-velocity `(u, v)` of a state, with `u^2 - v^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub theta: f64,
    pub u: f64,
    pub v: f64,
}

impl Kinematics {
    /// Unit-temperature kinematics for velocity `v`, with `u = sqrt(1 + v^2)`.
    /// The dissipation matrices and `A` depend on `(u, v)` only.
    pub fn from_velocity(v: f64) -> Self {
        Kinematics {
            theta: 1.0,
            u: (1.0 + v * v).sqrt(),
            v,
        }
    }
}

pub fn kinematics(psi: &GodunovState) -> Result<Kinematics> {
    psi.validate()?;
    let s = (psi.psi0 - psi.psi1) * (psi.psi0 + psi.psi1);
    let theta = 1.0 / s.sqrt();
    Ok(Kinematics {
        theta,
        u: theta * psi.psi0,
        v: theta * psi.psi1,
    })
}

pub fn b_visc(kin: &Kinematics) -> Mat2 {
    let (u, v) = (kin.u, kin.v);
    let u2 = u * u;
    Mat2::symmetric(u2 * v * v, -u2 * u * v, u2 * u2)
}

pub fn b_one(kin: &Kinematics) -> Mat2 {
    let (u, v) = (kin.u, kin.v);
    let w = 4.0 * v * v + 1.0;
    Mat2::symmetric(16.0 * u * u * v * v, -4.0 * u * v * w, w * w)
}

pub fn b_two(kin: &Kinematics) -> Mat2 {
    let (u, v) = (kin.u, kin.v);
    let s = u * u + v * v;
    Mat2::symmetric(s * s, -2.0 * s * u * v, 4.0 * u * u * v * v)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(eps))
    }
}

/// `eps B_visc - B_1 - 9 eps / (4 - eps) B_2`.
pub fn b_sharp(kin: &Kinematics, eps: f64) -> Result<Mat2> {
    check_eps(eps)?;
    let c2 = 9.0 * eps / (4.0 - eps);
    Ok(b_visc(kin).scale(eps) - b_one(kin) - b_two(kin).scale(c2))
}

/// Closed form of `det B#`: `9 eps ((8 + eps) v^2 + eps - 1) / (eps - 4)`.
pub fn det_b_sharp_closed_form(v: f64, eps: f64) -> f64 {
    9.0 * eps * singular_factor(v, eps) / (eps - 4.0)
}

/// `|(8 + eps) v^2 + eps - 1|` below this multiple of `(8 + eps) v^2 + |eps - 1|`
/// is treated as the singular locus.
pub const SINGULAR_REL_TOL: f64 = 1e-12;

/// `det B#` from its closed form, or `SingularBsharp` on the singular locus.
///
/// The entries of `B#` grow like `v^4` while its determinant grows like `v^2`,
/// so the determinant of the assembled matrix loses digits for fast states.
pub fn regular_det(kin: &Kinematics, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let v2 = kin.v * kin.v;
    let det = det_b_sharp_closed_form(kin.v, eps);
    if singular_factor(kin.v, eps).abs()
        <= SINGULAR_REL_TOL * ((8.0 + eps) * v2 + (eps - 1.0).abs())
    {
        return Err(Error::SingularBsharp { det });
    }
    Ok(det)
}

/// `(8 + eps) v^2 + eps - 1`; `B#` is singular exactly where this vanishes.
pub fn singular_factor(v: f64, eps: f64) -> f64 {
    (8.0 + eps) * v * v + eps - 1.0
}

/// Flux residual `F(psi) = (-(4/3) theta^4 v u + q0, theta^4 ((4/3) v^2 + 1/3) - q1)`.
pub fn flux_residual(psi: &GodunovState, q0: f64, q1: f64) -> Result<[f64; 2]> {
    let kin = kinematics(psi)?;
    Ok(flux_residual_kin(&kin, q0, q1))
}

pub(crate) fn flux_residual_kin(kin: &Kinematics, q0: f64, q1: f64) -> [f64; 2] {
    let t4 = kin.theta.powi(4);
    let v = kin.v;
    [
        -(4.0 / 3.0) * t4 * v * kin.u + q0,
        t4 * ((4.0 / 3.0) * v * v + 1.0 / 3.0) - q1,
    ]
}

/// Scaled linearization matrix `A(psi)`.
pub fn lin_matrix(kin: &Kinematics) -> Mat2 {
    let (u, v) = (kin.u, kin.v);
    let v2 = v * v;
    Mat2::symmetric(
        v * (6.0 * v2 + 5.0),
        -u * (6.0 * v2 + 1.0),
        3.0 * v * (2.0 * v2 + 1.0),
    )
}

/// `trace(adj(B#) A)` by matrix arithmetic.
pub fn trace_adj_identity(kin: &Kinematics, eps: f64) -> Result<f64> {
    let bs = b_sharp(kin, eps)?;
    Ok((bs.adj() * lin_matrix(kin)).trace())
}

/// Closed form `(3v / (eps - 4)) ((8 + eps^2) v^2 + eps^2 - 6 eps - 4)`.
pub fn trace_adj_closed_form(v: f64, eps: f64) -> f64 {
    let e2 = eps * eps;
    3.0 * v / (eps - 4.0) * ((8.0 + e2) * v * v + e2 - 6.0 * eps - 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalityClass {
    StrictlyCausal,
    SharplyCausal,
    Acausal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalityVerdict {
    pub class: CausalityClass,
    /// `4 eta / (3 mu)` for causal triples.
    pub epsilon: Option<f64>,
}

/// Relative tolerance for the equality cases `mu = 4 eta / 3` and `nu = nu_max`.
pub const CAUSALITY_REL_TOL: f64 = 1e-10;

/// Classify `(eta, mu, nu)` against `mu >= 4 eta / 3`, `nu <= (1/(3 eta) - 1/(9 mu))^-1`.
pub fn causality_check(eta: f64, mu: f64, nu: f64) -> Result<CausalityVerdict> {
    for (name, value) in [("eta", eta), ("mu", mu), ("nu", nu)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveParameter { name, value });
        }
    }
    let acausal = CausalityVerdict {
        class: CausalityClass::Acausal,
        epsilon: None,
    };
    let mu_min = 4.0 * eta / 3.0;
    if mu < mu_min * (1.0 - CAUSALITY_REL_TOL) {
        return Ok(acausal);
    }
    // Positive once mu >= 4 eta / 3 (it is at least 1 / (4 eta)).
    let nu_max = 1.0 / (1.0 / (3.0 * eta) - 1.0 / (9.0 * mu));
    let rel = (nu - nu_max) / nu_max;
    let class = if rel.abs() <= CAUSALITY_REL_TOL {
        CausalityClass::SharplyCausal
    } else if rel > 0.0 {
        return Ok(acausal);
    } else {
        CausalityClass::StrictlyCausal
    };
    // mu may sit a hair below 4 eta / 3 inside the tolerance band.
    let epsilon = (4.0 * eta / (3.0 * mu)).min(1.0);
    Ok(CausalityVerdict {
        class,
        epsilon: Some(epsilon),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
        (a - b).abs() / b.abs().max(scale).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn kinematics_examples() {
        let k = kinematics(&GodunovState::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!((k.theta, k.u, k.v), (1.0, 1.0, 0.0));
        let k = kinematics(&GodunovState::new(2.0, 0.0).unwrap()).unwrap();
        assert_eq!((k.theta, k.u, k.v), (0.5, 1.0, 0.0));
        let k = kinematics(&GodunovState::new(2f64.sqrt(), 1.0).unwrap()).unwrap();
        assert_relative_eq!(k.theta, 1.0, epsilon = 1e-15);
        assert_relative_eq!(k.u, 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(k.v, 1.0, epsilon = 1e-15);
        assert!((k.u * k.u - k.v * k.v - 1.0).abs() <= 1e-12 * k.u * k.u);
    }

    #[test]
    fn kinematics_rejects_outside_state_space() {
        let s = GodunovState {
            psi0: 1.0,
            psi1: 1.0,
        };
        assert!(matches!(
            kinematics(&s),
            Err(Error::StateOutsideDomain { .. })
        ));
        let s = GodunovState {
            psi0: -2.0,
            psi1: 0.0,
        };
        assert!(kinematics(&s).is_err());
        assert!(GodunovState::new(0.5, -0.7).is_err());
    }

    #[test]
    fn matrices_at_rest() {
        let k = Kinematics::from_velocity(0.0);
        assert_eq!(b_visc(&k), Mat2::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(b_one(&k), Mat2::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(b_two(&k), Mat2::new(1.0, 0.0, 0.0, 0.0));
        let bs = b_sharp(&k, 1.0).unwrap();
        assert_eq!(bs, Mat2::new(-3.0, 0.0, 0.0, 0.0));
        assert_eq!(det_b_sharp_closed_form(0.0, 1.0), 0.0);
        assert_eq!(lin_matrix(&k), Mat2::new(0.0, -1.0, -1.0, 0.0));
        assert_eq!(lin_matrix(&k).det(), -1.0);
        assert_eq!(trace_adj_identity(&k, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn b_sharp_rejects_bad_eps() {
        let k = Kinematics::from_velocity(0.3);
        for eps in [0.0, -0.1, 1.0001, f64::NAN] {
            assert!(matches!(b_sharp(&k, eps), Err(Error::EpsilonOutOfRange(_))));
        }
    }

    #[test]
    fn det_b_sharp_at_half() {
        let k = Kinematics::from_velocity(0.5f64.sqrt());
        let det = b_sharp(&k, 1.0).unwrap().det();
        assert_relative_eq!(det, -13.5, max_relative = 1e-12);
        assert_relative_eq!(
            det_b_sharp_closed_form(k.v, 1.0),
            -13.5,
            max_relative = 1e-14
        );
        assert!(lin_matrix(&k).det().abs() < 1e-14);
    }

    #[test]
    fn lin_matrix_at_unit_velocity() {
        let k = Kinematics::from_velocity(1.0);
        let a = lin_matrix(&k);
        let s = 2f64.sqrt();
        assert_relative_eq!(a.0[0][0], 11.0);
        assert_relative_eq!(a.0[0][1], -7.0 * s, max_relative = 1e-15);
        assert_relative_eq!(a.0[1][1], 9.0);
        assert_relative_eq!(a.det(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn trace_adj_example() {
        let v = 0.5f64.sqrt();
        let k = Kinematics::from_velocity(v);
        let t = trace_adj_identity(&k, 1.0).unwrap();
        assert_relative_eq!(t, 4.5 * v, max_relative = 1e-12);
        assert_relative_eq!(trace_adj_closed_form(v, 1.0), 4.5 * v, max_relative = 1e-14);
    }

    #[test]
    fn det_negative_above_singular_locus() {
        for &eps in &[0.05, 0.3, 0.7, 1.0] {
            let vmin2 = (1.0 - eps) / (8.0 + eps);
            for i in 1..50 {
                let v2 = vmin2 + i as f64 * 0.04;
                let k = Kinematics::from_velocity(v2.sqrt());
                assert!(b_sharp(&k, eps).unwrap().det() < 0.0);
            }
        }
    }

    #[test]
    fn flux_residual_examples() {
        let rest = GodunovState::new(1.0, 0.0).unwrap();
        let f = flux_residual(&rest, 0.0, 1.0).unwrap();
        assert_eq!(f[0], 0.0);
        assert_relative_eq!(f[1], -2.0 / 3.0, epsilon = 1e-15);
        let f = flux_residual(&rest, 1.0, 1.0 / 3.0).unwrap();
        assert_eq!(f[0], 1.0);
        assert!(f[1].abs() < 1e-15);
        assert!(flux_residual(
            &GodunovState {
                psi0: 0.1,
                psi1: 0.2
            },
            1.0,
            1.0
        )
        .is_err());
    }

    #[test]
    fn causality_examples() {
        let v = causality_check(1.0, 4.0 / 3.0, 4.0).unwrap();
        assert_eq!(v.class, CausalityClass::SharplyCausal);
        assert_relative_eq!(v.epsilon.unwrap(), 1.0, epsilon = 1e-15);

        let v = causality_check(1.0, 1.0, 1.0).unwrap();
        assert_eq!(v.class, CausalityClass::Acausal);
        assert_eq!(v.epsilon, None);

        let v = causality_check(1.0, 3.0, 27.0 / 8.0).unwrap();
        assert_eq!(v.class, CausalityClass::SharplyCausal);
        assert_relative_eq!(v.epsilon.unwrap(), 4.0 / 9.0, epsilon = 1e-15);

        let v = causality_check(1.0, 3.0, 3.0).unwrap();
        assert_eq!(v.class, CausalityClass::StrictlyCausal);
        assert_eq!(
            causality_check(1.0, 3.0, 3.5).unwrap().class,
            CausalityClass::Acausal
        );

        // Truncated decimal input for mu = 4/3 sits inside the tolerance band.
        let v = causality_check(1.0, 1.3333333333, 4.0).unwrap();
        assert_eq!(v.class, CausalityClass::SharplyCausal);
        assert_eq!(v.epsilon, Some(1.0));

        assert!(matches!(
            causality_check(0.0, 1.0, 1.0),
            Err(Error::NonPositiveParameter { name: "eta", .. })
        ));
        assert!(causality_check(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn sharp_bound_matches_b_two_coefficient() {
        // nu / mu = 9 eps / (4 - eps) on the sharply causal bound.
        for &(eta, mu) in &[(1.0, 4.0 / 3.0), (1.0, 3.0), (0.2, 5.0), (2.0, 2.7)] {
            let nu = 1.0 / (1.0 / (3.0 * eta) - 1.0 / (9.0 * mu));
            let v = causality_check(eta, mu, nu).unwrap();
            let eps = v.epsilon.unwrap();
            assert_relative_eq!(nu / mu, 9.0 * eps / (4.0 - eps), max_relative = 1e-13);
        }
    }

    proptest! {
        #[test]
        fn closed_forms_agree(v in -1.5f64..1.5, eps in 1e-6f64..=1.0) {
            let k = Kinematics::from_velocity(v);
            prop_assert!((k.u * k.u - k.v * k.v - 1.0).abs() <= 1e-12 * k.u * k.u);
            let bs = b_sharp(&k, eps).unwrap();
            for m in [b_visc(&k), b_one(&k), b_two(&k), bs, lin_matrix(&k)] {
                prop_assert!(m.is_symmetric() && m.is_finite());
            }
            let a = lin_matrix(&k);
            prop_assert!(rel_err(bs.det(), det_b_sharp_closed_form(v, eps), bs.det_scale()) <= 1e-12);
            prop_assert!(rel_err(a.det(), 2.0 * v * v - 1.0, a.det_scale()) <= 1e-12);
            let m = bs.adj() * a;
            let scale = (m.0[0][0].abs() + m.0[1][1].abs()).max(1.0);
            prop_assert!(rel_err(m.trace(), trace_adj_closed_form(v, eps), scale) <= 1e-12);
        }

        #[test]
        fn reflection_symmetry(psi0 in 0.5f64..3.0, frac in -0.95f64..0.95, q0 in -2.0f64..2.0, q1 in 0.1f64..2.0) {
            let psi = GodunovState::new(psi0, frac * psi0).unwrap();
            let refl = GodunovState::new(psi0, -frac * psi0).unwrap();
            let f = flux_residual(&psi, q0, q1).unwrap();
            let g = flux_residual(&refl, -q0, q1).unwrap();
            prop_assert!((g[0] + f[0]).abs() <= 1e-12 * (1.0 + f[0].abs()));
            prop_assert!((g[1] - f[1]).abs() <= 1e-12 * (1.0 + f[1].abs()));
        }

        #[test]
        fn kinematics_normalised(psi0 in 0.1f64..10.0, frac in -0.999f64..0.999) {
            let k = kinematics(&GodunovState::new(psi0, frac * psi0).unwrap()).unwrap();
            prop_assert!((k.u * k.u - k.v * k.v - 1.0).abs() <= 1e-12 * k.u * k.u);
            prop_assert!(k.theta > 0.0 && k.u >= 1.0);
        }
    }
}
