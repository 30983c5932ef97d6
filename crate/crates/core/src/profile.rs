//! Heteroclinic shooting for the profile system `B#(psi, eps) psi' = F(psi, q_tilde)`.
//!
//! A shot starts on the linear approximation of the unstable manifold of the
//! saddle `psi_minus` and integrates forward until the trajectory is captured
//! by `psi_plus`, escapes, reaches the singular locus of `B#`, or runs out of
//! pseudo-time. Only capture is reported as a profile; the other verdicts are
//! ordinary outcomes, since a connecting orbit need not exist.

use std::fmt;

use crate::classification::{check_omega, FD_STEP};
use crate::equilibria::{rest_points, EquilibriumPair, ShockParams};
use crate::error::{Error, Result};
use crate::integrator::{AcceptedStep, Dopri5, StepError, Tolerances};
use crate::mat2::Mat2;
use crate::model::{
    b_sharp, flux_residual_kin, kinematics, regular_det, singular_factor, GodunovState, Kinematics,
};
use crate::oscillation::{oscillation_report, OscillationReport};

/// Capture also requires `|B#^-1 F|` below this fraction of the largest field
/// norm seen along the shot.
pub const CAPTURE_FIELD_RATIO: f64 = 1e-6;

/// A step-size collapse within this relative distance of the singular locus
/// is reported as reaching it.
pub const LOCUS_BAND: f64 = 1e-3;

/// Solve `B#(psi, eps) x = F(psi, q_tilde)` for the profile velocity `x = psi'`.
pub fn vector_field(psi: &GodunovState, eps: f64, q_tilde: f64) -> Result<[f64; 2]> {
    let kin = kinematics(psi)?;
    let sp = ShockParams::new(q_tilde)?;
    field_at(&kin, eps, &sp)
}

fn field_at(kin: &Kinematics, eps: f64, sp: &ShockParams) -> Result<[f64; 2]> {
    let bs = b_sharp(kin, eps)?;
    let det = regular_det(kin, eps)?;
    let f = flux_residual_kin(kin, sp.q0, sp.q1);
    let x = bs.adj().apply(f);
    Ok([x[0] / det, x[1] / det])
}

/// Central-difference Jacobian with steps `h * max(1, |x_i|)`.
pub fn fd_jacobian<F>(f: F, x: [f64; 2], h: f64) -> Result<Mat2>
where
    F: Fn([f64; 2]) -> Result<[f64; 2]>,
{
    let mut cols = [[0.0; 2]; 2];
    for (j, col) in cols.iter_mut().enumerate() {
        let hj = h * x[j].abs().max(1.0);
        let mut xp = x;
        let mut xm = x;
        xp[j] += hj;
        xm[j] -= hj;
        let fp = f(xp)?;
        let fm = f(xm)?;
        *col = [(fp[0] - fm[0]) / (2.0 * hj), (fp[1] - fm[1]) / (2.0 * hj)];
    }
    Ok(Mat2::new(cols[0][0], cols[1][0], cols[0][1], cols[1][1]))
}

/// Gradient of `v = psi1 / sqrt(psi0^2 - psi1^2)` with respect to `(psi0, psi1)`.
fn velocity_gradient(psi: &GodunovState) -> [f64; 2] {
    let s2 = (psi.psi0 - psi.psi1) * (psi.psi0 + psi.psi1);
    let s3 = s2 * s2.sqrt();
    [-psi.psi1 * psi.psi0 / s3, psi.psi0 * psi.psi0 / s3]
}

/// Unit unstable eigenvector of the saddle `psi_minus`, oriented so that `v`
/// decreases along it (the downstream state has the smaller velocity).
pub fn unstable_direction(eps: f64, q_tilde: f64) -> Result<[f64; 2]> {
    check_omega(eps, q_tilde)?;
    let pair = rest_points(q_tilde)?;
    saddle_direction(&pair, eps, q_tilde)
}

/// `psi = r (cosh chi, sinh chi)` with `r = 1/theta` and `sinh chi = v`.
fn psi_of_log(y: [f64; 2]) -> [f64; 2] {
    let r = y[0].exp();
    [r * y[1].cosh(), r * y[1].sinh()]
}

/// Jacobian of the field in `(ln r, chi)` coordinates, together with the
/// Jacobian `d psi / d(ln r, chi)` that maps its eigenvectors back.
///
/// Fast rest points sit close to the light cone, where the entries of the
/// Godunov-coordinate Jacobian are huge and its small eigenvalue drowns in
/// cancellation; the hyperbolic coordinates keep both eigenvalues resolved.
fn log_jacobian(psi: &GodunovState, eps: f64, q_tilde: f64) -> Result<(Mat2, Mat2)> {
    let kin = kinematics(psi)?;
    let y0 = [(1.0 / kin.theta).ln(), kin.v.asinh()];
    let field = |y: [f64; 2]| {
        let x = psi_of_log(y);
        let g = vector_field(&GodunovState::from_array(x), eps, q_tilde)?;
        let r = y[0].exp();
        let (c, s) = (y[1].cosh(), y[1].sinh());
        Ok([(c * g[0] - s * g[1]) / r, (c * g[1] - s * g[0]) / r])
    };
    let jac = fd_jacobian(field, y0, FD_STEP)?;
    let p = psi_of_log(y0);
    Ok((jac, Mat2::new(p[0], p[1], p[1], p[0])))
}

fn unstable_eigenvalue(jac: &Mat2) -> Result<f64> {
    let ev = jac.eigenvalues();
    let lambda = ev[1].re;
    if ev[1].im != 0.0 || !(lambda > 0.0) {
        return Err(Error::NotASaddle([ev[0].re, ev[1].re]));
    }
    Ok(lambda)
}

fn saddle_direction(pair: &EquilibriumPair, eps: f64, q_tilde: f64) -> Result<[f64; 2]> {
    // Opposite signs are decided by the well-conditioned closed forms.
    let kin = kinematics(&pair.psi_minus)?;
    let det_lin = (2.0 * kin.v * kin.v - 1.0) / regular_det(&kin, eps)?;
    let (jac, to_psi) = log_jacobian(&pair.psi_minus, eps, q_tilde)?;
    let lambda = unstable_eigenvalue(&jac)?;
    if !(det_lin < 0.0) {
        return Err(Error::NotASaddle([jac.det() / lambda, lambda]));
    }
    let d = to_psi.apply(jac.eigenvector(lambda));
    let n = norm(d);
    let mut d = [d[0] / n, d[1] / n];
    let g = velocity_gradient(&pair.psi_minus);
    if g[0] * d[0] + g[1] * d[1] > 0.0 {
        d = [-d[0], -d[1]];
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    /// Initial displacement along the unstable direction, in units of `|psi_minus - psi_plus|`.
    pub offset: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Capture radius around `psi_plus`, in units of `|psi_minus - psi_plus|`.
    pub capture_radius: f64,
    /// Escape radius around `psi_plus`, in units of `|psi_minus - psi_plus|`.
    pub escape_radius: f64,
    pub max_pseudo_time: f64,
    pub max_steps: usize,
    /// Interpolated samples per accepted step (including the step end).
    pub samples_per_step: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            offset: 1e-7,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            capture_radius: 1e-8,
            escape_radius: 1e2,
            max_pseudo_time: 1e6,
            max_steps: 200_000,
            samples_per_step: 8,
        }
    }
}

impl ShootOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.offset,
            self.rel_tol,
            self.abs_tol,
            self.capture_radius,
            self.escape_radius,
            self.max_pseudo_time,
        ];
        if !positive.iter().all(|x| *x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidOptions(
                "tolerances, radii and offsets must be positive",
            ));
        }
        if self.capture_radius >= self.escape_radius {
            return Err(Error::InvalidOptions(
                "capture radius must be below escape radius",
            ));
        }
        if self.max_steps == 0 || self.samples_per_step == 0 {
            return Err(Error::InvalidOptions(
                "step and sample counts must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    ConvergedToPlus,
    Escaped,
    Stalled,
    HitSingularLocus,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ConvergedToPlus => "ConvergedToPlus",
            Verdict::Escaped => "Escaped",
            Verdict::Stalled => "Stalled",
            Verdict::HitSingularLocus => "HitSingularLocus",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub t: f64,
    pub psi: GodunovState,
    pub kin: Kinematics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileResult {
    pub eps: f64,
    pub q_tilde: f64,
    pub equilibria: EquilibriumPair,
    /// Unit vector the shot left `psi_minus` along.
    pub direction: [f64; 2],
    pub samples: Vec<ProfileSample>,
    pub verdict: Verdict,
    pub oscillation: OscillationReport,
    /// Distance from the last sample to `psi_plus`.
    pub final_distance: f64,
    pub steps: usize,
}

impl ProfileResult {
    pub fn final_state(&self) -> GodunovState {
        self.samples
            .last()
            .expect("shots always record the start")
            .psi
    }

    pub fn amplitude(&self) -> f64 {
        self.equilibria.separation()
    }
}

struct Shot {
    samples: Vec<ProfileSample>,
    verdict: Verdict,
    steps: usize,
}

/// Shoot from `psi_minus` along the unstable direction oriented towards
/// `psi_plus`; if that branch escapes, try the opposite orientation.
pub fn shoot(eps: f64, q_tilde: f64, opts: &ShootOptions) -> Result<ProfileResult> {
    check_omega(eps, q_tilde)?;
    opts.validate()?;
    let pair = rest_points(q_tilde)?;
    let sp = ShockParams::new(q_tilde)?;
    let dir = saddle_direction(&pair, eps, q_tilde)?;

    let mut direction = dir;
    let mut shot = integrate(&pair, &sp, eps, dir, opts)?;
    if shot.verdict == Verdict::Escaped {
        let flipped = [-dir[0], -dir[1]];
        let other = integrate(&pair, &sp, eps, flipped, opts)?;
        if other.verdict == Verdict::ConvergedToPlus {
            shot = other;
            direction = flipped;
        }
    }

    let states: Vec<GodunovState> = shot.samples.iter().map(|s| s.psi).collect();
    let oscillation = oscillation_report(&states, &pair.psi_plus)?;
    let final_distance = states
        .last()
        .map_or(f64::NAN, |p| p.distance(&pair.psi_plus));
    Ok(ProfileResult {
        eps,
        q_tilde,
        equilibria: pair,
        direction,
        samples: shot.samples,
        verdict: shot.verdict,
        oscillation,
        final_distance,
        steps: shot.steps,
    })
}

fn sample(t: f64, y: [f64; 2]) -> Option<ProfileSample> {
    let psi = GodunovState::from_array(y);
    let kin = kinematics(&psi).ok()?;
    Some(ProfileSample { t, psi, kin })
}

fn norm(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

fn integrate(
    pair: &EquilibriumPair,
    sp: &ShockParams,
    eps: f64,
    dir: [f64; 2],
    opts: &ShootOptions,
) -> Result<Shot> {
    let amplitude = pair.separation();
    let capture = opts.capture_radius * amplitude;
    let escape = opts.escape_radius * amplitude;
    let target = pair.psi_plus.as_array();
    let dist = |y: [f64; 2]| norm([y[0] - target[0], y[1] - target[1]]);

    let start = pair.psi_minus.as_array();
    let delta = opts.offset * amplitude;
    let y0 = [start[0] + delta * dir[0], start[1] + delta * dir[1]];
    let mut samples = vec![sample(0.0, y0).ok_or(Error::StateOutsideDomain {
        psi0: y0[0],
        psi1: y0[1],
    })?];

    let rhs = |y: &[f64; 2]| {
        let kin = kinematics(&GodunovState::from_array(*y))?;
        field_at(&kin, eps, sp)
    };
    let tol = Tolerances {
        rtol: opts.rel_tol,
        atol: opts.abs_tol,
    };
    let mut solver = Dopri5::new(rhs, 0.0, y0, tol)?;
    let locus_side = singular_factor(samples[0].kin.v, eps).signum();
    let mut peak_field = norm(solver.derivative());

    let verdict = loop {
        if solver.accepted >= opts.max_steps || solver.time() >= opts.max_pseudo_time {
            break Verdict::Stalled;
        }
        let step = match solver.step() {
            Ok(step) => step,
            Err(StepError::Rhs(Error::SingularBsharp { .. })) => break Verdict::HitSingularLocus,
            Err(StepError::Rhs(Error::StateOutsideDomain { .. })) => break Verdict::Escaped,
            Err(StepError::Rhs(e)) => return Err(e),
            Err(StepError::StepSizeUnderflow { .. }) => {
                // The field blows up in finite time on the approach to the locus.
                let v = solver.state();
                let near_locus = kinematics(&GodunovState::from_array(v))
                    .map(|k| {
                        singular_factor(k.v, eps).abs()
                            < LOCUS_BAND * ((8.0 + eps) * k.v * k.v + (1.0 - eps))
                    })
                    .unwrap_or(false);
                break if near_locus {
                    Verdict::HitSingularLocus
                } else {
                    Verdict::Stalled
                };
            }
        };
        peak_field = peak_field.max(norm(solver.derivative()));

        let end = solver.state();
        let end_kin = match kinematics(&GodunovState::from_array(end)) {
            Ok(k) => k,
            Err(_) => break Verdict::Escaped,
        };
        if singular_factor(end_kin.v, eps).signum() != locus_side {
            break Verdict::HitSingularLocus;
        }

        if let Some((t, y)) = first_capture(&step, opts.samples_per_step, capture, &dist) {
            let field_ok = norm(solver.derivative()) < CAPTURE_FIELD_RATIO * peak_field
                || rhs_norm(y, eps, sp).is_some_and(|f| f < CAPTURE_FIELD_RATIO * peak_field);
            if field_ok {
                push_substeps(&mut samples, &step, opts.samples_per_step, Some(t));
                if let Some(s) = sample(t, y) {
                    push(&mut samples, s);
                }
                break Verdict::ConvergedToPlus;
            }
        }
        push_substeps(&mut samples, &step, opts.samples_per_step, None);
        if dist(end) > escape {
            break Verdict::Escaped;
        }
    };

    Ok(Shot {
        samples,
        verdict,
        steps: solver.accepted,
    })
}

fn rhs_norm(y: [f64; 2], eps: f64, sp: &ShockParams) -> Option<f64> {
    let kin = kinematics(&GodunovState::from_array(y)).ok()?;
    field_at(&kin, eps, sp).ok().map(norm)
}

fn push(samples: &mut Vec<ProfileSample>, s: ProfileSample) {
    if samples.last().is_none_or(|last| s.t > last.t) {
        samples.push(s);
    }
}

/// Interpolated samples of `step` up to (and excluding) `until`, or through the step end.
fn push_substeps(
    samples: &mut Vec<ProfileSample>,
    step: &AcceptedStep<2>,
    per_step: usize,
    until: Option<f64>,
) {
    for k in 1..=per_step {
        let theta = k as f64 / per_step as f64;
        let t = if k == per_step {
            step.t1()
        } else {
            step.t0 + theta * step.h
        };
        if until.is_some_and(|u| t >= u) {
            break;
        }
        let y = if k == per_step {
            step.y1
        } else {
            step.interpolate(theta)
        };
        if let Some(s) = sample(t, y) {
            push(samples, s);
        }
    }
}

/// First point inside the capture radius within `step`, located by bisection
/// on the dense output.
fn first_capture<D>(
    step: &AcceptedStep<2>,
    per_step: usize,
    radius: f64,
    dist: &D,
) -> Option<(f64, [f64; 2])>
where
    D: Fn([f64; 2]) -> f64,
{
    let mut prev = 0.0;
    let n = per_step.max(8);
    for k in 1..=n {
        let theta = k as f64 / n as f64;
        if dist(step.interpolate(theta)) <= radius {
            let (mut lo, mut hi) = (prev, theta);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if dist(step.interpolate(mid)) <= radius {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some((step.t0 + hi * step.h, step.interpolate(hi)));
        }
        prev = theta;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::rest_points;

    #[test]
    fn field_vanishes_at_rest_points() {
        for &(e, q) in &[(1.0, 0.76), (0.4, 0.9), (0.05, 0.99)] {
            let p = rest_points(q).unwrap();
            for psi in [p.psi_minus, p.psi_plus] {
                let f = vector_field(&psi, e, q).unwrap();
                assert!(f[0].abs() < 1e-10 && f[1].abs() < 1e-10, "({e},{q}) {f:?}");
            }
        }
    }

    #[test]
    fn field_points_away_along_unstable_direction() {
        for &(e, q) in &[(1.0, 0.76), (0.5, 0.85), (0.1, 0.95)] {
            let p = rest_points(q).unwrap();
            let d = unstable_direction(e, q).unwrap();
            let h = 1e-6 * p.separation();
            let x = GodunovState::new(p.psi_minus.psi0 + h * d[0], p.psi_minus.psi1 + h * d[1])
                .unwrap();
            let f = vector_field(&x, e, q).unwrap();
            assert!(f[0] * d[0] + f[1] * d[1] > 0.0);
        }
    }

    #[test]
    fn unstable_direction_lowers_velocity() {
        let d = unstable_direction(1.0, 0.76).unwrap();
        let p = rest_points(0.76).unwrap();
        let g = velocity_gradient(&p.psi_minus);
        assert!(g[0] * d[0] + g[1] * d[1] < 0.0);
        assert!((norm(d) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn velocity_gradient_matches_differences() {
        let psi = GodunovState::new(1.3, 0.4).unwrap();
        let g = velocity_gradient(&psi);
        let v = |a: f64, b: f64| kinematics(&GodunovState::new(a, b).unwrap()).unwrap().v;
        let h = 1e-6;
        let d0 = (v(1.3 + h, 0.4) - v(1.3 - h, 0.4)) / (2.0 * h);
        let d1 = (v(1.3, 0.4 + h) - v(1.3, 0.4 - h)) / (2.0 * h);
        assert!((g[0] - d0).abs() < 1e-8 && (g[1] - d1).abs() < 1e-8);
    }

    #[test]
    fn regular_off_axis_at_eps_one() {
        // The singular locus is v = 0 when eps = 1.
        for v in [0.01, 0.3, 1.2] {
            let psi = crate::equilibria::state_from_v(v);
            assert!(vector_field(&psi, 1.0, 0.8).is_ok());
        }
        let axis = GodunovState::new(1.0, 0.0).unwrap();
        assert!(matches!(
            vector_field(&axis, 1.0, 0.8),
            Err(Error::SingularBsharp { .. })
        ));
    }

    #[test]
    fn degenerate_and_out_of_range() {
        let opts = ShootOptions::default();
        assert!(matches!(
            shoot(1.0, 0.75 + 1e-9, &opts),
            Err(Error::DegenerateShock(_))
        ));
        assert!(matches!(
            shoot(1.0, 0.74, &opts),
            Err(Error::ParamsOutOfOmega { .. })
        ));
        let bad = ShootOptions {
            capture_radius: 1e3,
            ..opts
        };
        assert!(matches!(
            shoot(1.0, 0.8, &bad),
            Err(Error::InvalidOptions(_))
        ));
    }

    #[test]
    fn node_shot_converges_monotonically() {
        let r = shoot(1.0, 0.76, &ShootOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::ConvergedToPlus);
        assert!(!r.oscillation.oscillatory);
        assert_eq!(r.oscillation.v_sign_changes(), 0);
        let first = r.samples.first().unwrap().kin.v;
        let last = r.samples.last().unwrap().kin.v;
        assert!((first - r.equilibria.v_minus_sq.sqrt()).abs() < 1e-6);
        assert!((last - r.equilibria.v_plus_sq.sqrt()).abs() < 1e-6);
        assert!(r.samples.windows(2).all(|w| w[1].kin.v <= w[0].kin.v));
        assert!(r.samples.windows(2).all(|w| w[1].t > w[0].t));
        assert!(r.final_distance <= 1.0000001e-8 * r.amplitude());
    }

    #[test]
    fn focus_shot_spirals() {
        let r = shoot(1.0, 0.85, &ShootOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::ConvergedToPlus);
        assert!(r.oscillation.v_sign_changes() >= 2);
        assert!(r.oscillation.oscillatory_in_all_systems());
    }

    #[test]
    fn fast_saddles_are_resolved() {
        // psi_minus hugs the light cone as q_tilde -> 1.
        for &(e, q) in &[
            (0.3, 0.999),
            (0.3, 0.9999),
            (1.0, 0.99999),
            (0.5, 1.0 - 1e-6),
        ] {
            let p = rest_points(q).unwrap();
            let d = unstable_direction(e, q).unwrap();
            let g = velocity_gradient(&p.psi_minus);
            assert!(g[0] * d[0] + g[1] * d[1] < 0.0, "({e},{q})");
        }
    }

    #[test]
    fn locus_is_a_verdict() {
        // Slow downstream states sit just above the locus when eps is small.
        let r = shoot(0.1, 0.99, &ShootOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::HitSingularLocus);
        let v = r.samples.last().unwrap().kin.v;
        assert!(singular_factor(v, 0.1).abs() < LOCUS_BAND);
    }

    #[test]
    fn samples_stay_in_state_space() {
        let r = shoot(0.8, 0.9, &ShootOptions::default()).unwrap();
        for s in &r.samples {
            assert!(s.psi.psi0 > s.psi.psi1.abs());
            assert!((s.kin.u * s.kin.u - s.kin.v * s.kin.v - 1.0).abs() < 1e-10);
        }
    }
}
