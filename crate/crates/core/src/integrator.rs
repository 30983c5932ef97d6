//! Dormand-Prince 5(4) with step-size control and the standard 4th-order
//! continuous extension, for autonomous systems on fixed-size state arrays.
//!
//! The right-hand side may fail (state left its domain, singular system
//! matrix). A failing stage evaluation is treated like a rejected step; if the
//! step size collapses the last such error is returned.

use std::fmt;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

/// One accepted step together with its interpolant.
#[derive(Debug, Clone, Copy)]
pub struct AcceptedStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> AcceptedStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// State at `t0 + theta h`, `theta` in `[0, 1]`.
    pub fn interpolate(&self, theta: f64) -> [f64; N] {
        let th1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        std::array::from_fn(|i| {
            r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepError<E> {
    /// The right-hand side kept failing down to the minimum step.
    Rhs(E),
    /// Step size fell below the resolution of the time variable.
    StepSizeUnderflow { t: f64 },
}

impl<E: fmt::Display> fmt::Display for StepError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::Rhs(e) => write!(f, "right-hand side failed: {e}"),
            StepError::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
        }
    }
}

pub struct Dopri5<F, E, const N: usize>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N], E>,
{
    rhs: F,
    tol: Tolerances,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

impl<F, E, const N: usize> Dopri5<F, E, N>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N], E>,
{
    pub fn new(mut rhs: F, t0: f64, y0: [f64; N], tol: Tolerances) -> Result<Self, E> {
        let k1 = rhs(&y0)?;
        let mut solver = Dopri5 {
            rhs,
            tol,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            accepted: 0,
            rejected: 0,
        };
        solver.h = solver.initial_step();
        Ok(solver)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> [f64; N] {
        self.y
    }

    pub fn derivative(&self) -> [f64; N] {
        self.k1
    }

    fn scaled_norm(&self, x: &[f64; N], y_ref: &[f64; N], y_other: &[f64; N]) -> f64 {
        let sum: f64 = (0..N)
            .map(|i| {
                let sc = self.tol.atol + self.tol.rtol * y_ref[i].abs().max(y_other[i].abs());
                (x[i] / sc).powi(2)
            })
            .sum();
        (sum / N as f64).sqrt()
    }

    fn initial_step(&mut self) -> f64 {
        let d0 = self.scaled_norm(&self.y, &self.y, &self.y);
        let d1 = self.scaled_norm(&self.k1, &self.y, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1 = axpy(&self.y, h0, &[(1.0, &self.k1)]);
        let d2 = match (self.rhs)(&y1) {
            Ok(f1) => {
                let diff: [f64; N] = std::array::from_fn(|i| f1[i] - self.k1[i]);
                self.scaled_norm(&diff, &self.y, &self.y) / h0
            }
            Err(_) => return h0 * 1e-3,
        };
        let m = d1.max(d2);
        let h1 = if m <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / m).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }

    /// Advance by one accepted step.
    pub fn step(&mut self) -> Result<AcceptedStep<N>, StepError<E>> {
        let mut last_err: Option<E> = None;
        loop {
            let h_min = 16.0 * f64::EPSILON * self.t.abs().max(1.0);
            if self.h < h_min {
                return Err(match last_err {
                    Some(e) => StepError::Rhs(e),
                    None => StepError::StepSizeUnderflow { t: self.t },
                });
            }
            match self.attempt(self.h) {
                Ok(Some(step)) => return Ok(step),
                Ok(None) => self.rejected += 1,
                Err(e) => {
                    self.rejected += 1;
                    self.h *= 0.25;
                    last_err = Some(e);
                }
            }
        }
    }

    fn attempt(&mut self, h: f64) -> Result<Option<AcceptedStep<N>>, E> {
        let y = self.y;
        let k1 = self.k1;
        let k2 = (self.rhs)(&axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = (self.rhs)(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = (self.rhs)(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = (self.rhs)(&axpy(
            &y,
            h,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        ))?;
        let k6 = (self.rhs)(&axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ))?;
        let y1 = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = (self.rhs)(&y1)?;

        let err_vec: [f64; N] = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let err = self.scaled_norm(&err_vec, &y, &y1);
        if !err.is_finite() {
            self.h *= 0.2;
            return Ok(None);
        }
        if err > 1.0 {
            self.h *= (0.9 * err.powf(-0.2)).max(0.2);
            return Ok(None);
        }

        let fac = if err == 0.0 {
            10.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
        };
        let r2: [f64; N] = std::array::from_fn(|i| y1[i] - y[i]);
        let r3: [f64; N] = std::array::from_fn(|i| h * k1[i] - r2[i]);
        let r4: [f64; N] = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
        let r5: [f64; N] = std::array::from_fn(|i| {
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
        });
        let step = AcceptedStep {
            t0: self.t,
            h,
            y0: y,
            y1,
            rcont: [y, r2, r3, r4, r5],
        };
        self.t += h;
        self.y = y1;
        self.k1 = k7;
        self.h = h * fac;
        self.accepted += 1;
        Ok(Some(step))
    }
}
