use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Row-major 2x2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn symmetric(diag0: f64, off: f64, diag1: f64) -> Self {
        Mat2::new(diag0, off, off, diag1)
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Adjugate, so that `m * m.adj() = det(m) * I`.
    pub fn adj(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(d, -b, -c, a)
    }

    pub fn transpose(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a, c, b, d)
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(s * a, s * b, s * c, s * d)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn is_symmetric(&self) -> bool {
        self.0[0][1] == self.0[1][0]
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.0;
        [a * x[0] + b * x[1], c * x[0] + d * x[1]]
    }

    /// Magnitude of the two products entering the determinant. Used as the
    /// reference scale for relative errors of quantities that cancel.
    pub fn det_scale(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        (a * d).abs() + (b * c).abs()
    }

    /// Discriminant `tr^2 - 4 det` of the characteristic polynomial.
    pub fn char_discriminant(&self) -> f64 {
        let t = self.trace();
        t * t - 4.0 * self.det()
    }

    /// Eigenvalues from the trace/determinant formulas, ordered by real part
    /// (and by imaginary part for a conjugate pair).
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        Self::eigenvalues_from_invariants(self.trace(), self.det())
    }

    /// Roots of `lambda^2 - tr lambda + det`, ordered as in [`Mat2::eigenvalues`].
    pub fn eigenvalues_from_invariants(tr: f64, det: f64) -> [Complex64; 2] {
        let half_tr = 0.5 * tr;
        let disc = half_tr * half_tr - det;
        if disc >= 0.0 {
            let r = disc.sqrt();
            // Avoid cancellation in the smaller-magnitude root.
            let big = if half_tr >= 0.0 {
                half_tr + r
            } else {
                half_tr - r
            };
            let small = if big != 0.0 { det / big } else { 0.0 };
            let (lo, hi) = if big < small {
                (big, small)
            } else {
                (small, big)
            };
            [Complex64::new(lo, 0.0), Complex64::new(hi, 0.0)]
        } else {
            let im = (-disc).sqrt();
            [Complex64::new(half_tr, -im), Complex64::new(half_tr, im)]
        }
    }

    /// Real eigenvector for a real eigenvalue `lambda`, normalised to unit length.
    pub fn eigenvector(&self, lambda: f64) -> [f64; 2] {
        let [[a, b], [c, d]] = self.0;
        // Rows of (M - lambda I) are orthogonal to the eigenvector; use the
        // better-conditioned one.
        let r0 = [a - lambda, b];
        let r1 = [c, d - lambda];
        let n0 = r0[0].hypot(r0[1]);
        let n1 = r1[0].hypot(r1[1]);
        let v = if n0 >= n1 {
            if n0 == 0.0 {
                [1.0, 0.0]
            } else {
                [-r0[1], r0[0]]
            }
        } else {
            [-r1[1], r1[0]]
        };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self.0;
        for (row, rrow) in out.iter_mut().zip(rhs.0) {
            for (x, y) in row.iter_mut().zip(rrow) {
                *x += y;
            }
        }
        Mat2(out)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = rhs.0;
        Mat2::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}
