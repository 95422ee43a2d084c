//! Pointwise 2x2 matrix algebra.
//!
//! [`Mat2`] holds a general matrix such as a deformation gradient or a velocity
//! gradient (`grad_ij = d v_i / d x_j`). [`SymMat2`] stores only the three
//! independent entries of a symmetric matrix, which is how the conformation
//! tensor `B = F F^T` is carried everywhere.

use crate::error::{Error, Result};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymMat2 {
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        Mat2::new(d1, 0.0, 0.0, d2)
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn norm_sq(&self) -> f64 {
        frob_inner(self, self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    /// Symmetric part `(A + A^T) / 2`.
    pub fn sym(&self) -> SymMat2 {
        SymMat2::new(self.a11, 0.5 * (self.a12 + self.a21), self.a22)
    }

    /// Inverse transpose `A^{-T}`; `None` when singular.
    pub fn inverse_transpose(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.a22 / d,
            -self.a21 / d,
            -self.a12 / d,
            self.a11 / d,
        ))
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl SymMat2 {
    pub const IDENTITY: SymMat2 = SymMat2::new(1.0, 0.0, 1.0);
    pub const ZERO: SymMat2 = SymMat2::new(0.0, 0.0, 0.0);

    pub const fn new(b11: f64, b12: f64, b22: f64) -> Self {
        SymMat2 { b11, b12, b22 }
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        SymMat2::new(d1, 0.0, d2)
    }

    pub fn to_mat(&self) -> Mat2 {
        Mat2::new(self.b11, self.b12, self.b12, self.b22)
    }

    pub fn det(&self) -> f64 {
        self.b11 * self.b22 - self.b12 * self.b12
    }

    pub fn trace(&self) -> f64 {
        self.b11 + self.b22
    }

    pub fn norm_sq(&self) -> f64 {
        self.b11 * self.b11 + 2.0 * self.b12 * self.b12 + self.b22 * self.b22
    }

    pub fn scale(&self, s: f64) -> SymMat2 {
        SymMat2::new(self.b11 * s, self.b12 * s, self.b22 * s)
    }

    pub fn minus_identity(&self) -> SymMat2 {
        SymMat2::new(self.b11 - 1.0, self.b12, self.b22 - 1.0)
    }

    /// Strict leading-minor test.
    pub fn is_positive_definite(&self) -> bool {
        self.b11 > 0.0 && self.det() > 0.0
    }

    pub fn inner(&self, m: &Mat2) -> f64 {
        frob_inner(&self.to_mat(), m)
    }
}

impl Add for SymMat2 {
    type Output = SymMat2;
    fn add(self, o: SymMat2) -> SymMat2 {
        SymMat2::new(self.b11 + o.b11, self.b12 + o.b12, self.b22 + o.b22)
    }
}

impl Sub for SymMat2 {
    type Output = SymMat2;
    fn sub(self, o: SymMat2) -> SymMat2 {
        SymMat2::new(self.b11 - o.b11, self.b12 - o.b12, self.b22 - o.b22)
    }
}

/// `B = F F^T`.
pub fn bb_from_f(f: &Mat2) -> SymMat2 {
    SymMat2::new(
        f.a11 * f.a11 + f.a12 * f.a12,
        f.a11 * f.a21 + f.a12 * f.a22,
        f.a21 * f.a21 + f.a22 * f.a22,
    )
}

/// Inverse of a positive definite symmetric matrix via the adjugate.
pub fn invert_spd(b: &SymMat2) -> Result<SymMat2> {
    let det = b.det();
    if !(b.b11 > 0.0) || !(det > 0.0) {
        return Err(Error::NotPositiveDefinite { b11: b.b11, det });
    }
    Ok(SymMat2::new(b.b22 / det, -b.b12 / det, b.b11 / det))
}

/// Frobenius inner product `A : B`.
pub fn frob_inner(a: &Mat2, b: &Mat2) -> f64 {
    a.a11 * b.a11 + a.a12 * b.a12 + a.a21 * b.a21 + a.a22 * b.a22
}
