use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::JetError;

/// Scalar type a jet can carry.
///
/// Implemented for `f64` and `Complex64`. The complex implementation takes a
/// real fast path whenever the imaginary parts involved are exactly zero, so a
/// computation on complex values with zero imaginary part produces the same
/// bits in its real part as the same computation in real mode.
pub trait Field:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    /// `None` when `z` has a nonzero imaginary part and `Self` is real.
    fn from_c64(z: Complex64) -> Option<Self>;
    fn to_c64(self) -> Complex64;
    /// Imaginary unit, when representable.
    fn imag_unit() -> Option<Self>;

    fn re(self) -> f64;
    fn im(self) -> f64;
    /// Magnitude.
    fn abs(self) -> f64;
    fn is_finite(self) -> bool;

    fn fdiv(self, rhs: Self) -> Self;
    fn scale(self, k: f64) -> Self;

    fn exp(self) -> Self;
    fn tanh(self) -> Self;
    fn cosh(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// Principal square root; the cut is the non-positive real axis.
    fn sqrt(self) -> Result<Self, JetError>;
}

impl Field for f64 {
    const IS_COMPLEX: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_c64(z: Complex64) -> Option<Self> {
        (z.im == 0.0).then_some(z.re)
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn imag_unit() -> Option<Self> {
        None
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn fdiv(self, rhs: Self) -> Self {
        self / rhs
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Result<Self, JetError> {
        if self > 0.0 {
            Ok(f64::sqrt(self))
        } else {
            Err(JetError::BranchCut(format!("{self:e}")))
        }
    }
}

impl Field for Complex64 {
    const IS_COMPLEX: bool = true;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn imag_unit() -> Option<Self> {
        Some(Complex64::new(0.0, 1.0))
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn abs(self) -> f64 {
        if self.im == 0.0 {
            self.re.abs()
        } else {
            self.norm()
        }
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn fdiv(self, rhs: Self) -> Self {
        if rhs.im == 0.0 {
            return Complex64::new(self.re / rhs.re, self.im / rhs.re);
        }
        // Smith's algorithm
        let (a, b, c, d) = (self.re, self.im, rhs.re, rhs.im);
        if c.abs() >= d.abs() {
            let r = d / c;
            let den = c + d * r;
            Complex64::new((a + b * r) / den, (b - a * r) / den)
        } else {
            let r = c / d;
            let den = c * r + d;
            Complex64::new((a * r + b) / den, (b * r - a) / den)
        }
    }
    fn scale(self, k: f64) -> Self {
        Complex64::new(self.re * k, self.im * k)
    }
    fn exp(self) -> Self {
        if self.im == 0.0 {
            Complex64::new(self.re.exp(), 0.0)
        } else {
            Complex64::exp(self)
        }
    }
    fn tanh(self) -> Self {
        if self.im == 0.0 {
            Complex64::new(self.re.tanh(), 0.0)
        } else {
            Complex64::tanh(self)
        }
    }
    fn cosh(self) -> Self {
        if self.im == 0.0 {
            Complex64::new(self.re.cosh(), 0.0)
        } else {
            Complex64::cosh(self)
        }
    }
    fn sin(self) -> Self {
        if self.im == 0.0 {
            Complex64::new(self.re.sin(), 0.0)
        } else {
            Complex64::sin(self)
        }
    }
    fn cos(self) -> Self {
        if self.im == 0.0 {
            Complex64::new(self.re.cos(), 0.0)
        } else {
            Complex64::cos(self)
        }
    }
    fn sqrt(self) -> Result<Self, JetError> {
        if self.im == 0.0 {
            if self.re > 0.0 {
                return Ok(Complex64::new(self.re.sqrt(), 0.0));
            }
            return Err(JetError::BranchCut(format!("{self}")));
        }
        Ok(Complex64::sqrt(self))
    }
}
