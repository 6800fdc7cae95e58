//! Truncated bivariate Taylor arithmetic ("jets").
//!
//! A [`Jet2D`] holds the normalised Taylor coefficients `∂ₓⁱ∂ₜʲ f / (i! j!)`
//! of a field at a base point, for `i ≤ 4`, `j ≤ 2`. Ring operations are the
//! truncated Cauchy product; elementary functions are composed through their
//! univariate series about the base value.

mod field;
mod series;

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

pub use field::Field;
pub use series::{Series, SN};

use series::factorial;

/// Highest x-order in the box.
pub const NX: usize = 4;
/// Highest t-order in the box.
pub const NT: usize = 2;
/// Highest total degree in the box.
pub const MAX_DEG: usize = NX + NT;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("division by a jet whose value {0:e} is below the machine threshold")]
    DivisionByZero(f64),
    #[error("square root argument {0} lies on the branch cut")]
    BranchCut(String),
    #[error("jets expanded at different base points")]
    BasePointMismatch,
    #[error("coefficient ({0},{1}) lies outside the valid order of this jet")]
    OutOfOrder(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elem {
    Exp,
    Tanh,
    Sech,
    Sqrt,
    Sin,
    Cos,
    PowInt(i32),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2D<S> {
    c: [[S; NT + 1]; NX + 1],
    x: f64,
    t: f64,
    // Valid (x, t) order. Shifting by a derivative loses the top row.
    ord: (usize, usize),
}

impl<S: Field> Jet2D<S> {
    pub fn constant(v: S, x: f64, t: f64) -> Self {
        let mut c = [[S::zero(); NT + 1]; NX + 1];
        c[0][0] = v;
        Self {
            c,
            x,
            t,
            ord: (NX, NT),
        }
    }

    /// Jet of the coordinate function along `axis`, expanded at `value`.
    pub fn var(axis: Axis, value: f64) -> Self {
        match axis {
            Axis::X => Self::coord(Axis::X, value, 0.0),
            Axis::T => Self::coord(Axis::T, 0.0, value),
        }
    }

    /// Coordinate jet at the full base point `(x, t)`.
    pub fn coord(axis: Axis, x: f64, t: f64) -> Self {
        let mut out = Self::constant(S::zero(), x, t);
        match axis {
            Axis::X => {
                out.c[0][0] = S::from_f64(x);
                out.c[1][0] = S::one();
            }
            Axis::T => {
                out.c[0][0] = S::from_f64(t);
                out.c[0][1] = S::one();
            }
        }
        out
    }

    /// Build a jet from raw normalised coefficients.
    pub fn from_coeffs(c: [[S; NT + 1]; NX + 1], x: f64, t: f64) -> Self {
        Self {
            c,
            x,
            t,
            ord: (NX, NT),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn base_point(&self) -> (f64, f64) {
        (self.x, self.t)
    }
    pub fn order(&self) -> (usize, usize) {
        self.ord
    }
    pub fn with_order(mut self, ord: (usize, usize)) -> Self {
        self.ord = (self.ord.0.min(ord.0), self.ord.1.min(ord.1));
        self
    }

    pub fn value(&self) -> S {
        self.c[0][0]
    }

    /// Normalised coefficient `∂ₓⁱ∂ₜʲ f / (i! j!)`.
    pub fn coeff(&self, i: usize, j: usize) -> S {
        debug_assert!(i <= self.ord.0 && j <= self.ord.1, "coefficient ({i},{j}) out of order");
        self.c[i][j]
    }

    pub fn try_coeff(&self, i: usize, j: usize) -> Result<S, JetError> {
        if i <= self.ord.0 && j <= self.ord.1 {
            Ok(self.c[i][j])
        } else {
            Err(JetError::OutOfOrder(i, j))
        }
    }

    pub(crate) fn set_coeff(&mut self, i: usize, j: usize, v: S) {
        self.c[i][j] = v;
    }

    /// The mixed partial `∂ₓⁱ∂ₜʲ f` at the base point.
    pub fn d(&self, i: usize, j: usize) -> S {
        self.coeff(i, j).scale(factorial(i) * factorial(j))
    }

    /// Jet of `∂f/∂x`; the valid x-order drops by one.
    pub fn dx(&self) -> Self {
        let mut c = [[S::zero(); NT + 1]; NX + 1];
        for i in 0..NX {
            for j in 0..=NT {
                c[i][j] = self.c[i + 1][j].scale((i + 1) as f64);
            }
        }
        Self {
            c,
            x: self.x,
            t: self.t,
            ord: (self.ord.0.saturating_sub(1), self.ord.1),
        }
    }

    /// Jet of `∂f/∂t`; the valid t-order drops by one.
    pub fn dt(&self) -> Self {
        let mut c = [[S::zero(); NT + 1]; NX + 1];
        for i in 0..=NX {
            for j in 0..NT {
                c[i][j] = self.c[i][j + 1].scale((j + 1) as f64);
            }
        }
        Self {
            c,
            x: self.x,
            t: self.t,
            ord: (self.ord.0, self.ord.1.saturating_sub(1)),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        out.for_each(|v| v.scale(k));
        out
    }

    pub fn mul_scalar(&self, k: S) -> Self {
        let mut out = *self;
        out.for_each(|v| v * k);
        out
    }

    pub fn add_scalar(&self, k: S) -> Self {
        let mut out = *self;
        out.c[0][0] = out.c[0][0] + k;
        out
    }

    fn for_each(&mut self, f: impl Fn(S) -> S) {
        for row in self.c.iter_mut() {
            for v in row.iter_mut() {
                *v = f(*v);
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().flatten().all(|v| v.is_finite())
    }

    /// Largest coefficient magnitude inside the valid order.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..=self.ord.0 {
            for j in 0..=self.ord.1 {
                m = m.max(self.c[i][j].abs());
            }
        }
        m
    }

    pub fn checked_div(&self, b: &Self) -> Result<Self, JetError> {
        if self.base_point() != b.base_point() {
            return Err(JetError::BasePointMismatch);
        }
        let b0 = b.c[0][0];
        if !(b0.abs() > f64::MIN_POSITIVE * 4.0) {
            return Err(JetError::DivisionByZero(b0.abs()));
        }
        let mut c = [[S::zero(); NT + 1]; NX + 1];
        for i in 0..=NX {
            for j in 0..=NT {
                let mut acc = self.c[i][j];
                for p in 0..=i {
                    for q in 0..=j {
                        if p == 0 && q == 0 {
                            continue;
                        }
                        acc = acc - b.c[p][q] * c[i - p][j - q];
                    }
                }
                c[i][j] = acc.fdiv(b0);
            }
        }
        Ok(Self {
            c,
            x: self.x,
            t: self.t,
            ord: min_ord(self.ord, b.ord),
        })
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        Self::constant(S::one(), self.x, self.t).checked_div(self)
    }

    pub fn exp(&self) -> Self {
        Series::var(self.value()).exp().compose(self)
    }
    pub fn tanh(&self) -> Self {
        Series::var(self.value()).tanh().compose(self)
    }
    pub fn sech(&self) -> Self {
        Series::var(self.value()).sech().compose(self)
    }
    pub fn tanh_sech(&self) -> (Self, Self) {
        let (t, s) = Series::var(self.value()).tanh_sech();
        (t.compose(self), s.compose(self))
    }
    /// `(1 − tanh, 1 + tanh)` without cancellation: `2/(1 + e^{±2θ})`,
    /// always exponentiating the side with non-positive real part.
    pub fn tanh_complements(&self) -> Result<(Self, Self), JetError> {
        let neg = self.value().re() < 0.0;
        let e = self.scale(if neg { 2.0 } else { -2.0 }).exp();
        let r = e.add_scalar(S::one()).recip()?;
        let big = r.scale(2.0);
        let small = (e * r).scale(2.0);
        Ok(if neg { (big, small) } else { (small, big) })
    }
    pub fn sin(&self) -> Self {
        Series::var(self.value()).sin_cos().0.compose(self)
    }
    pub fn cos(&self) -> Self {
        Series::var(self.value()).sin_cos().1.compose(self)
    }
    pub fn sqrt(&self) -> Result<Self, JetError> {
        Ok(Series::var(self.value()).sqrt()?.compose(self))
    }

    /// Integer power by repeated squaring of the jet itself.
    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        let base = if n < 0 { self.recip()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(S::one(), self.x, self.t).with_order(self.ord);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq;
            }
            e >>= 1;
            if e > 0 {
                sq = sq * sq;
            }
        }
        Ok(acc)
    }

    pub fn elem(&self, f: Elem) -> Result<Self, JetError> {
        Ok(match f {
            Elem::Exp => self.exp(),
            Elem::Tanh => self.tanh(),
            Elem::Sech => self.sech(),
            Elem::Sqrt => self.sqrt()?,
            Elem::Sin => self.sin(),
            Elem::Cos => self.cos(),
            Elem::PowInt(n) => self.powi(n)?,
        })
    }

    /// Checked binary operation; the operator impls assume matching base points.
    pub fn arith(&self, b: &Self, op: ArithOp) -> Result<Self, JetError> {
        if self.base_point() != b.base_point() {
            return Err(JetError::BasePointMismatch);
        }
        Ok(match op {
            ArithOp::Add => *self + *b,
            ArithOp::Sub => *self - *b,
            ArithOp::Mul => *self * *b,
            ArithOp::Div => self.checked_div(b)?,
        })
    }

    /// Convert the scalar type coefficient-wise.
    pub fn map_scalar<T: Field>(&self, f: impl Fn(S) -> T) -> Jet2D<T> {
        let mut c = [[T::zero(); NT + 1]; NX + 1];
        for i in 0..=NX {
            for j in 0..=NT {
                c[i][j] = f(self.c[i][j]);
            }
        }
        Jet2D {
            c,
            x: self.x,
            t: self.t,
            ord: self.ord,
        }
    }
}

fn min_ord(a: (usize, usize), b: (usize, usize)) -> (usize, usize) {
    (a.0.min(b.0), a.1.min(b.1))
}

impl<S: Field> Add for Jet2D<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.base_point(), rhs.base_point());
        let mut out = self;
        for i in 0..=NX {
            for j in 0..=NT {
                out.c[i][j] = self.c[i][j] + rhs.c[i][j];
            }
        }
        out.ord = min_ord(self.ord, rhs.ord);
        out
    }
}

impl<S: Field> Sub for Jet2D<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.base_point(), rhs.base_point());
        let mut out = self;
        for i in 0..=NX {
            for j in 0..=NT {
                out.c[i][j] = self.c[i][j] - rhs.c[i][j];
            }
        }
        out.ord = min_ord(self.ord, rhs.ord);
        out
    }
}

impl<S: Field> Neg for Jet2D<S> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut out = self;
        out.for_each(|v| -v);
        out
    }
}

impl<S: Field> Mul for Jet2D<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.base_point(), rhs.base_point());
        let mut c = [[S::zero(); NT + 1]; NX + 1];
        for i in 0..=NX {
            for j in 0..=NT {
                let mut acc = S::zero();
                for p in 0..=i {
                    for q in 0..=j {
                        acc = acc + self.c[p][q] * rhs.c[i - p][j - q];
                    }
                }
                c[i][j] = acc;
            }
        }
        Self {
            c,
            x: self.x,
            t: self.t,
            ord: min_ord(self.ord, rhs.ord),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_jets() {
        let j = Jet2D::<f64>::var(Axis::X, 2.0);
        assert_eq!(j.coeff(0, 0), 2.0);
        assert_eq!(j.coeff(1, 0), 1.0);
        assert_eq!(j.coeff(0, 1), 0.0);
        let j = Jet2D::<f64>::var(Axis::T, 0.0);
        assert_eq!(j.coeff(0, 1), 1.0);
        assert_eq!(j.coeff(0, 0), 0.0);
        assert_eq!(Jet2D::<f64>::var(Axis::X, -3.5).coeff(0, 0), -3.5);
    }

    #[test]
    fn square_of_x() {
        let x = Jet2D::<f64>::coord(Axis::X, 3.0, 0.0);
        let y = x * x;
        assert_eq!(y.value(), 9.0);
        assert_eq!(y.d(1, 0), 6.0);
        assert_eq!(y.coeff(2, 0), 1.0);
        assert_eq!(y.coeff(3, 0), 0.0);
    }

    #[test]
    fn x_plus_t() {
        let x = Jet2D::<f64>::coord(Axis::X, 1.0, 2.0);
        let t = Jet2D::<f64>::coord(Axis::T, 1.0, 2.0);
        let s = x + t;
        assert_eq!(s.value(), 3.0);
        assert_eq!(s.d(1, 0), 1.0);
        assert_eq!(s.d(0, 1), 1.0);
    }

    #[test]
    fn self_division_is_one() {
        let x = Jet2D::<f64>::coord(Axis::X, 0.3, -0.2);
        let t = Jet2D::<f64>::coord(Axis::T, 0.3, -0.2);
        let a = (x * t).exp() + x.sin();
        let q = a.checked_div(&a).unwrap();
        assert_eq!(q.value(), 1.0);
        for i in 0..=NX {
            for j in 0..=NT {
                if i + j > 0 {
                    assert_eq!(q.coeff(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn division_by_zero_value() {
        let z = Jet2D::<f64>::coord(Axis::X, 0.0, 0.0);
        let one = Jet2D::constant(1.0, 0.0, 0.0);
        assert!(matches!(one.checked_div(&z), Err(JetError::DivisionByZero(_))));
    }

    #[test]
    fn tanh_complements_keep_relative_accuracy() {
        for th in [-40.0, -3.0, 0.0, 0.7, 25.0] {
            let j = Jet2D::<f64>::coord(Axis::X, th, 0.0);
            let (m, p) = j.tanh_complements().unwrap();
            let tt = j.tanh();
            let exact_m = 2.0 / (1.0 + (2.0 * th).exp());
            assert!((m.value() - exact_m).abs() <= 1e-15 * exact_m, "{th}");
            assert!((p.value() + m.value() - 2.0).abs() < 1e-15);
            // derivatives: (1 ∓ tanh)' = ∓ sech²
            assert!((m.d(1, 0) + tt.d(1, 0)).abs() <= 1e-14 * tt.d(1, 0).abs(), "{th}");
            assert!((p.d(2, 0) - tt.d(2, 0)).abs() <= 1e-13 * tt.d(2, 0).abs().max(1e-300), "{th}");
        }
    }

    #[test]
    fn tanh_maclaurin() {
        let x = Jet2D::<f64>::var(Axis::X, 0.0);
        let t = x.tanh();
        assert_eq!(t.value(), 0.0);
        assert_eq!(t.d(1, 0), 1.0);
        assert_eq!(t.d(2, 0), 0.0);
        assert!((t.coeff(3, 0) + 1.0 / 3.0).abs() < 1e-16);
        assert!((t.d(3, 0) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn exp_of_zero_constant() {
        let z = Jet2D::<f64>::constant(0.0, 1.0, 1.0);
        let e = z.exp();
        assert_eq!(e.value(), 1.0);
        assert_eq!(e.max_abs(), 1.0);
    }

    #[test]
    fn sqrt_branch_cut() {
        let z = Jet2D::<f64>::constant(0.0, 0.0, 0.0);
        assert!(matches!(z.sqrt(), Err(JetError::BranchCut(_))));
        let n = Jet2D::<f64>::constant(-1.0, 0.0, 0.0);
        assert!(n.sqrt().is_err());
        let c = Jet2D::<num_complex::Complex64>::constant(num_complex::Complex64::new(-1.0, 0.0), 0.0, 0.0);
        assert!(c.sqrt().is_err());
        let s = Jet2D::<f64>::coord(Axis::X, 4.0, 0.0).sqrt().unwrap();
        assert_eq!(s.value(), 2.0);
        assert_eq!(s.d(1, 0), 0.25);
    }

    #[test]
    fn powi_matches_products() {
        let x = Jet2D::<f64>::coord(Axis::X, 1.3, 0.4);
        let t = Jet2D::<f64>::coord(Axis::T, 1.3, 0.4);
        let a = x + t * x;
        let p = a.powi(5).unwrap();
        let q = a * a * a * a * a;
        for i in 0..=NX {
            for j in 0..=NT {
                assert!((p.coeff(i, j) - q.coeff(i, j)).abs() < 1e-12 * q.max_abs());
            }
        }
        let r = a.powi(-2).unwrap() * a * a;
        assert!((r.value() - 1.0).abs() < 1e-15);
        assert!(r.coeff(2, 1).abs() < 1e-13);
    }

    #[test]
    fn shifted_jets_lose_order() {
        let x = Jet2D::<f64>::coord(Axis::X, 0.5, 0.0);
        let e = x.exp();
        let ex = e.dx();
        assert_eq!(ex.order(), (NX - 1, NT));
        assert!((ex.d(2, 0) - 0.5f64.exp()).abs() < 1e-15);
        assert!(ex.try_coeff(4, 0).is_err());
    }

    #[test]
    fn base_point_mismatch() {
        let a = Jet2D::<f64>::coord(Axis::X, 0.0, 0.0);
        let b = Jet2D::<f64>::coord(Axis::X, 1.0, 0.0);
        assert_eq!(a.arith(&b, ArithOp::Add), Err(JetError::BasePointMismatch));
    }
}
