//! Univariate truncated power series `Σ c_k s^k`.
//!
//! Used in two roles: as the Taylor expansion of an elementary function about a
//! base value (then composed into a [`Jet2D`]), and as the local expansion of
//! profile functions of a single similarity variable.

use std::ops::{Add, Mul, Neg, Sub};

use super::{Field, Jet2D, JetError, MAX_DEG};

/// Number of stored coefficients (orders `0..SN`).
pub const SN: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series<S> {
    c: [S; SN],
    /// Highest order whose coefficient is exact.
    ord: usize,
}

impl<S: Field> Series<S> {
    pub fn constant(v: S) -> Self {
        let mut c = [S::zero(); SN];
        c[0] = v;
        Self { c, ord: SN - 1 }
    }

    /// The series of the identity map expanded about `v`: `v + s`.
    pub fn var(v: S) -> Self {
        let mut out = Self::constant(v);
        out.c[1] = S::one();
        out
    }

    pub fn from_coeffs(coeffs: &[S]) -> Self {
        let mut c = [S::zero(); SN];
        let n = coeffs.len().min(SN);
        c[..n].copy_from_slice(&coeffs[..n]);
        Self {
            c,
            ord: n.max(1) - 1,
        }
    }

    pub fn coeff(&self, k: usize) -> S {
        self.c[k]
    }
    pub fn coeffs(&self) -> &[S; SN] {
        &self.c
    }
    pub fn value(&self) -> S {
        self.c[0]
    }
    pub fn order(&self) -> usize {
        self.ord
    }
    /// k-th derivative at the expansion point.
    pub fn deriv(&self, k: usize) -> S {
        self.c[k].scale(factorial(k))
    }

    pub fn with_order(mut self, ord: usize) -> Self {
        self.ord = self.ord.min(ord);
        self
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        for c in out.c.iter_mut() {
            *c = c.scale(k);
        }
        out
    }

    pub fn mul_scalar(&self, k: S) -> Self {
        let mut out = *self;
        for c in out.c.iter_mut() {
            *c = *c * k;
        }
        out
    }

    pub fn add_scalar(&self, k: S) -> Self {
        let mut out = *self;
        out.c[0] = out.c[0] + k;
        out
    }

    pub fn derivative(&self) -> Self {
        let mut c = [S::zero(); SN];
        for k in 1..SN {
            c[k - 1] = self.c[k].scale(k as f64);
        }
        Self {
            c,
            ord: self.ord.saturating_sub(1),
        }
    }

    /// Antiderivative with constant term `c0`.
    pub fn integrate(&self, c0: S) -> Self {
        let mut c = [S::zero(); SN];
        c[0] = c0;
        for k in 1..SN {
            c[k] = self.c[k - 1].fdiv(S::from_f64(k as f64));
        }
        Self {
            c,
            ord: (self.ord + 1).min(SN - 1),
        }
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        Self::constant(S::one()).checked_div(self)
    }

    pub fn checked_div(&self, b: &Self) -> Result<Self, JetError> {
        let b0 = b.c[0];
        if !(b0.abs() > f64::MIN_POSITIVE) {
            return Err(JetError::DivisionByZero(b0.abs()));
        }
        let mut c = [S::zero(); SN];
        for n in 0..SN {
            let mut acc = self.c[n];
            for k in 1..=n {
                acc = acc - b.c[k] * c[n - k];
            }
            c[n] = acc.fdiv(b0);
        }
        Ok(Self {
            c,
            ord: self.ord.min(b.ord),
        })
    }

    pub fn exp(&self) -> Self {
        let mut b = [S::zero(); SN];
        b[0] = self.c[0].exp();
        for n in 1..SN {
            let mut acc = S::zero();
            for k in 1..=n {
                acc = acc + self.c[k].scale(k as f64) * b[n - k];
            }
            b[n] = acc.fdiv(S::from_f64(n as f64));
        }
        Self { c: b, ord: self.ord }
    }

    /// `tanh` via `T' = (1 − T²)·a'`.
    pub fn tanh(&self) -> Self {
        self.tanh_sech().0
    }

    /// `sech` via `S' = −S·T·a'`.
    pub fn sech(&self) -> Self {
        self.tanh_sech().1
    }

    pub fn tanh_sech(&self) -> (Self, Self) {
        let mut t = [S::zero(); SN];
        let mut w = [S::zero(); SN]; // 1 − T²
        let mut s = [S::zero(); SN];
        let mut st = [S::zero(); SN]; // S·T
        t[0] = self.c[0].tanh();
        s[0] = S::one().fdiv(self.c[0].cosh());
        // sech² rather than 1 − t²: once tanh is within an ulp of ±1 the
        // difference has no correct digits left.
        w[0] = s[0] * s[0];
        st[0] = s[0] * t[0];
        for n in 1..SN {
            let mut at = S::zero();
            let mut as_ = S::zero();
            for k in 1..=n {
                let ka = self.c[k].scale(k as f64);
                at = at + ka * w[n - k];
                as_ = as_ + ka * st[n - k];
            }
            let nn = S::from_f64(n as f64);
            t[n] = at.fdiv(nn);
            s[n] = -(as_.fdiv(nn));
            let mut acc_w = S::zero();
            let mut acc_st = S::zero();
            for j in 0..=n {
                acc_w = acc_w + t[j] * t[n - j];
                acc_st = acc_st + s[j] * t[n - j];
            }
            w[n] = -acc_w;
            st[n] = acc_st;
        }
        (
            Self { c: t, ord: self.ord },
            Self { c: s, ord: self.ord },
        )
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let mut s = [S::zero(); SN];
        let mut c = [S::zero(); SN];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for n in 1..SN {
            let mut as_ = S::zero();
            let mut ac = S::zero();
            for k in 1..=n {
                let ka = self.c[k].scale(k as f64);
                as_ = as_ + ka * c[n - k];
                ac = ac + ka * s[n - k];
            }
            let nn = S::from_f64(n as f64);
            s[n] = as_.fdiv(nn);
            c[n] = -(ac.fdiv(nn));
        }
        (Self { c: s, ord: self.ord }, Self { c, ord: self.ord })
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let mut b = [S::zero(); SN];
        b[0] = self.c[0].sqrt()?;
        let two_b0 = b[0] + b[0];
        for n in 1..SN {
            let mut acc = self.c[n];
            for k in 1..n {
                acc = acc - b[k] * b[n - k];
            }
            b[n] = acc.fdiv(two_b0);
        }
        Ok(Self { c: b, ord: self.ord })
    }

    /// Integer power by repeated squaring; negative powers go through `recip`.
    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        let base = if n < 0 { self.recip()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(S::one()).with_order(self.ord);
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

    /// Substitute a jet for the series variable: returns `Σ c_k (a − a₀)^k`
    /// where `a₀` is the value of `arg`. The expansion point of `self` must be
    /// that value.
    pub fn compose(&self, arg: &Jet2D<S>) -> Jet2D<S> {
        debug_assert!(self.ord >= MAX_DEG, "series order too low to fill the jet box");
        let mut h = *arg;
        h.set_coeff(0, 0, S::zero());
        let mut acc = Jet2D::constant(self.c[MAX_DEG], arg.x(), arg.t()).with_order(arg.order());
        for k in (0..MAX_DEG).rev() {
            acc = (acc * h).add_scalar(self.c[k]);
        }
        acc
    }

    /// Substitute another series (with zero-based shift) for the variable:
    /// `Σ c_k (b − b₀)^k`.
    pub fn compose_series(&self, arg: &Self) -> Self {
        let mut h = *arg;
        h.c[0] = S::zero();
        let mut acc = Self::constant(self.c[SN - 1]);
        for k in (0..SN - 1).rev() {
            acc = (acc * h).add_scalar(self.c[k]);
        }
        acc.with_order(self.ord.min(arg.ord))
    }

    /// Evaluate the truncated polynomial at offset `s`.
    pub fn eval(&self, s: S) -> S {
        let mut acc = self.c[self.ord];
        for k in (0..self.ord).rev() {
            acc = acc * s + self.c[k];
        }
        acc
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, i| a * i as f64)
}

impl<S: Field> Add for Series<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a = *a + *b;
        }
        Self {
            c,
            ord: self.ord.min(rhs.ord),
        }
    }
}

impl<S: Field> Sub for Series<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a = *a - *b;
        }
        Self {
            c,
            ord: self.ord.min(rhs.ord),
        }
    }
}

impl<S: Field> Neg for Series<S> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a = -*a;
        }
        Self { c, ord: self.ord }
    }
}

impl<S: Field> Mul for Series<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [S::zero(); SN];
        for (n, cn) in c.iter_mut().enumerate() {
            let mut acc = S::zero();
            for k in 0..=n {
                acc = acc + self.c[k] * rhs.c[n - k];
            }
            *cn = acc;
        }
        Self {
            c,
            ord: self.ord.min(rhs.ord),
        }
    }
}
