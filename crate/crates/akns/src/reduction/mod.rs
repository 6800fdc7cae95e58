//! Similarity reductions: the elliptic profile ODEs, their sn solutions,
//! parameter-constraint maps and the quadratures that assemble the
//! remaining profile functions.

pub mod case1;
pub mod case2;
pub mod ode;
pub mod quad;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{JetError, Series};
use crate::specfun::{jacobi_series, jacobi_sn_cn_dn, SpecfunError};

pub use case1::{Case1Mode, Case1Params, Case1Profiles, Case1Reduction};
pub use case2::{case2_branches, Case2Mode, Case2Params, Case2Profiles, Case2Reduction};
pub use ode::{DenseSolution, Radicand};
pub use quad::{integrate, Primitive, RealFn};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("radicand is negative ({value:e}) at the initial value F = {f}")]
    NegativeRadicand { f: f64, value: f64 },
    #[error("step size underflow near ξ = {at}")]
    Stiffness { at: f64 },
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNonconvergence { a: f64, b: f64 },
    #[error("k2·F − 1 vanishes on the quadrature path near ξ = {at}")]
    DenominatorZero { at: f64 },
    #[error("pole of the reduced profile near {at}")]
    Pole { at: f64 },
    #[error("ξ = {0} lies outside the integrated window")]
    OutsideWindow(f64),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("the free parameter of the branch table must be nonzero")]
    ZeroFreeParameter,
    #[error("no admissible root of the constraint map: {0}")]
    NoRoot(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Which set of reduced-profile formulas to use.
///
/// `Printed` takes the closed forms symbol for symbol as they are usually
/// quoted. `Lax` uses the forms re-derived from the Lax pair, which differ in
/// a handful of coefficients (listed in the README).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulary {
    #[default]
    Printed,
    Lax,
}

/// A profile function of one similarity variable, `F(ξ)`.
pub trait Profile: Send + Sync + Debug {
    /// `(F, F', F'')`.
    fn eval(&self, xi: f64) -> Result<(f64, f64, f64), ReductionError>;
    /// Taylor series about `xi`.
    fn series(&self, xi: f64) -> Result<Series<f64>, ReductionError>;
    fn period(&self) -> Option<f64>;
}

/// `F = b₀ + b₁·sn(ξ, k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnProfile {
    pub b0: f64,
    pub b1: f64,
    pub k: f64,
}

impl Profile for SnProfile {
    fn eval(&self, xi: f64) -> Result<(f64, f64, f64), ReductionError> {
        let (s, c, d) = jacobi_sn_cn_dn(xi, self.k)?;
        let k2 = self.k * self.k;
        Ok((
            self.b0 + self.b1 * s,
            self.b1 * c * d,
            -self.b1 * s * (d * d + k2 * c * c),
        ))
    }
    fn series(&self, xi: f64) -> Result<Series<f64>, ReductionError> {
        let (s, _, _) = jacobi_series(&Series::var(xi), self.k)?;
        Ok(s.scale(self.b1).add_scalar(self.b0))
    }
    fn period(&self) -> Option<f64> {
        crate::specfun::ellip_k(self.k).ok().map(|k| 4.0 * k)
    }
}

/// `F = 1/(l₀ + l₁·sn(ς, k))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusSnProfile {
    pub l0: f64,
    pub l1: f64,
    pub k: f64,
    /// Relative size of `l₀ + l₁ sn` below which a point counts as a pole.
    pub pole_tol: f64,
}

impl MobiusSnProfile {
    pub fn denominator(&self, xi: f64) -> Result<f64, ReductionError> {
        let (s, c, _) = jacobi_sn_cn_dn(xi, self.k)?;
        Ok(self.w(s, c))
    }

    // l₀ + l₁ sn, using 1 ± sn = cn²/(1 ∓ sn) where the sum would cancel.
    fn w(&self, s: f64, c: f64) -> f64 {
        if self.l0 == self.l1 && s < 0.0 {
            self.l1 * c * c / (1.0 - s)
        } else if self.l0 == -self.l1 && s > 0.0 {
            -self.l1 * c * c / (1.0 + s)
        } else {
            self.l0 + self.l1 * s
        }
    }
    fn check(&self, w: f64, xi: f64) -> Result<(), ReductionError> {
        if w.abs() <= self.pole_tol * self.l0.abs().max(self.l1.abs()) {
            Err(ReductionError::Pole { at: xi })
        } else {
            Ok(())
        }
    }
}

impl Profile for MobiusSnProfile {
    fn eval(&self, xi: f64) -> Result<(f64, f64, f64), ReductionError> {
        let (s, c, d) = jacobi_sn_cn_dn(xi, self.k)?;
        let w = self.w(s, c);
        self.check(w, xi)?;
        let k2 = self.k * self.k;
        let w1 = self.l1 * c * d;
        let w2 = -self.l1 * s * (d * d + k2 * c * c);
        let f = 1.0 / w;
        Ok((f, -w1 * f * f, (2.0 * w1 * w1 * f - w2) * f * f))
    }
    fn series(&self, xi: f64) -> Result<Series<f64>, ReductionError> {
        let (s, c, _) = jacobi_series(&Series::var(xi), self.k)?;
        let mut w = s.scale(self.l1).add_scalar(self.l0);
        let w0 = self.w(s.value(), c.value());
        self.check(w0, xi)?;
        // keep the accurately computed value; higher coefficients are exact
        w = w.add_scalar(w0 - w.value());
        Ok(w.recip()?)
    }
    fn period(&self) -> Option<f64> {
        crate::specfun::ellip_k(self.k).ok().map(|k| 4.0 * k)
    }
}

/// Profile given by a numerically integrated first-order ODE.
#[derive(Clone, Debug)]
pub struct NumericProfile(pub DenseSolution);

impl Profile for NumericProfile {
    fn eval(&self, xi: f64) -> Result<(f64, f64, f64), ReductionError> {
        self.0.eval_consistent(xi)
    }
    fn series(&self, xi: f64) -> Result<Series<f64>, ReductionError> {
        let (f, p, _) = self.0.eval_consistent(xi)?;
        Ok(self.0.radicand().solution_series(f, p))
    }
    fn period(&self) -> Option<f64> {
        None
    }
}

/// Dense coefficient-vector polynomial helpers (ascending powers).
pub(crate) mod poly {
    pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
            .collect()
    }

    pub fn scale(a: &[f64], k: f64) -> Vec<f64> {
        a.iter().map(|x| x * k).collect()
    }

    /// `p(c0 + c1·z)` as a polynomial in `z`.
    pub fn compose_linear(p: &[f64], c0: f64, c1: f64) -> Vec<f64> {
        let mut out = vec![0.0];
        for &c in p.iter().rev() {
            out = add(&mul(&out, &[c0, c1]), &[c]);
        }
        out
    }

    pub fn eval(p: &[f64], z: f64) -> f64 {
        p.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    /// Real roots by sign-change scanning of `grid` followed by bisection.
    pub fn bracket_roots(f: &dyn Fn(f64) -> f64, grid: &[f64]) -> Vec<f64> {
        let mut roots = Vec::new();
        for w in grid.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (mut fa, fb) = (f(a), f(b));
            if fa == 0.0 {
                roots.push(a);
                continue;
            }
            if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a.min(b) || m >= a.max(b) {
                    break;
                }
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        roots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_series_matches_eval() {
        let p = MobiusSnProfile {
            l0: 1.0,
            l1: 0.5,
            k: 0.3,
            pole_tol: 1e-10,
        };
        let s = p.series(0.8).unwrap();
        let (f, f1, f2) = p.eval(0.8).unwrap();
        assert!((s.value() - f).abs() < 1e-15);
        assert!((s.deriv(1) - f1).abs() < 1e-14);
        assert!((s.deriv(2) - f2).abs() < 1e-13);
    }

    #[test]
    fn mobius_at_sine_limit() {
        let p = MobiusSnProfile {
            l0: 1.0,
            l1: 0.5,
            k: 0.0,
            pole_tol: 1e-10,
        };
        let (f, _, _) = p.eval(std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(f, 0.6666666666666666);
    }

    #[test]
    fn mobius_derivative_at_origin() {
        let p = MobiusSnProfile {
            l0: 2.0,
            l1: 0.7,
            k: 0.5,
            pole_tol: 1e-10,
        };
        let (_, f1, _) = p.eval(0.0).unwrap();
        assert!((f1 + 0.7 / 4.0).abs() < 1e-16);
    }

    #[test]
    fn sn_profile_second_derivative_vanishes_at_origin() {
        let p = SnProfile {
            b0: 0.1,
            b1: 0.002,
            k: 0.1,
        };
        let (f, _, f2) = p.eval(0.0).unwrap();
        assert_eq!(f, 0.1);
        assert_eq!(f2, 0.0);
    }

    #[test]
    fn compose_linear_expands() {
        // (1 − 2z)² = 1 − 4z + 4z²
        let p = poly::compose_linear(&[0.0, 0.0, 1.0], 1.0, -2.0);
        assert_eq!(&p[..3], &[1.0, -4.0, 4.0]);
        assert!(p[3..].iter().all(|c| *c == 0.0));
    }
}
