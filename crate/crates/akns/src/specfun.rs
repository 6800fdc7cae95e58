//! Jacobi elliptic functions and complete elliptic integrals (real modulus).
//!
//! Everything here is parameterised by the modulus `k` (so `sn(u, 1) = tanh u`).
//! [`SnConvention`] converts a user-supplied value given as the parameter
//! `m = k²` instead.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{Field, Jet2D, Series, SN};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("elliptic modulus {0} outside the admissible range")]
    ModulusOutOfRange(f64),
    #[error("AGM iteration did not converge in {0} steps")]
    AgmCap(usize),
    #[error("elliptic functions are only implemented for real arguments, got imaginary part {0:e}")]
    NonRealArgument(f64),
}

const AGM_CAP: usize = 32;

/// How the second argument of `sn(·, n)` is to be read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnConvention {
    #[default]
    Modulus,
    Parameter,
}

impl SnConvention {
    /// Convert a user value to the modulus `k`.
    pub fn to_modulus(self, value: f64) -> Result<EllipticModulus, SpecfunError> {
        match self {
            SnConvention::Modulus => EllipticModulus::new(value),
            SnConvention::Parameter => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(SpecfunError::ModulusOutOfRange(value));
                }
                EllipticModulus::new(value.sqrt())
            }
        }
    }
}

/// A modulus `k ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self, SpecfunError> {
        if (0.0..=1.0).contains(&k) {
            Ok(Self(k))
        } else {
            Err(SpecfunError::ModulusOutOfRange(k))
        }
    }
    pub fn k(self) -> f64 {
        self.0
    }
    /// Complementary modulus `√(1−k²)`, computed without cancellation.
    pub fn kprime(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

/// Arithmetic–geometric mean.
pub fn agm(a: f64, b: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    for _ in 0..AGM_CAP {
        if (a - b).abs() <= f64::EPSILON * a.abs() {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind `K(k)`.
pub fn ellip_k(k: f64) -> Result<f64, SpecfunError> {
    if !(0.0..1.0).contains(&k) {
        return Err(SpecfunError::ModulusOutOfRange(k));
    }
    let kp = EllipticModulus(k).kprime();
    Ok(std::f64::consts::FRAC_PI_2 / agm(1.0, kp))
}

/// Complete elliptic integral of the second kind `E(k)`.
pub fn ellip_e(k: f64) -> Result<f64, SpecfunError> {
    if !(0.0..=1.0).contains(&k) {
        return Err(SpecfunError::ModulusOutOfRange(k));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    let mut a = 1.0;
    let mut b = EllipticModulus(k).kprime();
    let mut c = k;
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..AGM_CAP {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let kk = std::f64::consts::FRAC_PI_2 / a;
    Ok(kk * (1.0 - sum))
}

/// `(sn, cn, dn)(u, k)` by descending Landen / AGM recursion.
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64), SpecfunError> {
    if !(0.0..=1.0).contains(&k) {
        return Err(SpecfunError::ModulusOutOfRange(k));
    }
    if k == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    if k == 1.0 {
        let s = 1.0 / u.cosh();
        return Ok((u.tanh(), s, s));
    }
    let kp = EllipticModulus(k).kprime();
    let mut a = [0.0f64; AGM_CAP + 1];
    let mut c = [0.0f64; AGM_CAP + 1];
    a[0] = 1.0;
    c[0] = k;
    let mut b = kp;
    let mut n = 0;
    while c[n].abs() > f64::EPSILON * a[n] {
        if n == AGM_CAP {
            return Err(SpecfunError::AgmCap(AGM_CAP));
        }
        let an = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        a[n + 1] = an;
        n += 1;
    }
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] * phi.sin() / a[j]).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (cn * cn + kp * kp * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

/// `(sn, cn, dn)` composed with a real series argument.
pub fn jacobi_series(
    arg: &Series<f64>,
    k: f64,
) -> Result<(Series<f64>, Series<f64>, Series<f64>), SpecfunError> {
    let (s0, c0, d0) = jacobi_sn_cn_dn(arg.value(), k)?;
    let a = arg.coeffs();
    let k2 = k * k;
    let mut s = [0.0; SN];
    let mut c = [0.0; SN];
    let mut d = [0.0; SN];
    let (mut cd, mut sd, mut sc) = ([0.0; SN], [0.0; SN], [0.0; SN]);
    s[0] = s0;
    c[0] = c0;
    d[0] = d0;
    cd[0] = c0 * d0;
    sd[0] = s0 * d0;
    sc[0] = s0 * c0;
    for n in 1..SN {
        let (mut as_, mut ac, mut ad) = (0.0, 0.0, 0.0);
        for j in 1..=n {
            let ja = j as f64 * a[j];
            as_ += ja * cd[n - j];
            ac += ja * sd[n - j];
            ad += ja * sc[n - j];
        }
        let nf = n as f64;
        s[n] = as_ / nf;
        c[n] = -ac / nf;
        d[n] = -k2 * ad / nf;
        let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
        for i in 0..=n {
            p += c[i] * d[n - i];
            q += s[i] * d[n - i];
            r += s[i] * c[n - i];
        }
        cd[n] = p;
        sd[n] = q;
        sc[n] = r;
    }
    let ord = arg.order();
    Ok((
        Series::from_coeffs(&s).with_order(ord),
        Series::from_coeffs(&c).with_order(ord),
        Series::from_coeffs(&d).with_order(ord),
    ))
}

fn lift<S: Field>(s: &Series<f64>) -> Series<S> {
    let mut c = [S::zero(); SN];
    for (dst, src) in c.iter_mut().zip(s.coeffs().iter()) {
        *dst = S::from_f64(*src);
    }
    Series::from_coeffs(&c).with_order(s.order())
}

/// `(sn, cn, dn)` of a jet with real base value.
pub fn jacobi_jets<S: Field>(
    u: &Jet2D<S>,
    k: f64,
) -> Result<(Jet2D<S>, Jet2D<S>, Jet2D<S>), SpecfunError> {
    let v = u.value();
    if v.im() != 0.0 {
        return Err(SpecfunError::NonRealArgument(v.im()));
    }
    let (s, c, d) = jacobi_series(&Series::var(v.re()), k)?;
    Ok((
        lift::<S>(&s).compose(u),
        lift::<S>(&c).compose(u),
        lift::<S>(&d).compose(u),
    ))
}

/// `sn` of a jet with real base value.
pub fn jacobi_sn_jet<S: Field>(u: &Jet2D<S>, k: f64) -> Result<Jet2D<S>, SpecfunError> {
    Ok(jacobi_jets(u, k)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Axis;

    #[test]
    fn k_at_zero() {
        assert_eq!(ellip_k(0.0).unwrap(), std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn k_rejects_one_and_negative() {
        assert!(ellip_k(1.0).is_err());
        assert!(ellip_k(-0.1).is_err());
    }

    #[test]
    fn e_limits() {
        assert!((ellip_e(0.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-16);
        assert_eq!(ellip_e(1.0).unwrap(), 1.0);
    }

    #[test]
    fn limits_of_sn() {
        let (s, _, _) = jacobi_sn_cn_dn(1.0, 0.0).unwrap();
        assert_eq!(s, 0.8414709848078965);
        let (s, _, _) = jacobi_sn_cn_dn(1.0, 1.0).unwrap();
        assert_eq!(s, 0.7615941559557649);
    }

    #[test]
    fn quarter_period() {
        for k in [0.1, 0.5, 0.9] {
            let (s, c, d) = jacobi_sn_cn_dn(ellip_k(k).unwrap(), k).unwrap();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(c.abs() < 1e-7);
            assert!((d - EllipticModulus(k).kprime()).abs() < 1e-12);
        }
    }

    #[test]
    fn sn_jet_at_origin() {
        let u = Jet2D::<f64>::var(Axis::X, 0.0);
        let s = jacobi_sn_jet(&u, 0.6).unwrap();
        assert_eq!(s.value(), 0.0);
        assert_eq!(s.d(1, 0), 1.0);
    }

    #[test]
    fn parameter_convention() {
        let k = SnConvention::Parameter.to_modulus(0.25).unwrap();
        assert_eq!(k.k(), 0.5);
        assert_eq!(SnConvention::Modulus.to_modulus(0.25).unwrap().k(), 0.25);
        assert!(SnConvention::Modulus.to_modulus(1.5).is_err());
    }
}
