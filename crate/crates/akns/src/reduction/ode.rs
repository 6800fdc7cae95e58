//! First-order elliptic ODE `F'² = R(F)` with polynomial `R`.
//!
//! Integrated as the pair `(F, P)` with `F' = P`, `P' = R'(F)/2`; after every
//! accepted Dormand–Prince step `P` is projected back onto `±√R(F)`, which
//! keeps the first integral exact and lets the second-order flow carry the
//! sign of `P` through turning points.

use super::ReductionError;
use crate::jet::Series;

/// Polynomial radicand `R(F) = Σ cᵢ Fⁱ` (degree ≤ 4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radicand {
    pub c: [f64; 5],
}

impl Radicand {
    pub fn eval(&self, f: f64) -> f64 {
        let c = &self.c;
        (((c[4] * f + c[3]) * f + c[2]) * f + c[1]) * f + c[0]
    }
    pub fn deriv(&self, f: f64) -> f64 {
        let c = &self.c;
        ((4.0 * c[4] * f + 3.0 * c[3]) * f + 2.0 * c[2]) * f + c[1]
    }
    /// Largest |term| of `R(F)`, used to scale residuals.
    pub fn scale(&self, f: f64) -> f64 {
        let mut m = 0.0f64;
        let mut p = 1.0;
        for c in self.c {
            m = m.max((c * p).abs());
            p *= f;
        }
        m
    }

    /// Taylor series of the solution through `(f0, p0)` at the expansion point,
    /// generated from `F'' = R'(F)/2`.
    pub fn solution_series(&self, f0: f64, p0: f64) -> Series<f64> {
        let mut c = [0.0; crate::jet::SN];
        c[0] = f0;
        c[1] = p0;
        for k in 0..crate::jet::SN - 2 {
            // k-th coefficient of R'(F)/2 only needs c[0..=k].
            let s = Series::from_coeffs(&c[..=k]).with_order(k);
            let mut acc = Series::constant(4.0 * self.c[4]);
            acc = acc * s + Series::constant(3.0 * self.c[3]);
            acc = acc * s + Series::constant(2.0 * self.c[2]);
            acc = acc * s + Series::constant(self.c[1]);
            let rk = 0.5 * acc.coeff(k);
            c[k + 2] = rk / ((k + 1) * (k + 2)) as f64;
        }
        Series::from_coeffs(&c)
    }
}

#[derive(Clone, Debug)]
struct Knot {
    x: f64,
    f: f64,
    p: f64,
}

/// Dense solution on `[lo, hi]`, quintic Hermite between accepted steps.
#[derive(Clone, Debug)]
pub struct DenseSolution {
    rad: Radicand,
    knots: Vec<Knot>,
    /// Largest first-integral defect `|P² − R(F)|` seen at accepted steps,
    /// relative to the radicand scale.
    pub max_energy_defect: f64,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn project(rad: &Radicand, f: f64, p: f64) -> f64 {
    let r = rad.eval(f);
    if r > 0.0 {
        let s = r.sqrt();
        if p < 0.0 {
            -s
        } else {
            s
        }
    } else {
        p
    }
}

fn sweep(
    rad: &Radicand,
    f0: f64,
    p0: f64,
    x0: f64,
    x1: f64,
    tol: f64,
    h_max: f64,
) -> Result<(Vec<Knot>, f64), ReductionError> {
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let rhs = |_f: f64, p: f64, f: f64| -> (f64, f64) { (p, 0.5 * rad.deriv(f)) };
    let mut knots = vec![Knot { x: x0, f: f0, p: p0 }];
    let (mut x, mut f, mut p) = (x0, f0, p0);
    let mut h = (0.01 * h_max).max(1e-6) * dir;
    let mut defect = 0.0f64;
    let h_min = 1e-12 * (1.0 + (x1 - x0).abs());
    while (x1 - x) * dir > 0.0 {
        let last = (x + h - x1) * dir >= 0.0;
        if last {
            h = x1 - x;
        }
        let mut kf = [0.0; 7];
        let mut kp = [0.0; 7];
        for s in 0..7 {
            let mut fs = f;
            let mut ps = p;
            for j in 0..s {
                fs += h * A[s][j] * kf[j];
                ps += h * A[s][j] * kp[j];
            }
            let (a, b) = rhs(x + C[s] * h, ps, fs);
            kf[s] = a;
            kp[s] = b;
        }
        let mut f5 = f;
        let mut p5 = p;
        let mut ef = 0.0;
        let mut ep = 0.0;
        for s in 0..7 {
            f5 += h * B5[s] * kf[s];
            p5 += h * B5[s] * kp[s];
            ef += h * (B5[s] - B4[s]) * kf[s];
            ep += h * (B5[s] - B4[s]) * kp[s];
        }
        let sf = tol * (1.0 + f.abs().max(f5.abs()));
        let sp = tol * (1.0 + p.abs().max(p5.abs()));
        let err = ((ef / sf).powi(2) + (ep / sp).powi(2)).sqrt() / std::f64::consts::SQRT_2;
        if err <= 1.0 {
            // land exactly on the end point
            x = if last { x1 } else { x + h };
            f = f5;
            p = project(rad, f5, p5);
            let r = rad.eval(f);
            defect = defect.max((p * p - r).abs() / rad.scale(f).max(f64::MIN_POSITIVE));
            knots.push(Knot { x, f, p });
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).abs().min(h_max) * dir;
        if h.abs() < h_min {
            return Err(ReductionError::Stiffness { at: x });
        }
    }
    Ok((knots, defect))
}

impl DenseSolution {
    /// Integrate from `F(0) = f0` over `[lo, hi] ∋ 0`. `ascending` chooses the
    /// sign of `F'(0)`.
    pub fn integrate(
        rad: Radicand,
        f0: f64,
        ascending: bool,
        lo: f64,
        hi: f64,
        tol: f64,
        h_max: f64,
    ) -> Result<Self, ReductionError> {
        let r0 = rad.eval(f0);
        let scale = rad.scale(f0);
        if r0 < -1e-14 * scale {
            return Err(ReductionError::NegativeRadicand { f: f0, value: r0 });
        }
        let mut p0 = r0.max(0.0).sqrt();
        if !ascending {
            p0 = -p0;
        }
        let (fwd, d1) = sweep(&rad, f0, p0, 0.0, hi.max(0.0), tol, h_max)?;
        let (bwd, d2) = sweep(&rad, f0, p0, 0.0, lo.min(0.0), tol, h_max)?;
        let mut knots: Vec<Knot> = bwd.into_iter().skip(1).rev().collect();
        knots.extend(fwd);
        Ok(Self {
            rad,
            knots,
            max_energy_defect: d1.max(d2),
        })
    }

    pub fn radicand(&self) -> &Radicand {
        &self.rad
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0].x, self.knots[self.knots.len() - 1].x)
    }

    /// `(F, P)` by quintic Hermite interpolation on the enclosing step.
    pub fn eval(&self, x: f64) -> Result<(f64, f64), ReductionError> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(ReductionError::OutsideWindow(x));
        }
        let i = match self.knots.binary_search_by(|k| k.x.partial_cmp(&x).unwrap()) {
            Ok(i) => return Ok((self.knots[i].f, self.knots[i].p)),
            Err(i) => i.clamp(1, self.knots.len() - 1),
        };
        let (a, b) = (&self.knots[i - 1], &self.knots[i]);
        let h = b.x - a.x;
        let s = (x - a.x) / h;
        let (fa, da, qa) = (a.f, a.p * h, 0.5 * self.rad.deriv(a.f) * h * h);
        let (fb, db, qb) = (b.f, b.p * h, 0.5 * self.rad.deriv(b.f) * h * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 0.5 * s3 - s4 + 0.5 * s5;
        let f = fa * h0 + da * h1 + qa * h2 + fb * h3 + db * h4 + qb * h5;
        let d0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let d1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let d2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
        let d3 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
        let d4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let d5 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
        let p = (fa * d0 + da * d1 + qa * d2 + fb * d3 + db * d4 + qb * d5) / h;
        Ok((f, p))
    }

    /// `(F, F', F'')` with `F'` taken on the radicand branch chosen by the
    /// interpolated sign, so the triple satisfies the ODE exactly.
    pub fn eval_consistent(&self, x: f64) -> Result<(f64, f64, f64), ReductionError> {
        let (f, p) = self.eval(x)?;
        let p = project(&self.rad, f, p);
        Ok((f, p, 0.5 * self.rad.deriv(f)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::jacobi_sn_cn_dn;

    // F = sn(ξ, k) solves F'² = (1 − F²)(1 − k²F²).
    fn sn_radicand(k: f64) -> Radicand {
        let k2 = k * k;
        Radicand {
            c: [1.0, 0.0, -(1.0 + k2), 0.0, k2],
        }
    }

    #[test]
    fn reproduces_sn_through_turning_points() {
        let k = 0.7;
        let sol = DenseSolution::integrate(sn_radicand(k), 0.0, true, -8.0, 12.0, 1e-12, 0.05).unwrap();
        for i in 0..=400 {
            let x = -8.0 + 20.0 * i as f64 / 400.0;
            let (f, _) = sol.eval(x).unwrap();
            let (s, _, _) = jacobi_sn_cn_dn(x, k).unwrap();
            assert!((f - s).abs() < 1e-9, "x={x} f={f} sn={s}");
        }
        assert!(sol.max_energy_defect < 1e-10);
    }

    #[test]
    fn equilibrium_at_double_root() {
        // R = (F − 1)²(F + 2): F = 1 is a double root.
        let rad = Radicand {
            c: [2.0, -3.0, 0.0, 1.0, 0.0],
        };
        let sol = DenseSolution::integrate(rad, 1.0, true, -3.0, 3.0, 1e-12, 0.1).unwrap();
        for x in [-2.0, 0.5, 2.9] {
            assert_eq!(sol.eval(x).unwrap().0, 1.0);
        }
    }

    #[test]
    fn rejects_negative_radicand() {
        let rad = sn_radicand(0.5);
        assert!(matches!(
            DenseSolution::integrate(rad, 1.5, true, 0.0, 1.0, 1e-10, 0.1),
            Err(ReductionError::NegativeRadicand { .. })
        ));
    }

    #[test]
    fn series_matches_sn_taylor() {
        let k = 0.4;
        let (s, c, d) = jacobi_sn_cn_dn(0.3, k).unwrap();
        let ser = sn_radicand(k).solution_series(s, c * d);
        let (ref_s, _, _) = crate::specfun::jacobi_series(&crate::jet::Series::var(0.3), k).unwrap();
        for j in 0..crate::jet::SN {
            assert!((ser.coeff(j) - ref_s.coeff(j)).abs() < 1e-13, "coefficient {j}");
        }
    }
}
