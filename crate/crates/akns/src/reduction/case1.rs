//! Travelling reduction in `ξ = t − k₂x` with `f = √k₁ tanh(√k₁(F₁ + x))`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    poly, DenseSolution, Formulary, NumericProfile, Primitive, Profile, Radicand, RealFn,
    ReductionError, SnProfile,
};
use crate::jet::Series;
use crate::specfun::{ellip_k, jacobi_sn_cn_dn};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case1Mode {
    #[default]
    ClosedFormSn,
    NumericOde,
}

/// Fully resolved parameter record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case1Params {
    pub alpha: f64,
    pub lambda: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Normalisation of F₂ at ξ = 0.
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    /// The constant written "C" inside the constant coefficient of the quartic.
    /// Literal parameter lists set it to `c`; the sn map determines it by matching.
    pub c_a0: f64,
    /// Free constant of the re-derived first integral (formulary `lax`).
    pub kint: f64,
    /// Modulus of sn.
    pub n: f64,
    pub b0: f64,
    pub b1: f64,
    pub mode: Case1Mode,
    pub formulary: Formulary,
    /// Initial value F(0) for numeric integration.
    pub f0: f64,
    /// Sign of F'(0) for numeric integration.
    pub ascending: bool,
}

impl Case1Params {
    /// Parameter list taken as given (numeric ODE mode).
    #[allow(clippy::too_many_arguments)]
    pub fn literal(
        alpha: f64,
        lambda: f64,
        k1: f64,
        k2: f64,
        k3: f64,
        c: f64,
        c1: f64,
        c2: f64,
        n: f64,
        f0: f64,
        formulary: Formulary,
    ) -> Self {
        Self {
            alpha,
            lambda,
            k1,
            k2,
            k3,
            c,
            c1,
            c2,
            c_a0: c,
            kint: 0.0,
            n,
            b0: f0,
            b1: 0.0,
            mode: Case1Mode::NumericOde,
            formulary,
            f0,
            ascending: true,
        }
    }

    /// sn ansatz constants from the published map
    /// `b₀ = 2αλk₃, b₁ = 8k₃²α²λ³, k₁ = n²/(256k₃⁴α⁴λ⁶), k₂ = 1/(2λαk₃)`,
    /// with C₁, C₂ and the constant-term "C" fixed by matching the quartic.
    pub fn printed_sn(alpha: f64, lambda: f64, k3: f64, n: f64, c: f64) -> Result<Self, ReductionError> {
        let b0 = 2.0 * alpha * lambda * k3;
        let b1 = 8.0 * k3 * k3 * alpha * alpha * lambda.powi(3);
        let k1 = n * n / (256.0 * k3.powi(4) * alpha.powi(4) * lambda.powi(6));
        let k2 = 1.0 / (2.0 * lambda * alpha * k3);
        let mut p = Self {
            alpha,
            lambda,
            k1,
            k2,
            k3,
            c,
            c1: 0.0,
            c2: 0.0,
            c_a0: c,
            kint: 0.0,
            n,
            b0,
            b1,
            mode: Case1Mode::ClosedFormSn,
            formulary: Formulary::Printed,
            f0: b0,
            ascending: b1 >= 0.0,
        };
        p.match_printed_quartic()?;
        Ok(p)
    }

    /// sn ansatz constants solving the re-derived first integral. `root`
    /// indexes the admissible roots in ascending order of `αk₃k₂λ`.
    pub fn lax_sn(alpha: f64, lambda: f64, k3: f64, n: f64, c: f64, root: usize) -> Result<Self, ReductionError> {
        let roots = lax_sn_roots(alpha, lambda, k3, n)?;
        let r = roots.get(root).ok_or_else(|| {
            ReductionError::NoRoot(format!("requested root {root}, only {} admissible", roots.len()))
        })?;
        let mut p = Self {
            alpha,
            lambda,
            k1: r.k1,
            k2: r.k2,
            k3,
            c,
            c1: 0.0,
            c2: 0.0,
            c_a0: c,
            kint: r.kint,
            n,
            b0: r.b0,
            b1: r.b1,
            mode: Case1Mode::ClosedFormSn,
            formulary: Formulary::Lax,
            f0: r.b0,
            ascending: r.b1 >= 0.0,
        };
        // The printed quartic is matched too, for reference.
        if p.match_printed_quartic().is_err() {
            p.c1 = f64::NAN;
            p.c2 = f64::NAN;
            p.c_a0 = f64::NAN;
        }
        Ok(p)
    }

    fn denom_scale(&self) -> f64 {
        self.k3 * self.alpha * self.k2.powi(3)
    }

    /// `A₀ … A₄` as printed.
    pub fn quartic(&self) -> [f64; 5] {
        let (a2, k2, k3) = (self.alpha * self.alpha, self.k2, self.k3);
        let (c1, c2, k1) = (self.c1, self.c2, self.k1);
        let k3s = k3 * k3;
        [
            2.0 * k3 * c1 * a2 * k2.powi(5) + 2.0 * k3s * c2 * a2 * k2.powi(5)
                + 4.0 * self.c_a0 * self.alpha * self.lambda * k2
                - 1.0,
            -(4.0 * k3s * c1 * a2 * k2.powi(6) + 6.0 * k3s * c2 * a2 * k2.powi(6)
                + 4.0 * k3 * self.alpha * self.lambda * k2 * k2
                - 2.0 * k2),
            2.0 * k3s * c1 * a2 * k2.powi(7) + 6.0 * k3s * c2 * a2 * k2.powi(7) + 4.0 * k3s * a2 * k1 * k2.powi(4),
            -2.0 * k3s * c2 * a2 * k2.powi(8) - 8.0 * k3s * a2 * k1 * k2.powi(5),
            4.0 * k3s * a2 * k1 * k2.powi(6),
        ]
    }

    /// Coefficients of the re-derived quartic `P(y)`, `y = 1 − k₂F`, with
    /// `F'² = P(y)/k₂²`.
    pub fn lax_quartic(&self) -> [f64; 5] {
        let beta = self.alpha * self.k3 * self.k2;
        let bk = (beta * self.k2).powi(2);
        let bl = beta * self.lambda;
        let c2 = (-24.0 * bl * bl + 12.0 * bl - 1.0) / bk;
        let c1 = 4.0 * (1.0 - 4.0 * bl) / bk;
        [1.0 / bk, -0.5 * c1, -c2, self.kint, 4.0 * self.k1 / (self.k2 * self.k2)]
    }

    /// `R(F)` with `F'² = R(F)`.
    pub fn radicand(&self) -> Radicand {
        let c: Vec<f64> = match self.formulary {
            Formulary::Printed => {
                let d = self.denom_scale();
                poly::scale(&self.quartic(), 1.0 / (d * d))
            }
            Formulary::Lax => {
                let p = poly::compose_linear(&self.lax_quartic(), 1.0, -self.k2);
                poly::scale(&p, 1.0 / (self.k2 * self.k2))
            }
        };
        let mut out = [0.0; 5];
        out[..c.len().min(5)].copy_from_slice(&c[..c.len().min(5)]);
        Radicand { c: out }
    }

    /// Fix `C₂`, `C₁` and the constant-term "C" so the printed quartic equals
    /// `(k₃αk₂³ b₁ cn dn)²` written in `F`; the `F⁴` and `F¹` coefficients are
    /// then consistency checks.
    pub fn match_printed_quartic(&mut self) -> Result<(), ReductionError> {
        let target = sn_target(self.b0, self.b1, self.n, self.denom_scale());
        let (a2, k2, k3) = (self.alpha * self.alpha, self.k2, self.k3);
        let k3s = k3 * k3;
        self.c2 = -(target[3] + 8.0 * k3s * a2 * self.k1 * k2.powi(5)) / (2.0 * k3s * a2 * k2.powi(8));
        self.c1 = (target[2] - 6.0 * k3s * self.c2 * a2 * k2.powi(7) - 4.0 * k3s * a2 * self.k1 * k2.powi(4))
            / (2.0 * k3s * a2 * k2.powi(7));
        self.c_a0 = (target[0] + 1.0 - 2.0 * k3 * self.c1 * a2 * k2.powi(5) - 2.0 * k3s * self.c2 * a2 * k2.powi(5))
            / (4.0 * self.alpha * self.lambda * k2);
        let a = self.quartic();
        for i in [4usize, 1] {
            let scale = a[i].abs().max(target[i].abs()).max(f64::MIN_POSITIVE);
            if (a[i] - target[i]).abs() > 1e-10 * scale {
                return Err(ReductionError::ConstraintViolation(format!(
                    "F^{i} coefficient of the quartic is {:e}, the sn ansatz requires {:e}",
                    a[i], target[i]
                )));
            }
        }
        Ok(())
    }

    /// Invariants required before assembling a bundle.
    pub fn validate(&self) -> Result<(), ReductionError> {
        let all = [
            self.alpha, self.lambda, self.k1, self.k2, self.k3, self.c, self.n, self.b0, self.b1, self.f0,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ReductionError::ConstraintViolation("non-finite parameter".into()));
        }
        if self.k1 <= 0.0 {
            return Err(ReductionError::ConstraintViolation(format!("k1 = {} must be positive", self.k1)));
        }
        if self.k2 == 0.0 || self.k3 == 0.0 || self.alpha == 0.0 || self.c == 0.0 {
            return Err(ReductionError::ConstraintViolation("k2, k3, alpha and C must be nonzero".into()));
        }
        if !(0.0..1.0).contains(&self.n) {
            return Err(ReductionError::ConstraintViolation(format!("modulus n = {} outside [0, 1)", self.n)));
        }
        if self.mode == Case1Mode::ClosedFormSn {
            let y0 = 1.0 - self.k2 * self.b0;
            let y1 = self.k2 * self.b1;
            if y0.abs() <= y1.abs() * (1.0 + 1e-12) {
                return Err(ReductionError::ConstraintViolation(format!(
                    "k2·F − 1 vanishes where sn = {} (1 − k2·b0 = {}, k2·b1 = {})",
                    if y1 != 0.0 { y0 / y1 } else { 0.0 },
                    y0,
                    y1
                )));
            }
            let prof = SnProfile {
                b0: self.b0,
                b1: self.b1,
                k: self.n,
            };
            let rad = self.radicand();
            let period = 4.0 * ellip_k(self.n)?;
            for i in 0..64 {
                let xi = period * i as f64 / 64.0;
                let (f, fp, _) = prof.eval(xi)?;
                let scale = rad.scale(f).max(fp * fp);
                if (fp * fp - rad.eval(f)).abs() > 1e-10 * scale {
                    return Err(ReductionError::ConstraintViolation(format!(
                        "sn profile misses the first integral at ξ = {xi}: F'² = {:e}, R(F) = {:e}",
                        fp * fp,
                        rad.eval(f)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Coefficients in `F` of `d²·b₁²(1 − (1+n²)s² + n²s⁴)`, `s = (F − b₀)/b₁`.
fn sn_target(b0: f64, b1: f64, n: f64, d: f64) -> [f64; 5] {
    let m = n * n;
    let w = m / (b1 * b1);
    let d2 = d * d;
    [
        d2 * (b1 * b1 - (1.0 + m) * b0 * b0 + w * b0.powi(4)),
        d2 * (2.0 * (1.0 + m) * b0 - 4.0 * w * b0.powi(3)),
        d2 * (-(1.0 + m) + 6.0 * w * b0 * b0),
        -4.0 * d2 * w * b0,
        d2 * w,
    ]
}

/// `F_ξ = √(A₀ + … + A₄F⁴)/(k₃αk₂³)` with the printed coefficients.
pub fn case1_ode_rhs(f: f64, p: &Case1Params) -> Result<f64, ReductionError> {
    let a = p.quartic();
    let r = poly::eval(&a, f);
    let scale = a.iter().enumerate().map(|(i, c)| (c * f.powi(i as i32)).abs()).fold(0.0, f64::max);
    if r < -1e-14 * scale {
        return Err(ReductionError::NegativeRadicand { f, value: r });
    }
    Ok(r.max(0.0).sqrt() / p.denom_scale())
}

/// Closed-form profile `b₀ + b₁ sn(ξ, n)`.
pub fn case1_closed_form(p: &Case1Params) -> Result<SnProfile, ReductionError> {
    p.validate()?;
    Ok(SnProfile {
        b0: p.b0,
        b1: p.b1,
        k: p.n,
    })
}

/// Numeric profile from `F(0) = F0` over `interval`.
pub fn case1_ode_integrate(
    p: &Case1Params,
    f0: f64,
    interval: (f64, f64),
    tol: f64,
) -> Result<DenseSolution, ReductionError> {
    let h_max = ((interval.1 - interval.0) / 200.0).max(1e-6);
    DenseSolution::integrate(p.radicand(), f0, p.ascending, interval.0, interval.1, tol, h_max)
}

/// One solution of the re-derived sn constraint map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaxSnRoot {
    /// `αk₃k₂λ`.
    pub mu: f64,
    pub k1: f64,
    pub k2: f64,
    pub y0: f64,
    pub y1: f64,
    pub kint: f64,
    pub b0: f64,
    pub b1: f64,
}

// The returned `q` is `k₁/k₂²`, the only combination of k₁ the quartic sees.
fn lax_sn_candidate(mu: f64, lam4: f64, m: f64) -> Option<(f64, f64, f64)> {
    let b = mu.powi(4) / lam4;
    let c2 = (-24.0 * mu * mu + 12.0 * mu - 1.0) / b;
    let q = 2.0 * (1.0 + m) * b - 24.0 * mu * mu + 12.0 * mu - 1.0;
    let y0 = -3.0 * (1.0 - 4.0 * mu) / q;
    let k1 = (1.0 + m - c2) / (24.0 * y0 * y0);
    if !(y0.is_finite() && k1.is_finite()) {
        return None;
    }
    Some((b, y0, k1))
}

/// Residual of the constant coefficient, relative to its largest term.
fn lax_sn_mismatch(mu: f64, lam4: f64, m: f64) -> f64 {
    match lax_sn_candidate(mu, lam4, m) {
        Some((b, y0, k1)) => {
            let terms = [m / (4.0 * k1), -(1.0 + m) * y0 * y0, 4.0 * k1 * y0.powi(4), -1.0 / b];
            terms.iter().sum::<f64>() / terms.iter().map(|t| t.abs()).fold(0.0, f64::max)
        }
        None => f64::NAN,
    }
}

/// All admissible roots (`k₁ > 0`, `|y₀| > y₁`) in ascending order of μ.
pub fn lax_sn_roots(alpha: f64, lambda: f64, k3: f64, n: f64) -> Result<Vec<LaxSnRoot>, ReductionError> {
    let lam4 = lambda.powi(4) * alpha * alpha * k3 * k3;
    if lam4 == 0.0 || !lam4.is_finite() {
        return Err(ReductionError::NoRoot("λ, α and k3 must be nonzero".into()));
    }
    let m = n * n;
    let per_decade = 2000;
    let (lo, hi) = (-8i32, 4i32);
    let mut grid = Vec::new();
    for i in (0..=(hi - lo) * per_decade).rev() {
        grid.push(-(10f64).powf(lo as f64 + i as f64 / per_decade as f64));
    }
    for i in 0..=(hi - lo) * per_decade {
        grid.push((10f64).powf(lo as f64 + i as f64 / per_decade as f64));
    }
    let h = |mu: f64| lax_sn_mismatch(mu, lam4, m);
    let mut out = Vec::new();
    for mu in poly::bracket_roots(&h, &grid) {
        if h(mu).abs() > 1e-8 {
            continue; // sign change across a pole
        }
        let Some((_, y0, q)) = lax_sn_candidate(mu, lam4, m) else {
            continue;
        };
        if q <= 0.0 {
            continue;
        }
        let y1 = (m / (4.0 * q)).sqrt();
        if y0.abs() <= y1 {
            continue;
        }
        let k2 = mu / (lambda * alpha * k3);
        let k1 = q * k2 * k2;
        out.push(LaxSnRoot {
            mu,
            k1,
            k2,
            y0,
            y1,
            kint: -16.0 * q * y0,
            b0: (1.0 - y0) / k2,
            b1: y1 / k2,
        });
    }
    Ok(out)
}

/// Profiles and their Taylor series about one ξ.
#[derive(Clone, Debug)]
pub struct Case1Profiles {
    pub f: Series<f64>,
    pub f1: Series<f64>,
    pub f2: Series<f64>,
    pub f3: Series<f64>,
    pub f4: Series<f64>,
    pub f5: Series<f64>,
}

/// Profile F plus the quadratures for F₁ and ln F₂, ready for evaluation.
#[derive(Clone)]
pub struct Case1Reduction {
    pub params: Case1Params,
    profile: Arc<dyn Profile>,
    f1: Primitive,
    lg: Primitive,
    /// Zeros of `1 − k₂F` bounding the usable window (numeric mode).
    poles: (Option<f64>, Option<f64>),
    window: (f64, f64),
}

impl std::fmt::Debug for Case1Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Case1Reduction")
            .field("params", &self.params)
            .field("profile", &self.profile)
            .field("poles", &self.poles)
            .field("window", &self.window)
            .finish()
    }
}

fn g_of(p: &Case1Params, f: f64, fp: f64) -> f64 {
    let (a, k2, k3, l) = (p.alpha, p.k2, p.k3, p.lambda);
    (k3 * a * k2 * k2 * fp + (2.0 * k3 * a * l * k2 - 1.0) * f - 2.0 * k3 * a * l)
        / (2.0 * k3 * a * k2 * (k2 * f - 1.0))
}

impl Case1Reduction {
    /// `window` is the ξ-range needed (numeric mode only; closed forms are periodic).
    pub fn new(params: Case1Params, window: (f64, f64), tol: f64) -> Result<Self, ReductionError> {
        params.validate()?;
        let quad_tol = 1e-13;
        match params.mode {
            Case1Mode::ClosedFormSn => {
                let prof = Arc::new(case1_closed_form(&params)?);
                let period = 4.0 * ellip_k(params.n)?;
                let pf = prof.clone();
                let ff: RealFn = Arc::new(move |x| pf.eval(x).map(|v| v.0).unwrap_or(f64::NAN));
                let pg = prof.clone();
                let pp = params.clone();
                let gf: RealFn = Arc::new(move |x| {
                    pg.eval(x)
                        .map(|(f, fp, _)| g_of(&pp, f, fp))
                        .unwrap_or(f64::NAN)
                });
                Ok(Self {
                    f1: Primitive::periodic(ff, period, 64, quad_tol)?,
                    lg: Primitive::periodic(gf, period, 64, quad_tol)?,
                    profile: prof,
                    params,
                    poles: (None, None),
                    window: (f64::NEG_INFINITY, f64::INFINITY),
                })
            }
            Case1Mode::NumericOde => {
                let (lo, hi) = (window.0.min(0.0), window.1.max(0.0));
                let sol = case1_ode_integrate(&params, params.f0, (lo, hi), tol)?;
                let prof = Arc::new(NumericProfile(sol));
                let y = |x: f64| prof.eval(x).map(|v| 1.0 - params.k2 * v.0).unwrap_or(f64::NAN);
                if y(0.0).abs() < 1e-12 {
                    return Err(ReductionError::DenominatorZero { at: 0.0 });
                }
                let samples = 4000;
                let step = |i: usize, a: f64, b: f64| a + (b - a) * i as f64 / samples as f64;
                let right: Vec<f64> = (0..=samples).map(|i| step(i, 0.0, hi)).collect();
                let left: Vec<f64> = (0..=samples).map(|i| step(i, 0.0, lo)).collect();
                let pr = poly::bracket_roots(&y, &right).into_iter().next();
                let pl = poly::bracket_roots(&y, &left).into_iter().next();
                let margin = 1e-6;
                let (wlo, whi) = (pl.map_or(lo, |p| p + margin), pr.map_or(hi, |p| p - margin));
                let h = ((whi - wlo) / 256.0).max(1e-6);
                let pf = prof.clone();
                let ff: RealFn = Arc::new(move |x| pf.eval(x).map(|v| v.0).unwrap_or(f64::NAN));
                let pg = prof.clone();
                let pp = params.clone();
                let gf: RealFn = Arc::new(move |x| {
                    pg.eval(x)
                        .map(|(f, fp, _)| g_of(&pp, f, fp))
                        .unwrap_or(f64::NAN)
                });
                Ok(Self {
                    f1: Primitive::window(ff, wlo, whi, h, quad_tol)?,
                    lg: Primitive::window(gf, wlo, whi, h, quad_tol)?,
                    profile: prof,
                    params,
                    poles: (pl, pr),
                    window: (wlo, whi),
                })
            }
        }
    }

    pub fn profile(&self) -> &dyn Profile {
        self.profile.as_ref()
    }

    /// Nearest zeros of `1 − k₂F` left and right of ξ = 0, if any.
    pub fn poles(&self) -> (Option<f64>, Option<f64>) {
        self.poles
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// `F₁(ξ) = ∫₀^ξ F`.
    pub fn f1(&self, xi: f64) -> Result<f64, ReductionError> {
        self.guard(xi)?;
        self.f1.eval(xi)
    }

    /// `ln(F₂/C) = ∫₀^ξ g`.
    pub fn log_f2(&self, xi: f64) -> Result<f64, ReductionError> {
        self.guard(xi)?;
        self.lg.eval(xi)
    }

    fn guard(&self, xi: f64) -> Result<(), ReductionError> {
        if let Some(p) = self.poles.1 {
            if xi >= self.window.1 {
                return Err(ReductionError::DenominatorZero { at: p });
            }
        }
        if let Some(p) = self.poles.0 {
            if xi <= self.window.0 {
                return Err(ReductionError::DenominatorZero { at: p });
            }
        }
        Ok(())
    }

    /// Series of F and F₁…F₅ about `xi`.
    pub fn profiles(&self, xi: f64) -> Result<Case1Profiles, ReductionError> {
        self.guard(xi)?;
        let p = &self.params;
        let (a, k1, k2, k3, l) = (p.alpha, p.k1, p.k2, p.k3, p.lambda);
        let f = self.profile.series(xi)?;
        let fp = f.derivative();
        let f1 = f.integrate(self.f1.eval(xi)?);
        let den = f.scale(k2).add_scalar(-1.0);
        if den.value().abs() < 1e-14 {
            return Err(ReductionError::DenominatorZero { at: xi });
        }
        let num = fp.scale(k3 * a * k2 * k2) + f.scale(2.0 * k3 * a * l * k2 - 1.0);
        let g = num
            .add_scalar(-2.0 * k3 * a * l)
            .checked_div(&den.scale(2.0 * k3 * a * k2))?;
        let f2 = g.integrate(self.lg.eval(xi)?).exp().scale(p.c);
        let one_m = f.scale(-k2).add_scalar(1.0);
        let f3 = one_m.scale(k1).checked_div(&f2)?;
        let f2sq = f2 * f2;
        let (f4, f5) = match p.formulary {
            Formulary::Printed => {
                let n4 = fp.scale(k2 * k2 * k3 * a) + f.scale(k1 - 4.0 * k1 * k2 * l * k3 * a);
                let f4 = n4
                    .add_scalar(4.0 * k1 * l * k3 * a)
                    .checked_div(&f2sq.scale(2.0 * k3 * a))?;
                let n5 = (fp.scale(k2 * k2 * k3 * a) + f.scale(4.0 * k1 * l * k3 * a + 1.0))
                    .add_scalar(-4.0 * l * k3 * a);
                let d5 = (f * f).scale(2.0 * k3 * a * k2 * k2) + f.scale(-4.0 * k3 * a * k1 * k2);
                let f5 = (f2sq * n5).checked_div(&d5.add_scalar(2.0 * k3 * a * k1))?;
                (f4, f5)
            }
            Formulary::Lax => {
                let n4 = (f.scale(1.0 - 4.0 * a * k2 * k3 * l) + fp.scale(a * k2 * k2 * k3))
                    .add_scalar(4.0 * a * k3 * l);
                let f4 = n4.scale(k1).checked_div(&f2sq.scale(2.0 * a * k3))?;
                let n5 = (f.scale(4.0 * a * k2 * k3 * l - 1.0) + fp.scale(a * k2 * k2 * k3))
                    .add_scalar(-4.0 * a * k3 * l);
                let f5 = (f2sq * n5).checked_div(&(den * den).scale(2.0 * a * k1 * k3))?;
                (f4, f5)
            }
        };
        Ok(Case1Profiles {
            f,
            f1,
            f2,
            f3,
            f4,
            f5,
        })
    }
}

/// sn values along one period, for tests and tables.
pub fn sn_profile_samples(p: &Case1Params, count: usize) -> Result<Vec<(f64, f64)>, ReductionError> {
    let period = 4.0 * ellip_k(p.n)?;
    (0..count)
        .map(|i| {
            let xi = period * i as f64 / count as f64;
            let (s, _, _) = jacobi_sn_cn_dn(xi, p.n)?;
            Ok((xi, p.b0 + p.b1 * s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_map_constants() {
        let p = Case1Params::printed_sn(1.0, 0.1, 0.5, 0.1, 1.0).unwrap();
        assert!((p.b0 - 0.1).abs() < 1e-16);
        assert!((p.b1 - 0.002).abs() < 1e-17);
        assert!((p.k2 - 10.0).abs() < 1e-13);
        assert!((p.k1 - 625.0).abs() < 1e-9);
    }

    #[test]
    fn leading_quartic_coefficient() {
        let p = Case1Params::printed_sn(1.0, 0.1, 0.5, 0.1, 1.0).unwrap();
        assert!((p.quartic()[4] - 6.25e8).abs() < 1e-3);
    }

    #[test]
    fn printed_map_has_pole_in_g() {
        let p = Case1Params::printed_sn(1.0, 0.1, 0.5, 0.1, 1.0).unwrap();
        assert!(matches!(p.validate(), Err(ReductionError::ConstraintViolation(_))));
    }

    #[test]
    fn lax_roots_at_reference_point() {
        let roots = lax_sn_roots(1.0, 0.1, 0.5, 0.1).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].mu + 0.0452529897933419).abs() < 1e-13);
        assert!((roots[1].mu - 0.0381537363642140).abs() < 1e-13);
    }

    #[test]
    fn lax_sn_solves_its_first_integral() {
        for root in 0..2 {
            let p = Case1Params::lax_sn(1.0, 0.1, 0.5, 0.1, 1.0, root).unwrap();
            p.validate().unwrap();
        }
    }

    #[test]
    fn rhs_vanishes_at_turning_point() {
        let p = Case1Params::printed_sn(1.0, 0.1, 0.5, 0.1, 1.0).unwrap();
        let top = p.b0 + p.b1;
        let r = case1_ode_rhs(top, &p).unwrap();
        let scale = p.quartic()[4].sqrt() * top * top / p.denom_scale();
        assert!(r.abs() < 1e-6 * scale, "{r}");
    }

    #[test]
    fn quadratures_at_origin() {
        let p = Case1Params::lax_sn(1.0, 0.1, 0.5, 0.1, 2.0, 1).unwrap();
        let red = Case1Reduction::new(p.clone(), (-1.0, 1.0), 1e-12).unwrap();
        let pr = red.profiles(0.0).unwrap();
        assert_eq!(pr.f1.value(), 0.0);
        assert!((pr.f2.value() - 2.0).abs() < 1e-15);
        let prod = pr.f2.value() * pr.f3.value();
        assert!((prod - p.k1 * (1.0 - p.k2 * pr.f.value())).abs() < 1e-12 * prod.abs());
    }
}
