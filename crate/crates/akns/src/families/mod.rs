//! Solution bundles of the prolonged system `(u, v, δ, φ₁, φ₂, f)`.

mod delta;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use delta::DeltaProfile;

use crate::jet::{Axis, Field, Jet2D, JetError, Series};
use crate::reduction::{Case1Reduction, Case2Reduction, ReductionError};
use crate::specfun::SpecfunError;

/// `|1 + εf|` below this is a singular gauge point.
pub const GAUGE_THRESHOLD: f64 = 1e-8;
/// `|F̃₁ + k₃t|` below this (relative) is a pole of the Case-2 family.
pub const POLE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("singular gauge |1 + εf| < {GAUGE_THRESHOLD:e} at (x, t) = ({x}, {t})")]
    SingularGauge { x: f64, t: f64 },
    #[error("pole at (x, t) = ({x}, {t})")]
    Pole { x: f64, t: f64 },
    #[error("profile quadrature failed at (x, t) = ({x}, {t}): {source}")]
    AssemblyDomain { x: f64, t: f64, source: ReductionError },
    #[error("this family has imaginary fields and needs complex scalars")]
    NeedsComplex,
    #[error("parameter {0} is complex but scalars are real")]
    ComplexParameter(&'static str),
    #[error("the finite transformation requires λ = 0, got {0}")]
    LambdaNonzero(Complex64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

impl FamilyError {
    /// Errors that mark a point as excluded rather than failing a sweep.
    pub fn is_mask(&self) -> bool {
        matches!(
            self,
            FamilyError::SingularGauge { .. }
                | FamilyError::Pole { .. }
                | FamilyError::AssemblyDomain {
                    source: ReductionError::Pole { .. } | ReductionError::DenominatorZero { .. },
                    ..
                }
        )
    }
}

/// A possibly complex parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Scalar {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }
    pub fn c64(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<f64> for Scalar {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: Scalar,
    pub lambda: Scalar,
    pub delta: DeltaProfile,
}

impl ModelParams {
    pub fn alpha<S: Field>(&self) -> Result<S, FamilyError> {
        S::from_c64(self.alpha.c64()).ok_or(FamilyError::ComplexParameter("alpha"))
    }
    pub fn lambda<S: Field>(&self) -> Result<S, FamilyError> {
        S::from_c64(self.lambda.c64()).ok_or(FamilyError::ComplexParameter("lambda"))
    }
}

/// The six fields as jets at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fields<S> {
    pub u: Jet2D<S>,
    pub v: Jet2D<S>,
    pub delta: Jet2D<S>,
    pub phi1: Jet2D<S>,
    pub phi2: Jet2D<S>,
    pub f: Jet2D<S>,
}

impl<S: Field> Fields<S> {
    pub fn as_array(&self) -> [&Jet2D<S>; 6] {
        [&self.u, &self.v, &self.delta, &self.phi1, &self.phi2, &self.f]
    }
}

pub const FIELD_NAMES: [&str; 6] = ["u", "v", "delta", "phi1", "phi2", "f"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldName {
    U,
    V,
    Delta,
    Phi1,
    Phi2,
    F,
}

impl std::str::FromStr for FieldName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "u" => Self::U,
            "v" => Self::V,
            "delta" => Self::Delta,
            "phi1" => Self::Phi1,
            "phi2" => Self::Phi2,
            "f" => Self::F,
            _ => return Err(format!("unknown field `{s}`")),
        })
    }
}

/// Deliberate corruptions, used to check that residuals detect non-solutions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Probe {
    /// Add a constant to one field.
    Add(FieldName, f64),
    /// Add the coordinate `x` to one field.
    AddX(FieldName),
    /// Exchange φ₁ and φ₂.
    SwapPhi,
}

#[derive(Clone, Debug)]
pub enum Bundle {
    Seed { params: ModelParams },
    Transform { base: Box<Bundle>, eps: f64 },
    Case1 { red: Arc<Case1Reduction>, params: ModelParams },
    Case2 { red: Arc<Case2Reduction>, params: ModelParams },
    Probed { base: Box<Bundle>, probe: Probe },
}

/// Seed soliton with constant or time-dependent δ.
pub fn seed_soliton(alpha: Scalar, delta: DeltaProfile) -> Result<Bundle, FamilyError> {
    if alpha.re == 0.0 && alpha.im == 0.0 {
        return Err(FamilyError::InvalidParams("alpha must be nonzero".into()));
    }
    Ok(Bundle::Seed {
        params: ModelParams {
            alpha,
            lambda: Scalar::real(0.0),
            delta,
        },
    })
}

/// Finite symmetry transformation with group parameter `eps`.
pub fn finite_transform(s: &Bundle, eps: f64) -> Result<Bundle, FamilyError> {
    let lambda = s.params().lambda.c64();
    if lambda != Complex64::new(0.0, 0.0) {
        return Err(FamilyError::LambdaNonzero(lambda));
    }
    if !eps.is_finite() {
        return Err(FamilyError::InvalidParams("eps must be finite".into()));
    }
    Ok(Bundle::Transform {
        base: Box::new(s.clone()),
        eps,
    })
}

pub fn case1_bundle(red: Case1Reduction) -> Bundle {
    let p = &red.params;
    let params = ModelParams {
        alpha: Scalar::real(p.alpha),
        lambda: Scalar::real(p.lambda),
        delta: DeltaProfile::Constant(p.k3),
    };
    Bundle::Case1 {
        red: Arc::new(red),
        params,
    }
}

pub fn case2_bundle(red: Case2Reduction) -> Bundle {
    let p = &red.params;
    let params = ModelParams {
        alpha: Scalar::real(p.alpha),
        lambda: Scalar::real(p.lambda),
        delta: DeltaProfile::Constant(p.ct),
    };
    Bundle::Case2 {
        red: Arc::new(red),
        params,
    }
}

fn lift<S: Field>(s: &Series<f64>) -> Series<S> {
    let c: Vec<S> = s.coeffs().iter().map(|v| S::from_f64(*v)).collect();
    Series::from_coeffs(&c).with_order(s.order())
}

fn reduction_at(x: f64, t: f64, e: ReductionError) -> FamilyError {
    match e {
        ReductionError::Pole { .. } => FamilyError::Pole { x, t },
        other => FamilyError::AssemblyDomain { x, t, source: other },
    }
}

impl Bundle {
    pub fn params(&self) -> &ModelParams {
        match self {
            Bundle::Seed { params } | Bundle::Case1 { params, .. } | Bundle::Case2 { params, .. } => params,
            Bundle::Transform { base, .. } | Bundle::Probed { base, .. } => base.params(),
        }
    }

    /// Human-readable provenance.
    pub fn label(&self) -> String {
        match self {
            Bundle::Seed { params } => format!("seed(alpha={})", fmt_scalar(params.alpha)),
            Bundle::Transform { base, eps } => format!("transform({}, eps={eps})", base.label()),
            Bundle::Case1 { red, .. } => format!(
                "case1({:?}, {:?}, k1={}, k2={}, k3={})",
                red.params.mode, red.params.formulary, red.params.k1, red.params.k2, red.params.k3
            ),
            Bundle::Case2 { red, .. } => format!(
                "case2({:?}, branch={:?}, k1={}, k2={}, k3={})",
                red.params.formulary, red.params.branch, red.params.k1, red.params.k2, red.params.k3
            ),
            Bundle::Probed { base, probe } => format!("probed({}, {probe:?})", base.label()),
        }
    }

    /// Whether real scalars suffice.
    pub fn needs_complex(&self) -> bool {
        match self {
            Bundle::Seed { params } => params.alpha.im != 0.0 || params.delta.is_complex(),
            Bundle::Case1 { .. } => true,
            Bundle::Case2 { .. } => false,
            Bundle::Transform { base, .. } | Bundle::Probed { base, .. } => base.needs_complex(),
        }
    }

    /// All six fields as jets at `(x, t)`.
    pub fn eval<S: Field>(&self, x: f64, t: f64) -> Result<Fields<S>, FamilyError> {
        match self {
            Bundle::Seed { params } => {
                let alpha: S = params.alpha()?;
                let tj = Jet2D::<S>::coord(Axis::T, x, t);
                let xj = Jet2D::<S>::coord(Axis::X, x, t);
                let theta = params.delta.integral_jet(&tj)?.mul_scalar(alpha).scale(2.0) - xj;
                let (minus, plus) = theta.tanh_complements()?;
                Ok(Fields {
                    u: -plus,
                    v: minus,
                    delta: params.delta.jet(&tj)?,
                    phi1: minus,
                    phi2: plus,
                    f: -minus,
                })
            }
            Bundle::Transform { base, eps } => {
                let b = base.eval::<S>(x, t)?;
                if *eps == 0.0 {
                    return Ok(b);
                }
                let g = b.f.scale(*eps).add_scalar(S::one());
                if g.value().abs() < GAUGE_THRESHOLD {
                    return Err(FamilyError::SingularGauge { x, t });
                }
                let r = g.recip()?;
                Ok(Fields {
                    u: b.u + (b.phi2 * b.phi2 * r).scale(*eps),
                    v: b.v + (b.phi1 * b.phi1 * r).scale(*eps),
                    delta: b.delta,
                    phi1: b.phi1 * r,
                    phi2: b.phi2 * r,
                    f: b.f * r,
                })
            }
            Bundle::Case1 { red, .. } => {
                let i = S::imag_unit().ok_or(FamilyError::NeedsComplex)?;
                let p = &red.params;
                let xi = Jet2D::<S>::coord(Axis::T, x, t) - Jet2D::<S>::coord(Axis::X, x, t).scale(p.k2);
                let pr = red.profiles(xi.value().re()).map_err(|e| reduction_at(x, t, e))?;
                let sk = p.k1.sqrt();
                let comp = |s: &Series<f64>| lift::<S>(s).compose(&xi);
                let (f1, f2, f3, f4, f5) = (comp(&pr.f1), comp(&pr.f2), comp(&pr.f3), comp(&pr.f4), comp(&pr.f5));
                let theta = (f1 + Jet2D::coord(Axis::X, x, t)).scale(sk);
                let (th, sech) = theta.tanh_sech();
                Ok(Fields {
                    u: f4 - (f3 * f3 * th).scale(1.0 / sk),
                    v: f5 - (f2 * f2 * th).scale(1.0 / sk),
                    delta: Jet2D::constant(S::from_f64(p.k3), x, t),
                    phi1: (f2 * sech).mul_scalar(i),
                    phi2: (f3 * sech).mul_scalar(i),
                    f: th.scale(sk),
                })
            }
            Bundle::Case2 { red, .. } => {
                let p = &red.params;
                let tj = Jet2D::<S>::coord(Axis::T, x, t);
                let vs = Jet2D::<S>::coord(Axis::X, x, t) - tj.scale(p.k1);
                let pr = red.profiles(vs.value().re()).map_err(|e| reduction_at(x, t, e))?;
                let comp = |s: &Series<f64>| lift::<S>(s).compose(&vs);
                let (f1, f2, f3, f4, f5) = (comp(&pr.f1), comp(&pr.f2), comp(&pr.f3), comp(&pr.f4), comp(&pr.f5));
                let r = f1 + tj.scale(p.k3);
                let rscale = pr.f1.value().abs().max((p.k3 * t).abs()).max(1.0);
                if r.value().abs() < POLE_THRESHOLD * rscale {
                    return Err(FamilyError::Pole { x, t });
                }
                let ri = r.recip()?;
                let e1 = tj.scale(p.k2).exp();
                let em1 = tj.scale(-p.k2).exp();
                Ok(Fields {
                    u: e1 * e1 * (f4 - f3 * f3 * ri),
                    v: em1 * em1 * (f5 - f2 * f2 * ri),
                    delta: Jet2D::constant(S::from_f64(p.ct), x, t),
                    phi1: em1 * f2 * ri,
                    phi2: e1 * f3 * ri,
                    f: ri,
                })
            }
            Bundle::Probed { base, probe } => {
                let mut b = base.eval::<S>(x, t)?;
                match *probe {
                    Probe::Add(name, c) => {
                        let j = field_mut(&mut b, name);
                        *j = j.add_scalar(S::from_f64(c));
                    }
                    Probe::AddX(name) => {
                        let j = field_mut(&mut b, name);
                        *j = *j + Jet2D::coord(Axis::X, x, t);
                    }
                    Probe::SwapPhi => std::mem::swap(&mut b.phi1, &mut b.phi2),
                }
                Ok(b)
            }
        }
    }

    /// Real functions of `(x, t)` whose zeros are the singular loci of this
    /// bundle (used to list excluded points).
    pub fn singular_indicators(&self, x: f64, t: f64) -> Vec<f64> {
        match self {
            Bundle::Transform { base, eps } => {
                let mut out = base.singular_indicators(x, t);
                if *eps != 0.0 {
                    let v = base
                        .eval::<Complex64>(x, t)
                        .map(|b| 1.0 + eps * b.f.value().re)
                        .unwrap_or(f64::NAN);
                    out.push(v);
                }
                out
            }
            Bundle::Probed { base, .. } => base.singular_indicators(x, t),
            _ => Vec::new(),
        }
    }
}

fn field_mut<S>(b: &mut Fields<S>, name: FieldName) -> &mut Jet2D<S> {
    match name {
        FieldName::U => &mut b.u,
        FieldName::V => &mut b.v,
        FieldName::Delta => &mut b.delta,
        FieldName::Phi1 => &mut b.phi1,
        FieldName::Phi2 => &mut b.phi2,
        FieldName::F => &mut b.f,
    }
}

fn fmt_scalar(s: Scalar) -> String {
    if s.im == 0.0 {
        format!("{}", s.re)
    } else {
        format!("{}{:+}i", s.re, s.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed() -> Bundle {
        seed_soliton(Scalar::real(1.0), DeltaProfile::Constant(1.0)).unwrap()
    }

    #[test]
    fn seed_at_origin() {
        let f = seed().eval::<f64>(0.0, 0.0).unwrap();
        assert_eq!(f.u.value(), -1.0);
        assert_eq!(f.v.value(), 1.0);
        assert_eq!(f.phi1.value(), 1.0);
        assert_eq!(f.phi2.value(), 1.0);
        assert_eq!(f.f.value(), -1.0);
    }

    #[test]
    fn seed_u_at_one() {
        let f = seed().eval::<f64>(1.0, 0.0).unwrap();
        assert!((f.u.value() - (-0.2384058440442351)).abs() < 1e-16);
    }

    #[test]
    fn transform_worked_value() {
        let b = finite_transform(&seed(), 0.3).unwrap();
        let f = b.eval::<f64>(0.0, 0.0).unwrap();
        assert!((f.u.value() - (-0.5714285714285714)).abs() < 1e-15);
    }

    #[test]
    fn transform_zero_is_identity() {
        let s = seed();
        let b = finite_transform(&s, 0.0).unwrap();
        assert_eq!(b.eval::<f64>(0.4, -0.2).unwrap(), s.eval::<f64>(0.4, -0.2).unwrap());
    }

    #[test]
    fn singular_gauge_is_masked() {
        let b = finite_transform(&seed(), 0.9).unwrap();
        // 1 + 0.9(tanh θ − 1) = 0 at θ = atanh(−1/9), x = 2t − θ.
        let x = -(-1.0f64 / 9.0).atanh();
        let err = b.eval::<f64>(x, 0.0).unwrap_err();
        assert!(err.is_mask(), "{err}");
    }

    #[test]
    fn case1_needs_complex() {
        use crate::reduction::{Case1Params, Case1Reduction};
        let p = Case1Params::lax_sn(1.0, 0.1, 0.5, 0.1, 1.0, 1).unwrap();
        let b = case1_bundle(Case1Reduction::new(p, (0.0, 0.0), 1e-12).unwrap());
        assert_eq!(b.eval::<f64>(0.0, 0.0).unwrap_err(), FamilyError::NeedsComplex);
        let f = b.eval::<Complex64>(0.0, 0.0).unwrap();
        assert_eq!(f.f.value(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn lambda_must_vanish_for_transform() {
        use crate::reduction::{case2_branches, Case2Reduction, Formulary};
        use crate::specfun::EllipticModulus;
        let p = case2_branches(1.0, 1.0, 0.1, EllipticModulus::new(0.5).unwrap(), 1.0, Formulary::Lax, 0.0)
            .unwrap()
            .remove(1);
        let b = case2_bundle(Case2Reduction::new(p, (0.0, 0.0), 1e-12).unwrap());
        assert!(matches!(finite_transform(&b, 0.1), Err(FamilyError::LambdaNonzero(_))));
    }
}
