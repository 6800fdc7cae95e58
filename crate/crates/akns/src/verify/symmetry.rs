//! Residuals of the linearized system on the characteristic of a symmetry
//! generator.

use serde::{Deserialize, Serialize};

use super::{Acc, Residual, VerifyError};
use crate::families::{Bundle, Fields};
use crate::jet::{Axis, Field, Jet2D};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorMode {
    /// Acts on `(u, v, δ)` only.
    #[default]
    Original,
    /// Also acts on `φ₁, φ₂, f`.
    Enlarged,
}

/// Constants of the generator together with the free function `F(t)`,
/// given by its ascending polynomial coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCoeffs {
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    #[serde(default)]
    pub c3: f64,
    #[serde(default)]
    pub c4: f64,
    #[serde(default)]
    pub c5: f64,
    #[serde(default)]
    pub ffun: Vec<f64>,
    #[serde(default)]
    pub mode: GeneratorMode,
}

/// Characteristic `σ = (σ¹, …, σ⁶)`; the last three vanish in original mode.
#[derive(Clone, Copy, Debug)]
pub struct Characteristic<S> {
    pub s: [Jet2D<S>; 6],
}

impl GeneratorCoeffs {
    fn ffun_jet<S: Field>(&self, tj: &Jet2D<S>) -> Jet2D<S> {
        let mut acc = Jet2D::constant(S::zero(), tj.x(), tj.t());
        for c in self.ffun.iter().rev() {
            acc = (acc * *tj).add_scalar(S::from_f64(*c));
        }
        acc
    }

    /// Characteristic of the generator on the given fields.
    pub fn characteristic<S: Field>(&self, fl: &Fields<S>) -> Characteristic<S> {
        let (x, t) = fl.u.base_point();
        let xj = Jet2D::<S>::coord(Axis::X, x, t);
        let tj = Jet2D::<S>::coord(Axis::T, x, t);
        let tt = self.ffun_jet(&tj);
        let ft = tt.dt();
        let k = |v: f64| S::from_f64(v);
        let lie = |j: &Jet2D<S>, xx: &Jet2D<S>| *xx * j.dx() + tt * j.dt();
        let zero = Jet2D::constant(S::zero(), x, t);
        match self.mode {
            GeneratorMode::Original => {
                let xx = xj.mul_scalar(k(self.c1)).add_scalar(k(self.c2));
                let uu = fl.u.mul_scalar(k(-2.0 * self.c1 - self.c3)) + (fl.phi2 * fl.phi2).mul_scalar(k(self.c4));
                let vv = fl.v.mul_scalar(k(self.c3)) + (fl.phi1 * fl.phi1).mul_scalar(k(self.c4));
                let dd = fl.delta * ft.mul_scalar(k(-1.0)).add_scalar(k(2.0 * self.c1));
                Characteristic {
                    s: [
                        lie(&fl.u, &xx) - uu,
                        lie(&fl.v, &xx) - vv,
                        tt * fl.delta.dt() - dd,
                        zero,
                        zero,
                        zero,
                    ],
                }
            }
            GeneratorMode::Enlarged => {
                let xx = Jet2D::constant(k(self.c1), x, t);
                let (c2, c3, c4, c5) = (k(self.c2), k(self.c3), k(self.c4), k(self.c5));
                let uu = fl.u.mul_scalar(c2) + (fl.phi2 * fl.phi2).mul_scalar(c3);
                let vv = fl.v.mul_scalar(-c2) + (fl.phi1 * fl.phi1).mul_scalar(c3);
                let dd = -(fl.delta * ft);
                let two_c3f = fl.f.mul_scalar(k(2.0) * c3);
                let p1 = -(fl.phi1.mul_scalar(k(0.5)) * two_c3f.add_scalar(c2 - c4));
                let p2 = fl.phi2.mul_scalar(k(0.5)) * (-two_c3f).add_scalar(c2 + c4);
                let p3 = (fl.f * fl.f).mul_scalar(-c3) + fl.f.mul_scalar(c4).add_scalar(c5);
                Characteristic {
                    s: [
                        lie(&fl.u, &xx) - uu,
                        lie(&fl.v, &xx) - vv,
                        tt * fl.delta.dt() - dd,
                        lie(&fl.phi1, &xx) - p1,
                        lie(&fl.phi2, &xx) - p2,
                        lie(&fl.f, &xx) - p3,
                    ],
                }
            }
        }
    }
}

/// Residuals of the linearized equations at `(x, t)`: two for the field
/// equations, and in enlarged mode four more for the Lax pair and two for
/// the f-system.
pub fn symmetry_residual<S: Field>(
    bundle: &Bundle,
    g: &GeneratorCoeffs,
    x: f64,
    t: f64,
) -> Result<Vec<Residual<S>>, VerifyError> {
    let fl = bundle
        .eval::<S>(x, t)
        .map_err(|e| VerifyError::Evaluation { x, t, source: e })?;
    let (alpha, lambda) = super::scalars::<S>(bundle.params())?;
    Ok(linearized(&fl, &g.characteristic(&fl), g.mode, alpha, lambda))
}

fn linearized<S: Field>(
    fl: &Fields<S>,
    ch: &Characteristic<S>,
    mode: GeneratorMode,
    alpha: S,
    lambda: S,
) -> Vec<Residual<S>> {
    let n = |v: f64| S::from_f64(v);
    let [j1, j2, j3, j4, j5, j6] = &ch.s;
    let (s1, s2, s3) = (j1.value(), j2.value(), j3.value());
    let (u, v, d) = (fl.u.value(), fl.v.value(), fl.delta.value());
    let (uxx, vxx) = (fl.u.d(2, 0), fl.v.d(2, 0));
    let mut out = vec![
        Acc::new()
            .add(j1.d(0, 1))
            .add(n(2.0) * alpha * v * u * u * s3)
            .sub(alpha * uxx * s3)
            .add(n(2.0) * alpha * d * u * u * s2)
            .add(n(4.0) * alpha * u * v * d * s1)
            .sub(alpha * d * j1.d(2, 0))
            .done("sym.u"),
        Acc::new()
            .add(j2.d(0, 1))
            .sub(n(2.0) * alpha * v * v * u * s3)
            .add(alpha * vxx * s3)
            .sub(n(2.0) * alpha * d * v * v * s1)
            .sub(n(4.0) * alpha * u * v * d * s2)
            .add(alpha * d * j2.d(2, 0))
            .done("sym.v"),
    ];
    if mode == GeneratorMode::Original {
        return out;
    }
    let (s4, s5) = (j4.value(), j5.value());
    let (p1, p2) = (fl.phi1.value(), fl.phi2.value());
    let (ux, vx) = (fl.u.d(1, 0), fl.v.d(1, 0));
    let (s1x, s2x) = (j1.d(1, 0), j2.d(1, 0));
    let two_l = n(2.0) * lambda;
    out.push(Acc::new().add(j4.d(1, 0)).sub(s2 * p2).sub(v * s5).sub(lambda * s4).done("sym.phi1.x"));
    out.push(Acc::new().add(j5.d(1, 0)).sub(s1 * p1).sub(u * s4).add(lambda * s5).done("sym.phi2.x"));
    // φ_t = Vφ and its variation; each coefficient is expanded into monomials
    let ad = alpha * d;
    let a_terms = [ad * u * v, -(two_l * lambda * ad)];
    let b_terms = [-(ad * vx), -(two_l * ad * v)];
    let c_terms = [ad * ux, -(two_l * ad * u)];
    let ap_terms = [
        alpha * s3 * u * v,
        alpha * d * s1 * v,
        alpha * d * u * s2,
        -(two_l * lambda * alpha * s3),
    ];
    let bp_terms = [
        -(alpha * s3 * vx),
        -(alpha * d * s2x),
        -(two_l * alpha * s3 * v),
        -(two_l * alpha * d * s2),
    ];
    let cp_terms = [
        alpha * s3 * ux,
        alpha * d * s1x,
        -(two_l * alpha * s3 * u),
        -(two_l * alpha * d * s1),
    ];
    let mut e1 = Acc::new().add(j4.d(0, 1));
    let mut e2 = Acc::new().add(j5.d(0, 1));
    for a in a_terms {
        e1 = e1.sub(a * s4);
        e2 = e2.add(a * s5);
    }
    for b in b_terms {
        e1 = e1.sub(b * s5);
    }
    for c in c_terms {
        e2 = e2.sub(c * s4);
    }
    for a in ap_terms {
        e1 = e1.sub(a * p1);
        e2 = e2.add(a * p2);
    }
    for b in bp_terms {
        e1 = e1.sub(b * p2);
    }
    for c in cp_terms {
        e2 = e2.sub(c * p1);
    }
    out.push(e1.done("sym.phi1.t"));
    out.push(e2.done("sym.phi2.t"));
    out.push(Acc::new().add(j6.d(1, 0)).add(s4 * p2).add(p1 * s5).done("sym.f.x"));
    let four_l = n(4.0) * lambda;
    out.push(
        Acc::new()
            .add(j6.d(0, 1))
            .sub(alpha * s3 * v * p2 * p2)
            .sub(alpha * s3 * four_l * p1 * p2)
            .add(alpha * s3 * u * p1 * p1)
            .sub(ad * s2 * p2 * p2)
            .sub(n(2.0) * ad * v * p2 * s5)
            .sub(four_l * ad * s4 * p2)
            .sub(four_l * ad * p1 * s5)
            .add(ad * s1 * p1 * p1)
            .add(n(2.0) * ad * u * p1 * s4)
            .done("sym.f.t"),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{seed_soliton, DeltaProfile, Scalar};

    fn seed(delta: DeltaProfile) -> Bundle {
        seed_soliton(Scalar::real(1.0), delta).unwrap()
    }

    fn max_norm(r: &[Residual<f64>]) -> f64 {
        r.iter().map(|r| r.normalized()).fold(0.0, f64::max)
    }

    #[test]
    fn translations_are_symmetries() {
        let b = seed(DeltaProfile::Constant(1.0));
        // x-translation, then t-translation
        for (c2, ffun) in [(1.0, vec![]), (0.0, vec![1.0])] {
            let g = GeneratorCoeffs {
                c2,
                ffun,
                ..Default::default()
            };
            let r = symmetry_residual::<f64>(&b, &g, 0.3, 0.2).unwrap();
            assert!(max_norm(&r) < 1e-11, "{r:?}");
        }
    }

    #[test]
    fn enlarged_nonlocal_part() {
        let b = seed(DeltaProfile::Polynomial(vec![1.0, 0.2]));
        let g = GeneratorCoeffs {
            c3: -1.0,
            mode: GeneratorMode::Enlarged,
            ..Default::default()
        };
        let r = symmetry_residual::<f64>(&b, &g, -0.4, 0.6).unwrap();
        assert_eq!(r.len(), 8);
        assert!(max_norm(&r) < 1e-12, "{r:?}");
    }

    #[test]
    fn scaling_with_time_dependent_delta() {
        let b = seed(DeltaProfile::Polynomial(vec![1.0, 0.3, 0.1]));
        let g = GeneratorCoeffs {
            c1: 0.7,
            c3: 0.2,
            ffun: vec![0.1, 1.0, 0.4],
            ..Default::default()
        };
        let r = symmetry_residual::<f64>(&b, &g, 0.3, 0.2).unwrap();
        assert!(max_norm(&r) < 1e-12, "{r:?}");
    }

    #[test]
    fn corrupted_field_is_detected() {
        let b = Bundle::Probed {
            base: Box::new(seed(DeltaProfile::Constant(1.0))),
            probe: crate::families::Probe::Add(crate::families::FieldName::U, 0.1),
        };
        let g = GeneratorCoeffs {
            c1: 1.0,
            ffun: vec![0.0, 2.0],
            ..Default::default()
        };
        let r = symmetry_residual::<f64>(&b, &g, 0.3, 0.2).unwrap();
        assert!(max_norm(&r) > 1e-3, "{r:?}");
    }
}
