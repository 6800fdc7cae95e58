use serde::{Deserialize, Serialize};

use super::FamilyError;
use crate::jet::{Field, Jet2D};

/// The coefficient δ(t).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaProfile {
    Constant(f64),
    /// `Σ cᵢ tⁱ`, ascending.
    Polynomial(Vec<f64>),
}

impl DeltaProfile {
    pub fn is_complex(&self) -> bool {
        false
    }

    fn coeffs(&self) -> Vec<f64> {
        match self {
            DeltaProfile::Constant(c) => vec![*c],
            DeltaProfile::Polynomial(c) if c.is_empty() => vec![0.0],
            DeltaProfile::Polynomial(c) => c.clone(),
        }
    }

    /// `(δ, δ_t)` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let c = self.coeffs();
        let d = c.iter().rev().fold(0.0, |a, v| a * t + v);
        let dt = c
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |a, (i, v)| a * t + i as f64 * v);
        (d, dt)
    }

    fn horner<S: Field>(c: &[f64], tj: &Jet2D<S>) -> Jet2D<S> {
        let mut acc = Jet2D::constant(S::zero(), tj.x(), tj.t());
        for v in c.iter().rev() {
            acc = (acc * *tj).add_scalar(S::from_f64(*v));
        }
        acc
    }

    /// δ composed with a time jet.
    pub fn jet<S: Field>(&self, tj: &Jet2D<S>) -> Result<Jet2D<S>, FamilyError> {
        Ok(Self::horner(&self.coeffs(), tj))
    }

    /// `∫₀ᵗ δ` composed with a time jet.
    pub fn integral_jet<S: Field>(&self, tj: &Jet2D<S>) -> Result<Jet2D<S>, FamilyError> {
        let c = self.coeffs();
        let mut ic = vec![0.0];
        ic.extend(c.iter().enumerate().map(|(i, v)| v / (i + 1) as f64));
        Ok(Self::horner(&ic, tj))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Axis;

    #[test]
    fn polynomial_eval() {
        let d = DeltaProfile::Polynomial(vec![1.0, 0.5, 0.25]);
        assert_eq!(d.eval(2.0), (3.0, 1.5));
    }

    #[test]
    fn integral_jet_derivative_is_delta() {
        let d = DeltaProfile::Polynomial(vec![1.0, -0.3, 0.2]);
        let tj = Jet2D::<f64>::coord(Axis::T, 0.0, 0.7);
        let i = d.integral_jet(&tj).unwrap();
        assert!((i.d(0, 1) - d.eval(0.7).0).abs() < 1e-15);
        assert!((i.d(0, 2) - d.eval(0.7).1).abs() < 1e-15);
    }
}
