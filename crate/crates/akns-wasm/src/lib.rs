//! Three operations for the browser page in `www/`: a row of the transformed
//! seed soliton with its residual, Jacobi sn/cn/dn over one period, and the
//! residual table of the eight Case-2 parameter sets.
//!
//! The plain functions return serde types and run natively; on wasm32 thin
//! `wasm_bindgen` wrappers hand them to JavaScript as JSON strings.

use akns::families::{case2_bundle, finite_transform, seed_soliton, DeltaProfile, Scalar};
use akns::reduction::{case2_branches, Case2Reduction, Formulary};
use akns::specfun::{ellip_k, jacobi_sn_cn_dn, EllipticModulus};
use akns::verify::{full_residual, Grid};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Family(#[from] akns::families::FamilyError),
    #[error(transparent)]
    Reduction(#[from] akns::reduction::ReductionError),
    #[error(transparent)]
    Specfun(#[from] akns::specfun::SpecfunError),
    #[error(transparent)]
    Verify(#[from] akns::verify::VerifyError),
}

/// Largest number of samples any call will produce.
pub const MAX_SAMPLES: usize = 4001;

fn check_count(n: usize) -> Result<(), DemoError> {
    if !(2..=MAX_SAMPLES).contains(&n) {
        return Err(DemoError::Input(format!("sample count {n} outside 2..={MAX_SAMPLES}")));
    }
    Ok(())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedRow {
    pub x: Vec<f64>,
    /// `None` at singular gauge points.
    pub u: Vec<Option<f64>>,
    pub f: Vec<Option<f64>>,
    /// Worst normalized residual on a 41×21 grid over the same x-range, t ∈ [t−1, t+1].
    pub max_rel: f64,
    pub pass: bool,
    pub singular_x: Vec<f64>,
}

/// The seed soliton (α = 1) after the finite transformation with `eps`,
/// sampled along the row at time `t`.
pub fn seed_transform_row(eps: f64, t: f64, x_min: f64, x_max: f64, nx: usize) -> Result<SeedRow, DemoError> {
    check_count(nx)?;
    // also refuses NaN bounds
    if x_min.partial_cmp(&x_max) != Some(std::cmp::Ordering::Less) {
        return Err(DemoError::Input("need x_min < x_max".into()));
    }
    let seed = seed_soliton(Scalar::real(1.0), DeltaProfile::Constant(1.0))?;
    let b = finite_transform(&seed, eps)?;
    let x = linspace(x_min, x_max, nx);
    let mut u = Vec::with_capacity(nx);
    let mut f = Vec::with_capacity(nx);
    for &xi in &x {
        match b.eval::<f64>(xi, t) {
            Ok(fl) => {
                u.push(Some(fl.u.value()));
                f.push(Some(fl.f.value()));
            }
            Err(e) if e.is_mask() => {
                u.push(None);
                f.push(None);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let grid = Grid::new((x_min, x_max), 41, (t - 1.0, t + 1.0), 21);
    let r = full_residual::<f64>(&b, &grid, 1e-10)?;
    let row = Grid::new((x_min, x_max), nx, (t, t), 1);
    Ok(SeedRow {
        x,
        u,
        f,
        max_rel: r.max_rel(),
        pass: r.pass,
        singular_x: akns::verify::singular_locus(&b, &row).into_iter().map(|p| p.x).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SnCurve {
    pub k: f64,
    /// Quarter period.
    pub quarter: f64,
    pub u: Vec<f64>,
    pub sn: Vec<f64>,
    pub cn: Vec<f64>,
    pub dn: Vec<f64>,
}

/// sn, cn, dn over `[0, 4K(k)]`; for `k = 1` the range is `[0, 8]`.
pub fn sn_curve(k: f64, n: usize) -> Result<SnCurve, DemoError> {
    check_count(n)?;
    EllipticModulus::new(k)?;
    let quarter = if k < 1.0 { ellip_k(k)? } else { f64::INFINITY };
    let span = if quarter.is_finite() { 4.0 * quarter } else { 8.0 };
    let u = linspace(0.0, span, n);
    let (mut sn, mut cn, mut dn) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for &v in &u {
        let (s, c, d) = jacobi_sn_cn_dn(v, k)?;
        sn.push(s);
        cn.push(c);
        dn.push(d);
    }
    Ok(SnCurve { k, quarter, u, sn, cn, dn })
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchRow {
    pub branch: u8,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub l0: f64,
    pub l1: f64,
    pub elliptic: bool,
    pub max_rel: Option<f64>,
    pub pass: bool,
    /// Set when the parameter set could not be assembled.
    pub error: Option<String>,
}

/// Residuals of all eight Case-2 parameter sets (C̃ = α = 1) on
/// `x ∈ [−8, 8] × t ∈ [−1.5, 1.5]`.
pub fn case2_table(lambda: f64, m: f64, free: f64, formulary: &str) -> Result<Vec<BranchRow>, DemoError> {
    let form = match formulary {
        "printed" => Formulary::Printed,
        "lax" => Formulary::Lax,
        other => return Err(DemoError::Input(format!("formulary `{other}` is neither printed nor lax"))),
    };
    let sets = case2_branches(1.0, 1.0, lambda, EllipticModulus::new(m)?, free, form, 0.0)?;
    let grid = Grid::new((-8.0, 8.0), 41, (-1.5, 1.5), 7);
    Ok(sets
        .into_iter()
        .map(|p| {
            let mut row = BranchRow {
                branch: p.branch.unwrap_or(0),
                k1: p.k1,
                k2: p.k2,
                k3: p.k3,
                l0: p.l0,
                l1: p.l1,
                elliptic: p.is_elliptic(),
                max_rel: None,
                pass: false,
                error: None,
            };
            let checked = Case2Reduction::new(p, (0.0, 0.0), 1e-12)
                .map_err(DemoError::from)
                .and_then(|red| Ok(full_residual::<f64>(&case2_bundle(red), &grid, 1e-6)?));
            match checked {
                Ok(r) => {
                    row.max_rel = Some(r.max_rel());
                    row.pass = r.pass;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn json<T: serde::Serialize>(r: Result<T, super::DemoError>) -> Result<String, JsError> {
        let v = r.map_err(|e| JsError::new(&e.to_string()))?;
        serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
    }

    #[wasm_bindgen(js_name = seedTransformRow)]
    pub fn seed_transform_row(eps: f64, t: f64, x_min: f64, x_max: f64, nx: usize) -> Result<String, JsError> {
        json(super::seed_transform_row(eps, t, x_min, x_max, nx))
    }

    #[wasm_bindgen(js_name = snCurve)]
    pub fn sn_curve(k: f64, n: usize) -> Result<String, JsError> {
        json(super::sn_curve(k, n))
    }

    #[wasm_bindgen(js_name = case2Table)]
    pub fn case2_table(lambda: f64, m: f64, free: f64, formulary: &str) -> Result<String, JsError> {
        json(super::case2_table(lambda, m, free, formulary))
    }
}
