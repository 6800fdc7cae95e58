//! From a [`RunConfig`] to parameter records, then to bundles.

use akns::families::{
    case1_bundle, case2_bundle, finite_transform, seed_soliton, Bundle, DeltaProfile, Probe, Scalar,
};
use akns::reduction::{
    case2_branches, Case1Params, Case1Reduction, Case2Mode, Case2Params, Case2Reduction,
    DenseSolution, Formulary,
};
use akns::reduction::case1::{case1_ode_integrate, lax_sn_roots};
use akns::specfun::{ellip_k, SnConvention};
use akns::verify::Grid;

use crate::config::{Family, Mode, RunConfig};
use crate::error::CliError;

/// Quadrature and integrator tolerance for the reductions.
const ASSEMBLY_TOL: f64 = 1e-12;

pub const ELLIPTIC_NOTE: &str = "elliptic (no exponential envelope)";

/// Parameter record of the selected family, before assembly.
#[derive(Clone, Debug)]
pub enum Resolved {
    Seed { alpha: Scalar, delta: DeltaProfile },
    Case1(Case1Params),
    Case2(Case2Params),
}

impl Resolved {
    /// Derived constants as `(name, value)`, in a fixed order.
    pub fn echo(&self) -> Vec<(&'static str, f64)> {
        match self {
            Resolved::Seed { alpha, .. } => vec![("alpha", alpha.re), ("alpha_im", alpha.im)],
            Resolved::Case1(p) => {
                let mut v = vec![
                    ("b0", p.b0),
                    ("b1", p.b1),
                    ("k1", p.k1),
                    ("k2", p.k2),
                    ("k3", p.k3),
                    ("n", p.n),
                    ("alpha", p.alpha),
                    ("lambda", p.lambda),
                    ("C", p.c),
                    ("C1", p.c1),
                    ("C2", p.c2),
                ];
                if p.formulary == Formulary::Lax {
                    v.push(("kint", p.kint));
                }
                v
            }
            Resolved::Case2(p) => vec![
                ("k1", p.k1),
                ("k2", p.k2),
                ("k3", p.k3),
                ("l0", p.l0),
                ("l1", p.l1),
                ("m", p.m),
                ("alpha", p.alpha),
                ("lambda", p.lambda),
                ("C", p.ct),
                ("C1", p.ct1),
            ],
        }
    }

    pub fn notes(&self) -> Vec<String> {
        match self {
            Resolved::Case2(p) if p.is_elliptic() => vec![ELLIPTIC_NOTE.to_string()],
            _ => Vec::new(),
        }
    }

    /// Spatial period of the periodic background along a row of fixed t.
    pub fn predicted_period(&self) -> Option<f64> {
        match self {
            Resolved::Case1(p) if p.k2 != 0.0 => Some(4.0 * ellip_k(p.n).ok()? / p.k2.abs()),
            Resolved::Case2(p) => Some(4.0 * ellip_k(p.m).ok()?),
            _ => None,
        }
    }
}

fn modulus(conv: SnConvention, v: f64) -> Result<f64, CliError> {
    Ok(conv.to_modulus(v)?.k())
}

pub fn resolve(cfg: &RunConfig) -> Result<Resolved, CliError> {
    let conv: SnConvention = cfg.sn_convention.into();
    match cfg.family {
        Family::Seed => {
            let s = &cfg.seed;
            let delta = match s.delta.as_slice() {
                [c] => DeltaProfile::Constant(*c),
                cs => DeltaProfile::Polynomial(cs.to_vec()),
            };
            Ok(Resolved::Seed {
                alpha: Scalar { re: s.alpha, im: s.alpha_im },
                delta,
            })
        }
        Family::Case1 => {
            let s = &cfg.case1;
            let n = modulus(conv, s.n)?;
            let p = match (s.mode, s.formulary.into()) {
                (Mode::Sn, Formulary::Printed) => Case1Params::printed_sn(s.alpha, s.lambda, s.k3, n, s.c)?,
                (Mode::Sn, Formulary::Lax) => {
                    let roots = lax_sn_roots(s.alpha, s.lambda, s.k3, n)?;
                    if roots.is_empty() {
                        return Err(CliError::Constraint("the sn constraint map has no admissible root".into()));
                    }
                    Case1Params::lax_sn(s.alpha, s.lambda, s.k3, n, s.c, s.root)?
                }
                (Mode::Numeric, f) => Case1Params::literal(
                    s.alpha, s.lambda, s.k1, s.k2, s.k3, s.c, s.c1, s.c2, n, s.f0, f,
                ),
            };
            Ok(Resolved::Case1(p))
        }
        Family::Case2 => {
            let s = &cfg.case2;
            let m = modulus(conv, s.m)?;
            let mut p = match s.branch {
                Some(b) => {
                    if !(1..=8).contains(&b) {
                        return Err(CliError::Config(format!("branch {b} outside 1..=8")));
                    }
                    let line = (b - 1) % 4;
                    let (free, name) = if line % 2 == 0 { (s.l1, "l1") } else { (s.l0, "l0") };
                    let free = free.ok_or_else(|| CliError::Config(format!("branch {b} takes its free parameter from {name}")))?;
                    let all = case2_branches(
                        s.c,
                        s.alpha,
                        s.lambda,
                        akns::specfun::EllipticModulus::new(m)?,
                        free,
                        s.formulary.into(),
                        s.k2,
                    )?;
                    all[(b - 1) as usize].clone()
                }
                None => {
                    let mut p = Case2Params::free(
                        s.alpha,
                        s.lambda,
                        s.k1,
                        s.k2,
                        s.k3,
                        s.c,
                        1.0,
                        m,
                        s.l0.unwrap_or(1.0),
                        s.l1.unwrap_or(1.0),
                        s.formulary.into(),
                    );
                    // a mismatch surfaces when the reduction validates
                    let _ = p.match_closed_form();
                    p
                }
            };
            p.ct1 = s.c1;
            if s.mode == Mode::Numeric {
                p.mode = Case2Mode::NumericOde;
            }
            Ok(Resolved::Case2(p))
        }
    }
}

/// Range of `a·x + b·t` over the grid, padded by 2% either side.
fn window(grid: &Grid, a: f64, b: f64) -> (f64, f64) {
    let vals = [
        a * grid.x_min + b * grid.t_min,
        a * grid.x_min + b * grid.t_max,
        a * grid.x_max + b * grid.t_min,
        a * grid.x_max + b * grid.t_max,
    ];
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.02 * (hi - lo).max(1.0);
    (lo - pad, hi + pad)
}

/// Assembles the bundle for `grid`. Numeric modes integrate over the part of
/// the similarity variable the grid needs.
pub fn assemble(r: &Resolved, grid: &Grid) -> Result<Bundle, CliError> {
    Ok(match r {
        Resolved::Seed { alpha, delta } => seed_soliton(*alpha, delta.clone())?,
        Resolved::Case1(p) => {
            // ξ = t − k₂x
            let w = window(grid, -p.k2, 1.0);
            case1_bundle(Case1Reduction::new(p.clone(), w, ASSEMBLY_TOL)?)
        }
        Resolved::Case2(p) => {
            // ς = x − k₁t
            let w = window(grid, 1.0, -p.k1);
            case2_bundle(Case2Reduction::new(p.clone(), w, ASSEMBLY_TOL)?)
        }
    })
}

/// The configured family, transformed `repeat` times when `transform` is
/// set, and perturbed when asked.
pub fn bundle(cfg: &RunConfig, r: &Resolved, transform: bool) -> Result<Bundle, CliError> {
    let mut b = assemble(r, &cfg.grid())?;
    if transform {
        for _ in 0..cfg.transform.repeat {
            b = finite_transform(&b, cfg.transform.eps)?;
        }
    }
    if let Some(p) = &cfg.perturb {
        let (field, value) = crate::config::parse_perturb(p)?;
        b = Bundle::Probed {
            base: Box::new(b),
            probe: Probe::Add(field, value),
        };
    }
    Ok(b)
}

/// Dense output of the reduced ODE over the grid's similarity window, for
/// the families that have one.
pub fn ode_dense(r: &Resolved, grid: &Grid) -> Result<Option<DenseSolution>, CliError> {
    match r {
        Resolved::Case1(p) => {
            let w = window(grid, -p.k2, 1.0);
            Ok(Some(case1_ode_integrate(p, p.f0, w, ASSEMBLY_TOL)?))
        }
        Resolved::Case2(p) => {
            let w = window(grid, 1.0, -p.k1);
            Ok(Some(DenseSolution::integrate(p.radicand(), p.f0, p.ascending, w.0, w.1, ASSEMBLY_TOL, (w.1 - w.0) / 200.0)?))
        }
        Resolved::Seed { .. } => Ok(None),
    }
}
