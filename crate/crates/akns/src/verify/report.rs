use std::collections::BTreeMap;

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{point_residuals, Point, VerifyError, EQUATIONS};
use crate::families::Bundle;
use crate::jet::Field;

/// Tensor grid `x × t`, endpoints included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

impl Grid {
    pub fn new(x: (f64, f64), nx: usize, t: (f64, f64), nt: usize) -> Self {
        Self {
            x_min: x.0,
            x_max: x.1,
            nx,
            t_min: t.0,
            t_max: t.1,
            nt,
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let ends = [self.x_min, self.x_max, self.t_min, self.t_max];
        if ends.iter().any(|v| !v.is_finite()) {
            return Err(VerifyError::Grid("non-finite bounds".into()));
        }
        if self.nx == 0 || self.nt == 0 {
            return Err(VerifyError::Grid("empty axis".into()));
        }
        if self.x_min > self.x_max || self.t_min > self.t_max {
            return Err(VerifyError::Grid("reversed bounds".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        axis(self.x_min, self.x_max, self.nx)
    }
    pub fn ts(&self) -> Vec<f64> {
        axis(self.t_min, self.t_max, self.nt)
    }

    /// Row-major (t outer, x inner).
    pub fn points(&self) -> Vec<Point> {
        let xs = self.xs();
        self.ts()
            .into_iter()
            .flat_map(|t| xs.iter().map(move |&x| Point { x, t }))
            .collect()
    }
}

/// Which scalar type evaluates the bundle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    #[default]
    Auto,
    Real,
    Complex,
}

impl ScalarMode {
    pub fn complex_for(self, b: &Bundle) -> bool {
        match self {
            ScalarMode::Auto => b.needs_complex(),
            ScalarMode::Real => false,
            ScalarMode::Complex => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationStats {
    /// Largest raw |residual|.
    pub max_abs: f64,
    /// Root mean square of the raw residual.
    pub l2: f64,
    /// Largest normalized residual.
    pub max_rel: f64,
    pub worst_x: f64,
    pub worst_t: f64,
    /// Term scale at the worst point.
    pub scale: f64,
    pub count: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub label: String,
    pub rel_tol: f64,
    pub grid: Grid,
    pub equations: BTreeMap<String, EquationStats>,
    pub points: usize,
    pub masked: usize,
    pub degenerate: usize,
    pub singular_locus: Vec<Point>,
    pub pass: bool,
}

impl ResidualReport {
    /// Worst normalized residual over all equations.
    pub fn max_rel(&self) -> f64 {
        self.equations.values().map(|e| e.max_rel).fold(0.0, f64::max)
    }
}

enum Outcome {
    Masked,
    Values(Vec<(f64, f64, f64)>, bool),
}

fn at_point<S: Field>(b: &Bundle, p: Point) -> Result<Outcome, VerifyError> {
    match point_residuals::<S>(b, p.x, p.t) {
        Ok((rs, deg)) => Ok(Outcome::Values(
            rs.iter().map(|r| (r.abs(), r.normalized(), r.scale)).collect(),
            deg,
        )),
        Err(VerifyError::Evaluation { source, .. }) if source.is_mask() => Ok(Outcome::Masked),
        Err(e) => Err(e),
    }
}

/// Residuals of every equation of the prolonged system over `grid`.
/// Points where the bundle is singular are masked and counted.
pub fn full_residual<S: Field>(b: &Bundle, grid: &Grid, rel_tol: f64) -> Result<ResidualReport, VerifyError> {
    grid.validate()?;
    points_residual::<S>(b, grid, &grid.points(), rel_tol)
}

/// Like [`full_residual`] but at arbitrary points, e.g. those read back from
/// an exported dump. `grid` only supplies metadata and the singular-locus rows.
pub fn points_residual<S: Field>(
    b: &Bundle,
    grid: &Grid,
    pts: &[Point],
    rel_tol: f64,
) -> Result<ResidualReport, VerifyError> {
    #[cfg(feature = "parallel")]
    let outcomes: Vec<_> = pts.par_iter().map(|p| at_point::<S>(b, *p)).collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<_> = pts.iter().map(|p| at_point::<S>(b, *p)).collect();

    let mut stats: Vec<EquationStats> = EQUATIONS
        .iter()
        .map(|_| EquationStats {
            max_abs: 0.0,
            l2: 0.0,
            max_rel: 0.0,
            worst_x: f64::NAN,
            worst_t: f64::NAN,
            scale: 0.0,
            count: 0,
            pass: true,
        })
        .collect();
    let (mut masked, mut degenerate) = (0, 0);
    for (p, o) in pts.iter().zip(outcomes) {
        match o? {
            Outcome::Masked => masked += 1,
            Outcome::Values(vals, deg) => {
                degenerate += deg as usize;
                for (s, (abs, rel, scale)) in stats.iter_mut().zip(vals) {
                    s.count += 1;
                    s.l2 += abs * abs;
                    s.max_abs = s.max_abs.max(abs);
                    // NaN compares false, so it must be caught explicitly
                    let worse = if s.max_rel.is_nan() {
                        false
                    } else {
                        rel.is_nan() || rel > s.max_rel || s.worst_x.is_nan()
                    };
                    if worse {
                        s.max_rel = rel;
                        s.worst_x = p.x;
                        s.worst_t = p.t;
                        s.scale = scale;
                    }
                }
            }
        }
    }
    let mut equations = BTreeMap::new();
    for (name, mut s) in EQUATIONS.iter().zip(stats) {
        if s.count > 0 {
            s.l2 = (s.l2 / s.count as f64).sqrt();
        }
        s.pass = s.max_rel <= rel_tol;
        equations.insert(name.to_string(), s);
    }
    let evaluated = pts.len() - masked;
    let pass = evaluated > 0 && equations.values().all(|e| e.pass);
    Ok(ResidualReport {
        label: b.label(),
        rel_tol,
        grid: grid.clone(),
        equations,
        points: pts.len(),
        masked,
        degenerate,
        singular_locus: singular_locus(b, grid),
        pass,
    })
}

/// [`full_residual`] with the scalar type chosen by `mode`.
pub fn full_residual_auto(
    b: &Bundle,
    grid: &Grid,
    rel_tol: f64,
    mode: ScalarMode,
) -> Result<ResidualReport, VerifyError> {
    if mode.complex_for(b) {
        full_residual::<Complex64>(b, grid, rel_tol)
    } else {
        full_residual::<f64>(b, grid, rel_tol)
    }
}

/// [`points_residual`] with the scalar type chosen by `mode`.
pub fn points_residual_auto(
    b: &Bundle,
    grid: &Grid,
    pts: &[Point],
    rel_tol: f64,
    mode: ScalarMode,
) -> Result<ResidualReport, VerifyError> {
    grid.validate()?;
    if mode.complex_for(b) {
        points_residual::<Complex64>(b, grid, pts, rel_tol)
    } else {
        points_residual::<f64>(b, grid, pts, rel_tol)
    }
}

/// Zeros of the bundle's singular indicators along each grid row, refined
/// by bisection.
pub fn singular_locus(b: &Bundle, grid: &Grid) -> Vec<Point> {
    let xs = grid.xs();
    let mut out = Vec::new();
    for t in grid.ts() {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| b.singular_indicators(x, t)).collect();
        let n_ind = rows.first().map_or(0, |r| r.len());
        for k in 0..n_ind {
            for i in 1..xs.len() {
                let (fa, fb) = (rows[i - 1][k], rows[i][k]);
                if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
                    continue;
                }
                let (mut a, mut c, mut fa) = (xs[i - 1], xs[i], fa);
                for _ in 0..80 {
                    let m = 0.5 * (a + c);
                    let fm = b.singular_indicators(m, t)[k];
                    if !fm.is_finite() {
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        c = m;
                    }
                }
                out.push(Point { x: 0.5 * (a + c), t });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{finite_transform, seed_soliton, DeltaProfile, FieldName, Probe, Scalar};

    fn seed() -> Bundle {
        seed_soliton(Scalar::real(1.0), DeltaProfile::Constant(1.0)).unwrap()
    }

    #[test]
    fn grid_includes_endpoints() {
        let g = Grid::new((-1.0, 1.0), 3, (0.0, 0.0), 1);
        assert_eq!(g.xs(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(g.points().len(), 3);
        assert!(Grid::new((1.0, 0.0), 3, (0.0, 0.0), 1).validate().is_err());
    }

    #[test]
    fn seed_report_passes() {
        let g = Grid::new((-5.0, 5.0), 21, (-1.0, 1.0), 5);
        let r = full_residual::<f64>(&seed(), &g, 1e-10).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.equations.len(), EQUATIONS.len());
        assert_eq!(r.masked, 0);
    }

    #[test]
    fn probe_fails() {
        let b = Bundle::Probed {
            base: Box::new(seed()),
            probe: Probe::Add(FieldName::U, 0.1),
        };
        let g = Grid::new((-2.0, 2.0), 9, (0.0, 0.5), 2);
        let r = full_residual::<f64>(&b, &g, 1e-10).unwrap();
        assert!(!r.pass);
        assert!(r.equations["akns.u"].max_rel > 1e-3);
    }

    #[test]
    fn singular_locus_of_transform() {
        let b = finite_transform(&seed(), 2.0).unwrap();
        let g = Grid::new((-3.0, 3.0), 13, (0.0, 0.0), 1);
        let loc = singular_locus(&b, &g);
        assert_eq!(loc.len(), 1, "{loc:?}");
        let f0 = seed().eval::<f64>(loc[0].x, 0.0).unwrap().f.value();
        assert!((1.0 + 2.0 * f0).abs() < 1e-12);
    }
}
