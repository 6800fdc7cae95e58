//! Adaptive Gauss–Kronrod quadrature and cumulative primitive tables.

use std::sync::Arc;

use super::ReductionError;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

// G7/K15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_SEGMENTS: usize = 4000;

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Globally adaptive G7K15 quadrature of `f` over `[a, b]`.
///
/// Stops when the summed error estimate falls below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64, ReductionError> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(f, a, b);
    let mut segs = vec![(a, b, v, e)];
    loop {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if !total.is_finite() {
            return Err(ReductionError::QuadratureNonconvergence { a, b });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if segs.len() >= MAX_SEGMENTS {
            return Err(ReductionError::QuadratureNonconvergence { a, b });
        }
        let (iw, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
        let (sa, sb, _, _) = segs[iw];
        let m = 0.5 * (sa + sb);
        if m <= sa.min(sb) || m >= sa.max(sb) {
            return Err(ReductionError::QuadratureNonconvergence { a, b });
        }
        let (v1, e1) = gk15(f, sa, m);
        let (v2, e2) = gk15(f, m, sb);
        segs[iw] = (sa, m, v1, e1);
        segs.push((m, sb, v2, e2));
    }
}

/// Cumulative integrals `∫_origin^{origin + i·h} f` at evenly spaced nodes.
#[derive(Clone)]
struct NodeTable {
    origin: f64,
    h: f64,
    lo: isize,
    values: Vec<f64>,
}

impl NodeTable {
    fn build(f: &dyn Fn(f64) -> f64, origin: f64, lo: f64, hi: f64, h: f64, tol: f64) -> Result<Self, ReductionError> {
        let nlo = ((origin - lo) / h).ceil().max(0.0) as isize;
        let nhi = ((hi - origin) / h).ceil().max(0.0) as isize;
        let mut values = vec![0.0; (nlo + nhi + 1) as usize];
        let zero = nlo as usize;
        let mut acc = 0.0;
        for i in 1..=nhi as usize {
            let a = origin + (i - 1) as f64 * h;
            acc += integrate(f, a, a + h, tol, tol)?;
            values[zero + i] = acc;
        }
        acc = 0.0;
        for i in 1..=nlo as usize {
            let b = origin - (i - 1) as f64 * h;
            acc -= integrate(f, b - h, b, tol, tol)?;
            values[zero - i] = acc;
        }
        Ok(Self {
            origin,
            h,
            lo: -nlo,
            values,
        })
    }

    fn hi(&self) -> isize {
        self.lo + self.values.len() as isize - 1
    }

    fn contains(&self, x: f64) -> bool {
        let pos = (x - self.origin) / self.h;
        pos >= self.lo as f64 - 0.5 && pos <= self.hi() as f64 + 0.5
    }

    fn eval(&self, f: &dyn Fn(f64) -> f64, x: f64, tol: f64) -> Result<f64, ReductionError> {
        let i = (((x - self.origin) / self.h).round() as isize).clamp(self.lo, self.hi());
        let node = self.origin + i as f64 * self.h;
        let base = self.values[(i - self.lo) as usize];
        Ok(base + integrate(f, node, x, tol, tol)?)
    }
}

#[derive(Clone)]
enum Kind {
    /// Integrand with period `period`; `increment` is the integral over one period.
    Periodic { period: f64, increment: f64 },
    /// Plain table on a finite window.
    Window,
    /// Integrand with an even double pole of zero residue between cells of
    /// width `period`, each cell symmetric about `center0 + j·period`. The
    /// table holds `∫_center^{center+s}` for `s ≥ 0`; `increment` is the
    /// finite-part integral over one period.
    Cells { period: f64, increment: f64, center0: f64, half_width: f64 },
}

/// Antiderivative `x ↦ ∫₀ˣ f` backed by a node table.
#[derive(Clone)]
pub struct Primitive {
    f: RealFn,
    table: NodeTable,
    kind: Kind,
    offset: f64,
    tol: f64,
}

impl Primitive {
    /// For a periodic integrand; the table spans one period from 0.
    pub fn periodic(f: RealFn, period: f64, nodes: usize, tol: f64) -> Result<Self, ReductionError> {
        let h = period / nodes as f64;
        let table = NodeTable::build(f.as_ref(), 0.0, 0.0, period, h, tol)?;
        let increment = table.values[table.values.len() - 1];
        Ok(Self {
            f,
            table,
            kind: Kind::Periodic { period, increment },
            offset: 0.0,
            tol,
        })
    }

    /// For a general integrand on `[lo, hi] ∋ 0`.
    pub fn window(f: RealFn, lo: f64, hi: f64, h: f64, tol: f64) -> Result<Self, ReductionError> {
        let table = NodeTable::build(f.as_ref(), 0.0, lo.min(0.0), hi.max(0.0), h, tol)?;
        Ok(Self {
            f,
            table,
            kind: Kind::Window,
            offset: 0.0,
            tol,
        })
    }

    /// For an integrand even about `center0 + j·period` with double poles of
    /// zero residue at `center0 + (j + ½)·period`. `increment` is the
    /// finite-part integral over a period and must be supplied in closed form.
    /// Evaluation closer than `exclusion` to a pole is refused.
    pub fn cells(
        f: RealFn,
        period: f64,
        center0: f64,
        increment: f64,
        exclusion: f64,
        nodes: usize,
        tol: f64,
    ) -> Result<Self, ReductionError> {
        let half_width = 0.5 * period - exclusion;
        let h = half_width / nodes as f64;
        let table = NodeTable::build(f.as_ref(), center0, center0, center0 + half_width, h, tol)?;
        let mut p = Self {
            f,
            table,
            kind: Kind::Cells {
                period,
                increment,
                center0,
                half_width,
            },
            offset: 0.0,
            tol,
        };
        p.offset = p.raw(0.0)?;
        Ok(p)
    }

    fn raw(&self, x: f64) -> Result<f64, ReductionError> {
        let f = self.f.as_ref();
        match self.kind {
            Kind::Periodic { period, increment } => {
                let j = (x / period).floor();
                let r = x - j * period;
                Ok(j * increment + self.table.eval(f, r, self.tol)?)
            }
            Kind::Window => {
                if !self.table.contains(x) {
                    return Err(ReductionError::OutsideWindow(x));
                }
                self.table.eval(f, x, self.tol)
            }
            Kind::Cells {
                period,
                increment,
                center0,
                half_width,
            } => {
                let j = ((x - center0) / period).round();
                let s = x - center0 - j * period;
                if s.abs() > half_width {
                    return Err(ReductionError::Pole { at: x });
                }
                let g = self.table.eval(f, center0 + s.abs(), self.tol)?;
                let odd = if s < 0.0 { -g } else { g };
                Ok(j * increment + odd)
            }
        }
    }

    /// `∫₀ˣ f`.
    pub fn eval(&self, x: f64) -> Result<f64, ReductionError> {
        Ok(self.raw(x)? - self.offset)
    }

    pub fn integrand(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}
