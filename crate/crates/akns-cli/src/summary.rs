//! Per-row description of an exported surface: range of Re u, fronts in f and
//! the spatial period of the background.

use akns::verify::analysis::{background_period, front_band, sign_changes};
use serde::Serialize;

use crate::dump::Sample;

/// Fraction of the row's f-swing that still counts as inside the front.
const FRONT_LEVEL: f64 = 0.999;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowSummary {
    pub t: f64,
    pub re_u_min: f64,
    pub re_u_max: f64,
    /// Zeros of `Re f − (max + min)/2`.
    pub fronts: Vec<f64>,
    /// x-range where the front dominates; maxima inside it are ignored.
    pub front_band: Option<(f64, f64)>,
    /// Median spacing of maxima of `Re(u·v)` away from the front.
    pub period: Option<f64>,
    pub masked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodSummary {
    /// Median of the row periods.
    pub measured: Option<f64>,
    pub predicted: Option<f64>,
    pub rel_err: Option<f64>,
    pub rows_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExportSummary {
    pub label: String,
    pub rows: Vec<RowSummary>,
    pub masked: usize,
    /// Every row has exactly one front.
    pub single_front: bool,
    pub period: PeriodSummary,
    pub observable: &'static str,
    pub notes: Vec<String>,
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn row(t: f64, cells: &[Sample]) -> RowSummary {
    let live: Vec<_> = cells.iter().filter_map(|s| s.values.map(|v| (s.x, v))).collect();
    let xs: Vec<f64> = live.iter().map(|(x, _)| *x).collect();
    let re_u: Vec<f64> = live.iter().map(|(_, v)| v[0].re).collect();
    let w: Vec<f64> = live.iter().map(|(_, v)| (v[0] * v[1]).re).collect();
    let f: Vec<f64> = live.iter().map(|(_, v)| v[2].re).collect();
    let (fmin, fmax) = f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let mid = 0.5 * (fmin + fmax);
    let centred: Vec<f64> = f.iter().map(|v| v - mid).collect();
    let band = front_band(&xs, &centred, FRONT_LEVEL);
    RowSummary {
        t,
        re_u_min: re_u.iter().copied().fold(f64::INFINITY, f64::min),
        re_u_max: re_u.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        fronts: sign_changes(&xs, &centred),
        front_band: band,
        period: background_period(&xs, &w, band),
        masked: cells.len() - live.len(),
    }
}

/// `samples` must be row-major with `nx` points per row.
pub fn summarize(label: String, samples: &[Sample], nx: usize, predicted: Option<f64>, notes: Vec<String>) -> ExportSummary {
    let rows: Vec<RowSummary> = samples.chunks(nx).map(|c| row(c[0].t, c)).collect();
    let mut periods: Vec<f64> = rows.iter().filter_map(|r| r.period).collect();
    let rows_used = periods.len();
    let measured = median(&mut periods);
    let rel_err = match (measured, predicted) {
        (Some(m), Some(p)) => Some((m - p).abs() / p.abs()),
        _ => None,
    };
    ExportSummary {
        label,
        masked: rows.iter().map(|r| r.masked).sum(),
        single_front: rows.iter().all(|r| r.fronts.len() == 1),
        rows,
        period: PeriodSummary {
            measured,
            predicted,
            rel_err,
            rows_used,
        },
        observable: "Re(u*v)",
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn synthetic_front_on_wave() {
        let nx = 801;
        let mut s = Vec::new();
        for t in [0.0, 1.0] {
            for i in 0..nx {
                let x = -20.0 + 40.0 * i as f64 / (nx - 1) as f64;
                let u = Complex64::new((1.3 * x).cos() + 2.0, 0.0);
                let f = Complex64::new((x - 2.0 * t).tanh(), 0.0);
                s.push(Sample {
                    x,
                    t,
                    values: Some([u, Complex64::new(1.0, 0.0), f]),
                });
            }
        }
        let p = std::f64::consts::TAU / 1.3;
        let sum = summarize("synthetic".into(), &s, nx, Some(p), vec![]);
        assert!(sum.single_front);
        assert!((sum.rows[1].fronts[0] - 2.0).abs() < 1e-3);
        assert!(sum.period.rel_err.unwrap() < 1e-3, "{:?}", sum.period);
    }
}
