//! Row-wise measurements on sampled fields.

/// Locations of the interior local maxima of `y`, refined by a parabola
/// through the three neighbouring samples.
pub fn local_maxima(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || !(b > a && b >= c) {
            continue;
        }
        let h = x[i + 1] - x[i];
        let den = a - 2.0 * b + c;
        let off = if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 };
        out.push(x[i] + off * h);
    }
    out
}

/// Mean spacing of consecutive maxima of `y` inside `[lo, hi]`; needs at
/// least three maxima.
pub fn row_period(x: &[f64], y: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let m: Vec<f64> = local_maxima(x, y)
        .into_iter()
        .filter(|v| *v >= lo && *v <= hi)
        .collect();
    if m.len() < 3 {
        return None;
    }
    Some((m[m.len() - 1] - m[0]) / (m.len() - 1) as f64)
}

/// Positions where `y` changes sign, by linear interpolation.
pub fn sign_changes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..y.len() {
        let (a, b) = (y[i - 1], y[i]);
        if a.is_finite() && b.is_finite() && a != 0.0 && a.signum() != b.signum() {
            out.push(x[i - 1] + (x[i] - x[i - 1]) * a / (a - b));
        }
    }
    out
}

/// Interval around the zero crossings of `f` where `|f|` stays below
/// `level·max|f|`; this is where a tanh-type front sits.
pub fn front_band(x: &[f64], f: &[f64], level: f64) -> Option<(f64, f64)> {
    let fmax = f.iter().filter(|v| v.is_finite()).fold(0.0f64, |a, v| a.max(v.abs()));
    let inside: Vec<f64> = x
        .iter()
        .zip(f)
        .filter(|(_, v)| v.is_finite() && v.abs() < level * fmax)
        .map(|(x, _)| *x)
        .collect();
    Some((*inside.first()?, *inside.last()?))
}

/// Median spacing of consecutive maxima of `y` whose interval does not
/// touch `band`.
pub fn background_period(x: &[f64], y: &[f64], band: Option<(f64, f64)>) -> Option<f64> {
    let m = local_maxima(x, y);
    let mut gaps: Vec<f64> = m
        .windows(2)
        .filter(|w| band.is_none_or(|(lo, hi)| w[1] < lo || w[0] > hi))
        .map(|w| w[1] - w[0])
        .collect();
    if gaps.is_empty() {
        return None;
    }
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len();
    Some(if n % 2 == 1 { gaps[n / 2] } else { 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_of_a_cosine() {
        let x: Vec<f64> = (0..2001).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 1.3).cos()).collect();
        let p = row_period(&x, &y, 0.0, 20.0).unwrap();
        assert!((p - std::f64::consts::TAU / 1.3).abs() < 1e-4);
    }

    #[test]
    fn band_excludes_the_front() {
        let x: Vec<f64> = (0..2001).map(|i| -20.0 + i as f64 * 0.02).collect();
        let f: Vec<f64> = x.iter().map(|v| (v - 3.0).tanh()).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 1.1).cos() + 2.0 * (-(v - 3.0).powi(2)).exp()).collect();
        let band = front_band(&x, &f, 0.999).unwrap();
        assert!(band.0 < 3.0 && band.1 > 3.0 && band.1 - band.0 < 10.0);
        let p = background_period(&x, &y, Some(band)).unwrap();
        assert!((p - std::f64::consts::TAU / 1.1).abs() < 1e-3);
    }

    #[test]
    fn one_sign_change_of_tanh() {
        let x: Vec<f64> = (0..101).map(|i| -5.0 + i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| (v - 0.33).tanh()).collect();
        let z = sign_changes(&x, &y);
        assert_eq!(z.len(), 1);
        assert!((z[0] - 0.33).abs() < 1e-3);
    }
}
