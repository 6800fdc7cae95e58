//! Grid dumps: `x, t, Re u, Im u, Re v, Im v, Re f, Im f, mask`.

use std::io::Write;

use akns::families::Bundle;
use akns::jet::Field;
use akns::verify::{Grid, Point, ScalarMode};
use num_complex::Complex64;

use crate::error::CliError;

pub const HEADER: [&str; 9] = ["x", "t", "re_u", "im_u", "re_v", "im_v", "re_f", "im_f", "mask"];

/// Shortest decimal that parses back to the same `f64`; exponent notation
/// outside `[1e-5, 1e16)` so tiny or huge values stay compact.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub t: f64,
    /// `[u, v, f]`, or `None` where the bundle is masked.
    pub values: Option<[Complex64; 3]>,
}

fn sample_at<S: Field>(b: &Bundle, x: f64, t: f64) -> Result<Option<[Complex64; 3]>, CliError> {
    match b.eval::<S>(x, t) {
        Ok(fl) => {
            let vals = [fl.u.value().to_c64(), fl.v.value().to_c64(), fl.f.value().to_c64()];
            if vals.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(CliError::Eval(format!("non-finite field value at (x, t) = ({x}, {t})")));
            }
            Ok(Some(vals))
        }
        Err(e) if e.is_mask() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Evaluates `u, v, f` over the grid, row-major with t outer.
pub fn sample(b: &Bundle, grid: &Grid, mode: ScalarMode) -> Result<Vec<Sample>, CliError> {
    let complex = mode.complex_for(b);
    grid.points()
        .into_iter()
        .map(|Point { x, t }| {
            let values = if complex {
                sample_at::<Complex64>(b, x, t)?
            } else {
                sample_at::<f64>(b, x, t)?
            };
            Ok(Sample { x, t, values })
        })
        .collect()
}

pub fn write_csv<W: Write>(out: W, samples: &[Sample]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for s in samples {
        let mut rec = vec![fmt_f64(s.x), fmt_f64(s.t)];
        match s.values {
            Some(vals) => {
                for c in vals {
                    rec.push(fmt_f64(c.re));
                    rec.push(fmt_f64(c.im));
                }
                rec.push("0".into());
            }
            None => {
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push("1".into());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::Eval(e.to_string()))?;
    Ok(())
}

pub fn to_csv_string(samples: &[Sample]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, samples)?;
    String::from_utf8(buf).map_err(|e| CliError::Eval(e.to_string()))
}

/// Reads a dump back.
pub fn read_csv(text: &str) -> Result<Vec<Sample>, CliError> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(CliError::Config(format!("unexpected dump header {header:?}")));
    }
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse().map_err(|_| CliError::Config(format!("`{s}` is not a number")))
    };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let (x, t) = (num(&rec[0])?, num(&rec[1])?);
        let values = match &rec[8] {
            "1" => None,
            "0" => {
                let c = |i: usize| -> Result<Complex64, CliError> { Ok(Complex64::new(num(&rec[i])?, num(&rec[i + 1])?)) };
                Some([c(2)?, c(4)?, c(6)?])
            }
            other => return Err(CliError::Config(format!("mask `{other}` is neither 0 nor 1"))),
        };
        out.push(Sample { x, t, values });
    }
    Ok(out)
}

/// gnuplot script plotting Re u from `csv_path`.
pub fn gnuplot_script(csv_path: &str, grid: &Grid, label: &str) -> String {
    format!(
        "# {label}\n\
         set datafile separator ','\n\
         set datafile missing ''\n\
         set xlabel 'x'\n\
         set ylabel 't'\n\
         set zlabel 'Re u'\n\
         set dgrid3d {nt},{nx}\n\
         set pm3d\n\
         splot '{csv_path}' skip 1 using 1:2:3 with pm3d notitle\n",
        nt = grid.nt,
        nx = grid.nx,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        for v in [0.0, -0.5714285714285714, 1.0 / 3.0, 1e-300, 6.02e23, -1.0, 123456.789, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_f64(-1.0), "-1");
        assert_eq!(fmt_f64(-0.5714285714285714), "-0.5714285714285714");
        assert_eq!(fmt_f64(2.5e-7), "2.5e-7");
    }

    #[test]
    fn csv_round_trip_with_mask() {
        let s = vec![
            Sample {
                x: 0.1,
                t: -2.0,
                values: Some([Complex64::new(1.0, -0.0), Complex64::new(0.3, 2e-9), Complex64::new(-1.5, 0.0)]),
            },
            Sample { x: 0.2, t: -2.0, values: None },
        ];
        let text = to_csv_string(&s).unwrap();
        assert!(text.ends_with("0.2,-2,,,,,,,1\n"), "{text}");
        assert!(!text.contains("NaN"));
        assert_eq!(read_csv(&text).unwrap(), s);
    }
}
