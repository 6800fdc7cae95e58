//! Run configuration: a TOML file with one flat section per family, with
//! command-line flags layered on top.

use std::path::{Path, PathBuf};

use akns::specfun::SnConvention;
use akns::verify::{Grid, ScalarMode};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[default]
    Seed,
    Case1,
    Case2,
}

/// Closed-form sn profile or numeric integration of the first integral.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Sn,
    Numeric,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FormularyArg {
    #[default]
    Printed,
    Lax,
}

impl From<FormularyArg> for akns::reduction::Formulary {
    fn from(f: FormularyArg) -> Self {
        match f {
            FormularyArg::Printed => Self::Printed,
            FormularyArg::Lax => Self::Lax,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScalarArg {
    #[default]
    Auto,
    Real,
    Complex,
}

impl From<ScalarArg> for ScalarMode {
    fn from(s: ScalarArg) -> Self {
        match s {
            ScalarArg::Auto => ScalarMode::Auto,
            ScalarArg::Real => ScalarMode::Real,
            ScalarArg::Complex => ScalarMode::Complex,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    #[default]
    Modulus,
    Parameter,
}

impl From<ConventionArg> for SnConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Modulus => SnConvention::Modulus,
            ConventionArg::Parameter => SnConvention::Parameter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedSection {
    pub alpha: f64,
    #[serde(default)]
    pub alpha_im: f64,
    /// δ(t) as ascending polynomial coefficients.
    pub delta: Vec<f64>,
}

impl Default for SeedSection {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            alpha_im: 0.0,
            delta: vec![1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformSection {
    pub eps: f64,
    pub repeat: u32,
}

impl Default for TransformSection {
    fn default() -> Self {
        Self { eps: 0.0, repeat: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Case1Section {
    pub mode: Mode,
    pub formulary: FormularyArg,
    pub alpha: f64,
    pub lambda: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub n: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    /// F(0) for numeric integration.
    #[serde(rename = "F0")]
    pub f0: f64,
    /// Which admissible root of the re-derived constraint map.
    pub root: usize,
}

impl Default for Case1Section {
    fn default() -> Self {
        Self {
            mode: Mode::Sn,
            formulary: FormularyArg::Printed,
            alpha: 1.0,
            lambda: 0.1,
            k1: 0.0,
            k2: 0.0,
            k3: 1.0,
            n: 0.1,
            c: 1.0,
            c1: 0.0,
            c2: 0.0,
            f0: 0.0,
            root: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Case2Section {
    pub mode: Mode,
    pub formulary: FormularyArg,
    pub alpha: f64,
    pub lambda: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub m: f64,
    /// δ, written C̃.
    #[serde(rename = "C")]
    pub c: f64,
    /// Normalisation of F̃₂, written C̃₁.
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    /// 1 to 8; when absent k1, k2, k3, l0, l1 are taken as given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<u8>,
}

impl Default for Case2Section {
    fn default() -> Self {
        Self {
            mode: Mode::Sn,
            formulary: FormularyArg::Printed,
            alpha: 1.0,
            lambda: 0.1,
            k1: 0.0,
            k2: 0.0,
            k3: 0.0,
            m: 0.5,
            c: 1.0,
            c1: 1.0,
            l0: None,
            l1: None,
            branch: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// JSON residual report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Grid dump.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gnuplot: Option<PathBuf>,
    /// Per-row summary of an export.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    /// Dense output (ξ, F, F_ξ) of the reduced ODE.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ode_csv: Option<PathBuf>,
    /// Where `transform` writes the composed configuration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub family: Family,
    /// Defaults to 1e-10 for the seed and 1e-6 for the reductions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub scalar: ScalarArg,
    #[serde(default)]
    pub sn_convention: ConventionArg,
    /// `field:value`, adds a constant to one field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub seed: SeedSection,
    #[serde(default)]
    pub transform: TransformSection,
    #[serde(default)]
    pub case1: Case1Section,
    #[serde(default)]
    pub case2: Case2Section,
}

impl RunConfig {
    pub fn from_toml(s: &str) -> Result<Self, CliError> {
        Ok(toml::from_str(s)?)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let s = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&s)
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol.unwrap_or(match self.family {
            Family::Seed => 1e-10,
            _ => 1e-6,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid.clone().unwrap_or_else(|| match self.family {
            Family::Seed => Grid::new((-10.0, 10.0), 101, (-5.0, 5.0), 51),
            Family::Case1 => Grid::new((-20.0, 20.0), 161, (-10.0, 15.0), 26),
            Family::Case2 => Grid::new((-8.0, 8.0), 81, (-1.5, 1.5), 7),
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = self.grid();
        if g.nx < 2 || g.nt < 2 {
            return Err(CliError::Config("grid needs nx, nt >= 2".into()));
        }
        let ends = [g.x_min, g.x_max, g.t_min, g.t_max];
        if ends.iter().any(|v| !v.is_finite()) || g.x_min >= g.x_max || g.t_min >= g.t_max {
            return Err(CliError::Config("grid needs finite bounds with x_min < x_max and t_min < t_max".into()));
        }
        let tol = self.rel_tol();
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(CliError::Config(format!("rel_tol {tol} outside (0, 1e-2]")));
        }
        if self.transform.repeat == 0 {
            return Err(CliError::Config("repeat must be at least 1".into()));
        }
        if let Some(p) = &self.perturb {
            parse_perturb(p)?;
        }
        Ok(())
    }
}

/// `lo:hi:n`.
pub fn parse_axis(s: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Config(format!("axis `{s}` is not lo:hi:n"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parts[0].trim().parse().map_err(|_| bad())?;
    let hi = parts[1].trim().parse().map_err(|_| bad())?;
    let n = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((lo, hi, n))
}

/// `x_lo:x_hi:nx,t_lo:t_hi:nt`.
pub fn parse_grid(s: &str) -> Result<Grid, CliError> {
    let (x, t) = s
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("grid `{s}` is not x_lo:x_hi:nx,t_lo:t_hi:nt")))?;
    let (x0, x1, nx) = parse_axis(x)?;
    let (t0, t1, nt) = parse_axis(t)?;
    Ok(Grid::new((x0, x1), nx, (t0, t1), nt))
}

/// `field:value`, e.g. `u:+0.01`.
pub fn parse_perturb(s: &str) -> Result<(akns::families::FieldName, f64), CliError> {
    let bad = |m: String| CliError::Config(format!("perturbation `{s}`: {m}"));
    let (f, v) = s.split_once(':').ok_or_else(|| bad("expected field:value".into()))?;
    let field = f.trim().parse().map_err(bad)?;
    let value: f64 = v.trim().parse().map_err(|_| bad("value is not a number".into()))?;
    Ok((field, value))
}

/// Flags shared by every run-style subcommand. Each one overrides the
/// corresponding config entry.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// `x_lo:x_hi:nx,t_lo:t_hi:nt`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Relative tolerance for PASS.
    #[arg(long = "tol")]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub scalar: Option<ScalarArg>,
    /// How `n` and `m` are read: as the modulus k or the parameter k².
    #[arg(long, value_enum)]
    pub sn_convention: Option<ConventionArg>,
    /// Corrupt one field by a constant, `field:value`.
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<String>,

    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k3: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long = "C", allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long = "C1", allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long = "C2", allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long = "F0", allow_hyphen_values = true)]
    pub f0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub branch: Option<u8>,
    #[arg(long)]
    pub root: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum)]
    pub formulary: Option<FormularyArg>,
    /// δ(t) coefficients, ascending, comma separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub repeat: Option<u32>,

    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Grid dump path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub ode_csv: Option<PathBuf>,
    /// Where `transform` writes the composed configuration.
    #[arg(long)]
    pub config_out: Option<PathBuf>,
}

fn set<T>(dst: &mut T, v: &Option<T>)
where
    T: Clone,
{
    if let Some(v) = v {
        *dst = v.clone();
    }
}

impl RunArgs {
    /// File values (if any), then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn reject(&self, family: Family, names: &[(&str, bool)]) -> Result<(), CliError> {
        for (name, given) in names {
            if *given {
                return Err(CliError::Config(format!("--{name} does not apply to family {family:?}")));
            }
        }
        Ok(())
    }

    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        set(&mut cfg.family, &self.family);
        if let Some(g) = &self.grid {
            cfg.grid = Some(parse_grid(g)?);
        }
        if self.tol.is_some() {
            cfg.rel_tol = self.tol;
        }
        set(&mut cfg.scalar, &self.scalar);
        set(&mut cfg.sn_convention, &self.sn_convention);
        if self.perturb.is_some() {
            cfg.perturb = self.perturb.clone();
        }
        set(&mut cfg.transform.eps, &self.eps);
        set(&mut cfg.transform.repeat, &self.repeat);

        let o = &mut cfg.output;
        for (dst, src) in [
            (&mut o.report, &self.report),
            (&mut o.csv, &self.csv),
            (&mut o.gnuplot, &self.gnuplot),
            (&mut o.summary, &self.summary),
            (&mut o.ode_csv, &self.ode_csv),
            (&mut o.config, &self.config_out),
        ] {
            if src.is_some() {
                *dst = src.clone();
            }
        }

        match cfg.family {
            Family::Seed => {
                self.reject(
                    Family::Seed,
                    &[
                        ("lambda", self.lambda.is_some()),
                        ("k1", self.k1.is_some()),
                        ("k2", self.k2.is_some()),
                        ("k3", self.k3.is_some()),
                        ("n", self.n.is_some()),
                        ("m", self.m.is_some()),
                        ("C", self.c.is_some()),
                        ("C1", self.c1.is_some()),
                        ("C2", self.c2.is_some()),
                        ("F0", self.f0.is_some()),
                        ("l0", self.l0.is_some()),
                        ("l1", self.l1.is_some()),
                        ("branch", self.branch.is_some()),
                        ("root", self.root.is_some()),
                        ("mode", self.mode.is_some()),
                        ("formulary", self.formulary.is_some()),
                    ],
                )?;
                let s = &mut cfg.seed;
                set(&mut s.alpha, &self.alpha);
                set(&mut s.delta, &self.delta);
            }
            Family::Case1 => {
                self.reject(
                    Family::Case1,
                    &[
                        ("m", self.m.is_some()),
                        ("l0", self.l0.is_some()),
                        ("l1", self.l1.is_some()),
                        ("branch", self.branch.is_some()),
                        ("delta", self.delta.is_some()),
                    ],
                )?;
                let s = &mut cfg.case1;
                set(&mut s.mode, &self.mode);
                set(&mut s.formulary, &self.formulary);
                set(&mut s.alpha, &self.alpha);
                set(&mut s.lambda, &self.lambda);
                set(&mut s.k1, &self.k1);
                set(&mut s.k2, &self.k2);
                set(&mut s.k3, &self.k3);
                set(&mut s.n, &self.n);
                set(&mut s.c, &self.c);
                set(&mut s.c1, &self.c1);
                set(&mut s.c2, &self.c2);
                set(&mut s.f0, &self.f0);
                set(&mut s.root, &self.root);
            }
            Family::Case2 => {
                self.reject(
                    Family::Case2,
                    &[
                        ("n", self.n.is_some()),
                        ("C2", self.c2.is_some()),
                        ("F0", self.f0.is_some()),
                        ("root", self.root.is_some()),
                        ("delta", self.delta.is_some()),
                    ],
                )?;
                let s = &mut cfg.case2;
                set(&mut s.mode, &self.mode);
                set(&mut s.formulary, &self.formulary);
                set(&mut s.alpha, &self.alpha);
                set(&mut s.lambda, &self.lambda);
                set(&mut s.k1, &self.k1);
                set(&mut s.k2, &self.k2);
                set(&mut s.k3, &self.k3);
                set(&mut s.m, &self.m);
                set(&mut s.c, &self.c);
                set(&mut s.c1, &self.c1);
                if self.l0.is_some() {
                    s.l0 = self.l0;
                }
                if self.l1.is_some() {
                    s.l1 = self.l1;
                }
                if self.branch.is_some() {
                    s.branch = self.branch;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag() {
        let g = parse_grid("-10:10:101,-5:5:51").unwrap();
        assert_eq!(g, Grid::new((-10.0, 10.0), 101, (-5.0, 5.0), 51));
        assert!(parse_grid("-10:10,-5:5:51").is_err());
    }

    #[test]
    fn perturb_flag() {
        let (f, v) = parse_perturb("u:+0.01").unwrap();
        assert_eq!(f, akns::families::FieldName::U);
        assert_eq!(v, 0.01);
        assert!(parse_perturb("w:1").is_err());
    }

    #[test]
    fn default_round_trip() {
        let a = RunConfig::default().to_toml().unwrap();
        let b = RunConfig::from_toml(&a).unwrap().to_toml().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invariants() {
        let mut c = RunConfig::default();
        c.validate().unwrap();
        c.rel_tol = Some(0.1);
        assert!(c.validate().is_err());
        c.rel_tol = None;
        c.grid = Some(Grid::new((1.0, 0.0), 3, (0.0, 1.0), 3));
        assert!(c.validate().is_err());
        c.grid = Some(Grid::new((0.0, 1.0), 1, (0.0, 1.0), 3));
        assert!(c.validate().is_err());
    }

    #[test]
    fn flags_checked_against_family() {
        let args = RunArgs {
            m: Some(0.5),
            ..Default::default()
        };
        let mut c = RunConfig::default();
        assert!(args.apply(&mut c).is_err());
    }
}
