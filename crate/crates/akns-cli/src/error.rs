use std::path::PathBuf;

use akns::families::FamilyError;
use akns::reduction::ReductionError;
use akns::specfun::SpecfunError;
use akns::verify::VerifyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 1 for a violated constraint, 2 for bad input, 3 for evaluation or I/O trouble.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Constraint(_) => 1,
            CliError::Config(_) | CliError::Toml(_) => 2,
            CliError::Eval(_) | CliError::Io { .. } | CliError::Csv(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<SpecfunError> for CliError {
    fn from(e: SpecfunError) -> Self {
        match e {
            SpecfunError::ModulusOutOfRange(_) => CliError::Config(e.to_string()),
            other => CliError::Eval(other.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::ConstraintViolation(s) => CliError::Constraint(s),
            ReductionError::ZeroFreeParameter | ReductionError::NoRoot(_) => CliError::Config(e.to_string()),
            ReductionError::Specfun(s) => s.into(),
            other => CliError::Eval(other.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::InvalidParams(_)
            | FamilyError::LambdaNonzero(_)
            | FamilyError::ComplexParameter(_)
            | FamilyError::NeedsComplex => CliError::Config(e.to_string()),
            FamilyError::Reduction(r) => r.into(),
            FamilyError::Specfun(s) => s.into(),
            other => CliError::Eval(other.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Grid(s) => CliError::Config(s),
            VerifyError::Family(f) => f.into(),
            VerifyError::Evaluation { ref source, .. } => match CliError::from(source.clone()) {
                c @ CliError::Config(_) => c,
                _ => CliError::Eval(e.to_string()),
            },
            other => CliError::Eval(other.to_string()),
        }
    }
}
