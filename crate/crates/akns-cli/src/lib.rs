//! Command-line front end: verification runs, transformations, reductions,
//! grid export and special-function tables.
//!
//! Exit status is 0 for PASS, 1 for FAIL or a violated constraint, 2 for bad
//! input and 3 for evaluation or I/O failures (panics included).

pub mod build;
pub mod commands;
pub mod config;
pub mod dump;
pub mod error;
pub mod summary;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::Outcome;
pub use config::{RunArgs, RunConfig};
pub use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "akns", version, about = "Residual certification of variable-coefficient AKNS solution families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Residual report of a family on a grid; exit 0 iff it passes.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Evaluate at the unmasked points of a grid dump instead of the grid.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Apply the finite transformation `repeat` times and verify the result.
    Transform {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Echo the derived constants of a reduction and verify the assembled family.
    Reduce {
        /// 1 or 2; sets the family.
        #[arg(long)]
        case: Option<u8>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write the grid dump, a per-row summary and optionally a gnuplot script.
    Export {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Tables of sn, cn, dn and K.
    Specfun(commands::SpecfunArgs),
}

/// Parses `argv` and runs the subcommand. Never panics on bad input; panics
/// inside a command are left to the caller.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let res = match &cli.command {
        Command::Verify { run, points } => commands::verify(run, points.as_deref()),
        Command::Transform { run } => commands::transform(run),
        Command::Reduce { case, run } => commands::reduce(run, *case),
        Command::Export { run } => commands::export(run),
        Command::Specfun(a) => commands::specfun(a),
    };
    res.unwrap_or_else(|e| Outcome {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    })
}
