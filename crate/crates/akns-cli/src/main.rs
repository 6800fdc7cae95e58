use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<_> = std::env::args_os().collect();
    let out = match std::panic::catch_unwind(|| akns_cli::run(argv)) {
        Ok(o) => o,
        Err(_) => akns_cli::Outcome {
            code: 3,
            stdout: String::new(),
            stderr: "error: internal panic\n".into(),
        },
    };
    let _ = std::io::stdout().lock().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code)
}
