use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rumin_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let artifact = match rumin_cli::run(&cli) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = match artifact.emit(cli.common.format, cli.common.out_dir.as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).is_err() {
        return ExitCode::from(2);
    }
    for w in &artifact.warnings {
        eprintln!("warning: {w}");
    }
    for f in &artifact.failures {
        eprintln!("FAILED {f}");
    }
    if artifact.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
