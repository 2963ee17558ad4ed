use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = kpcentral::cli::Args::parse();
    let outcome = kpcentral::cli::run(&args);
    if let Some(text) = &outcome.stderr {
        let _ = writeln!(std::io::stderr(), "{text}");
    }
    if !outcome.stdout.is_empty() {
        // a closed pipe is not an error worth reporting
        let _ = writeln!(std::io::stdout(), "{}", outcome.stdout);
    }
    ExitCode::from(outcome.exit_code)
}
