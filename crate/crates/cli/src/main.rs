//! Binary entry point: parse arguments, run the command, write the document
//! to `--out` or stdout, and map failures to exit codes with a JSON error
//! report on stderr. Usage errors exit 2 via the argument parser itself.

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use optomech_cli::run::{self, AppError, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let doc = match run::execute(&cli) {
        Ok(doc) => doc,
        Err(err) => return fail(&err),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &doc),
        None => std::io::stdout().write_all(doc.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&AppError::io(e)),
    }
}

fn fail(err: &AppError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit)
}
