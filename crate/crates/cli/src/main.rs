use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use relcoulomb_cli::args::Cli;
use relcoulomb_cli::commands::run;
use relcoulomb_cli::CliError;

fn write_output(text: &str, cli: &Cli) -> Result<(), CliError> {
    match &cli.global.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli.command, &cli.global) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = write_output(&report.text, &cli) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match report.failure {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        None => ExitCode::SUCCESS,
    }
}
