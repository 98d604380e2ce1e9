use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use poroelastic::cli_io::{self, Command, RunOptions, EXIT_PARSE};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Validate,
    Classify,
    Spectrum,
    Probe,
    Simulate,
    DecayFit,
    Report,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Classify => Command::Classify,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Probe => Command::Probe,
            Cmd::Simulate => Command::Simulate,
            Cmd::DecayFit => Command::DecayFit,
            Cmd::Report => Command::Report,
        }
    }
}

/// Stability analysis of a one-dimensional elastic solid with double porosity.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative zero tolerance for the stability numbers.
    #[arg(long)]
    tol: Option<f64>,
    /// Run analyses even if the parameters fail validation.
    #[arg(long)]
    override_validation: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", cli.config.display());
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    let mut cfg = match cli_io::parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", cli.config.display());
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            eprintln!("--tol must be positive and finite");
            return ExitCode::from(EXIT_PARSE as u8);
        }
        cfg.tol = tol;
    }
    let opts = RunOptions { override_validation: cli.override_validation };
    let outcome = cli_io::run(cli.command.into(), &cfg, &opts);
    for d in &outcome.diagnostics {
        eprintln!("{d}");
    }
    if let Err(e) = cli_io::write_artifacts(&outcome, cli.out.as_deref()) {
        eprintln!("cannot write output: {e}");
        return ExitCode::from(cli_io::EXIT_NUMERICAL as u8);
    }
    ExitCode::from(outcome.exit_code as u8)
}
