use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;
mod svg;

use commands::Run;
use config::{ConfigError, Settings};
use output::Emitter;

#[derive(Debug, Parser)]
#[command(name = "staeckel", version, about = "Separable geodesic flows on S^3: diagrams, actions, monodromy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON file with any of the shared flags; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Critical-value curves as CSV and an SVG overlay
    Bifurcate,
    /// Action variables on a grid of integral values, CSV and ternary SVG
    Actions,
    /// Prolate monodromy matrix as JSON
    Monodromy,
    /// Normalisation, involution and blow-up chart of the parameters
    Polytope,
    /// Trajectory CSV and drift report
    Simulate,
    /// Rank and singularity type of a point or a value
    Classify,
    /// Full invariant suite; exits 1 on failure
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Bifurcate => "bifurcate",
            Command::Actions => "actions",
            Command::Monodromy => "monodromy",
            Command::Polytope => "polytope",
            Command::Simulate => "simulate",
            Command::Classify => "classify",
            Command::Verify => "verify",
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    let settings = match &cli.config {
        Some(path) => cli.settings.or(&Settings::load(path)?),
        None => cli.settings,
    };
    settings.validate()?;
    let spec = settings.spec()?;
    let out = Emitter::new(cli.command.name(), &settings)?;
    let run = Run { settings, spec, out };
    match cli.command {
        Command::Bifurcate => commands::bifurcate::run(&run),
        Command::Actions => commands::actions::run(&run),
        Command::Monodromy => commands::monodromy::run(&run),
        Command::Polytope => commands::polytope::run(&run),
        Command::Simulate => commands::simulate::run(&run),
        Command::Classify => commands::classify::run(&run),
        Command::Verify => commands::verify::run(&run),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<ConfigError>() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
