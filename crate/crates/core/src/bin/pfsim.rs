use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parafermion_sim::protocols::GateBook;
use parafermion_sim::runner::{run, BackendChoice, ExperimentKind, RunConfig, RunOutput, Status};
use parafermion_sim::Error;

#[derive(Parser)]
#[command(name = "pfsim", version, about = "Parafermion defect experiments on qutrit plaquette lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        #[arg(long, value_enum)]
        backend: Option<BackendChoice>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the parafermion braid algebra.
    AlgebraCheck {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gate counts and feasibility figures for the protocol in a config.
    Resources {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(output: &RunOutput, out: Option<&Path>) -> Result<(), Error> {
    let json = output.to_json();
    match out {
        Some(path) => std::fs::write(path, json).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<Status, Error> {
    let (cfg, base, out) = match cli.command {
        Command::Run { config, backend, shots, seed, out } => {
            let mut cfg = RunConfig::load(&config)?;
            cfg.backend = backend.unwrap_or(cfg.backend);
            cfg.shots = shots.unwrap_or(cfg.shots);
            cfg.seed = seed.unwrap_or(cfg.seed);
            (cfg, config.parent().map(Path::to_path_buf), out)
        }
        Command::AlgebraCheck { out } => (RunConfig::new(ExperimentKind::AlgebraCheck), None, out),
        Command::Resources { config, out } => {
            let mut cfg = RunConfig::load(&config)?;
            if cfg.experiment != ExperimentKind::Resources {
                cfg.resources.protocol = cfg.experiment;
                cfg.experiment = ExperimentKind::Resources;
            }
            (cfg, config.parent().map(Path::to_path_buf), out)
        }
    };
    let book = GateBook::build()?;
    let output = run(&cfg, &book, base.as_deref())?;
    emit(&output, out.as_deref())?;
    if output.status != Status::Success {
        eprintln!("pfsim: run finished with status {:?}", output.status);
    }
    Ok(output.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let status = execute(cli).unwrap_or_else(|e| {
        eprintln!("pfsim: {e}");
        Status::of_error(&e)
    });
    ExitCode::from(status.code() as u8)
}
