use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wavegeom::cli::{self, CliError, RunOptions, Scenario};

/// Envelope and Berry-phase analysis of waves in modulated 1D media.
#[derive(Debug, Parser)]
#[command(name = "wavegeom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file (one scenario or a JSON array of them).
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: Common,
    },
    /// Run a built-in scenario.
    Preset {
        name: String,
        #[command(flatten)]
        opts: Common,
    },
    /// List the built-in scenarios.
    Presets,
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Integration step in units of 1/k (overrides the scenario).
    #[arg(long)]
    step: Option<f64>,
    /// Seed for randomized suites; scenario physics does not use it.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions { out: self.out.clone(), step: self.step, seed: self.seed }
    }
}

fn report(e: &CliError) {
    eprintln!("{}", serde_json::to_string(&e.record()).expect("error record serializes"));
}

fn execute(list: &[Scenario], opts: &RunOptions) -> ExitCode {
    let mut ok = true;
    for r in cli::run_batch(list, opts) {
        match r {
            Ok(outcome) => {
                for f in &outcome.files {
                    println!("{}", f.display());
                }
            }
            Err(e) => {
                ok = false;
                report(&e);
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let loaded = match &args.command {
        Command::Presets => {
            for n in cli::preset_names() {
                println!("{n}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Run { config, opts } => std::fs::read_to_string(config)
            .map_err(|e| CliError::Io { path: config.clone(), source: e })
            .and_then(|text| cli::parse_scenarios(&text, &config.display().to_string()))
            .map(|l| (l, opts)),
        Command::Preset { name, opts } => cli::preset(name).map(|l| (l, opts)),
    };
    match loaded {
        Ok((list, opts)) => execute(&list, &opts.options()),
        Err(e) => {
            report(&e);
            ExitCode::from(2)
        }
    }
}
