//! Command-line front end: ingest ensemble/measurement definition files,
//! run any pipeline stage, and emit human-readable reports or JSON.
//!
//! Exit codes: 0 success, 2 parse error, 3 state-invariant violation,
//! 4 unknown reference, 5 inequality violation (check only).

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use qinfo_cli::{commands, format, CliError};

#[derive(Parser)]
#[command(name = "qinfo", about = "Quantum ensembles, measurements, entropies, and Holevo-bound checks", version)]
struct Cli {
    /// Experiment definition file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Emit machine-readable JSON on stdout instead of the text report.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized commands (optimize, check).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Inequality margin tolerance in bits.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Holevo quantity of the ensemble, its range bounds, and the XQ Venn diagram.
    Chi,
    /// Simulate a named measurement: extracted information, residual, balance, outcome table.
    Measure {
        /// Name of a measurement defined in the input file.
        name: String,
        /// Dephase the ancilla before derived quantities.
        #[arg(long)]
        decohere: bool,
        /// Also print the tripartite Venn diagram of the post-measurement state.
        #[arg(long)]
        venn: bool,
    },
    /// Entropy Venn diagram of the ensemble state, or of a post-measurement state.
    Venn {
        /// Optional measurement name; with it, the tripartite diagram is reported.
        #[arg(long)]
        name: Option<String>,
    },
    /// Run a named measurement chain: per-step informations and the sequential bound.
    Sequential {
        /// Name of a chain defined in the input file.
        chain: String,
    },
    /// Maximize extracted information over rank-1 projective measurements.
    Optimize {
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 4000)]
        steps: usize,
        #[arg(long, default_value_t = 0.5)]
        step_size: f64,
        #[arg(long, default_value_t = 0.5)]
        decay: f64,
        /// Search on the Neumark-extended space of an n-outcome POVM.
        #[arg(long)]
        povm_outcomes: Option<usize>,
    },
    /// Run the randomized inequality suite.
    Check {
        /// Channel dimensions to cycle through.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dims: Vec<usize>,
        /// Cases for the largest sweeps.
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

fn load_experiment(input: &Option<PathBuf>) -> Result<format::Experiment, CliError> {
    let path = input
        .as_ref()
        .ok_or_else(|| CliError::Parse("--input <path> is required for this command".into()))?;
    format::EnsembleFile::load(path)?.build()
}

fn run(cli: &Cli) -> Result<commands::CommandOutput, CliError> {
    match &cli.command {
        Command::Chi => cmd_with_input(cli, |exp| commands::cmd_chi(exp, cli.tolerance)),
        Command::Measure {
            name,
            decohere,
            venn,
        } => cmd_with_input(cli, |exp| {
            commands::cmd_measure(exp, name, *decohere, *venn, cli.tolerance)
        }),
        Command::Venn { name } => {
            cmd_with_input(cli, |exp| commands::cmd_venn(exp, name.as_deref()))
        }
        Command::Sequential { chain } => {
            cmd_with_input(cli, |exp| commands::cmd_sequential(exp, chain, cli.tolerance))
        }
        Command::Optimize {
            restarts,
            steps,
            step_size,
            decay,
            povm_outcomes,
        } => cmd_with_input(cli, |exp| {
            commands::cmd_optimize(
                exp,
                *restarts,
                *steps,
                *step_size,
                *decay,
                *povm_outcomes,
                cli.seed,
            )
        }),
        Command::Check { dims, count } => {
            commands::cmd_check(dims, *count, cli.seed, cli.tolerance)
        }
    }
}

fn cmd_with_input<F>(cli: &Cli, f: F) -> Result<commands::CommandOutput, CliError>
where
    F: FnOnce(&format::Experiment) -> Result<commands::CommandOutput, CliError>,
{
    let exp = load_experiment(&cli.input)?;
    f(&exp)
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&output.json).expect("output serializes")
                );
            } else {
                print!("{}", output.text);
            }
            std::process::exit(output.exit_code);
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            std::process::exit(err.exit_code());
        }
    }
}
