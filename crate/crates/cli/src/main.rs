use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use condmean_lab::config::Config;
use condmean_lab::experiments::EXPERIMENTS;
use condmean_lab::report::Cell;

#[derive(Parser)]
#[command(
    name = "condmean-lab",
    version,
    about = "Verification experiments for the conditional distribution of the sample mean"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run {
        /// Path to the config document.
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the trial count.
        #[arg(long)]
        trials: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the available experiment names.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in EXPERIMENTS {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            seed,
            trials,
            out,
        } => match run(&config, seed, trials, out) {
            Ok(all_pass) => {
                if all_pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("condmean-lab: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}

fn run(
    config_path: &std::path::Path,
    seed: Option<u64>,
    trials: Option<u64>,
    out: Option<PathBuf>,
) -> Result<bool, condmean_lab::error::CliError> {
    let mut config = Config::load(config_path)?;
    if seed.is_some() {
        config.params.seed = seed;
    }
    if trials.is_some() {
        config.params.trials = trials;
    }
    if out.is_some() {
        config.output.dir = out;
    }

    // CONDMEAN_THREADS caps the worker count (default: all cores); results
    // are identical either way, only the wall time changes.
    let output = match std::env::var("CONDMEAN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&k| k > 0)
    {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| condmean_lab::error::CliError::Config(e.to_string()))?;
            pool.install(|| condmean_lab::run_to_files(&config))?
        }
        None => condmean_lab::run_to_files(&config)?,
    };

    let table = &output.table;
    let pass_col = table.column("pass").or_else(|| table.column("pass_proof"));
    let passed = table
        .rows
        .iter()
        .filter(|row| {
            pass_col
                .map(|i| matches!(row[i], Cell::Bool(true)))
                .unwrap_or(false)
        })
        .count();
    println!(
        "{}: {} rows, {} passed, overall {}",
        table.experiment,
        table.rows.len(),
        passed,
        if table.all_pass { "PASS" } else { "FAIL" }
    );
    for file in &output.files {
        println!("  wrote {}", file.display());
    }
    Ok(table.all_pass)
}
