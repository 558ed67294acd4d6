//! `swdo` — experiment runner for the swarm-optimization / wavelet /
//! classifier toolkit.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error
//! (unreadable or malformed inputs), 3 release-gate failure from
//! `reproduce`.

mod commands;
mod kv;

use clap::error::ErrorKind;
use clap::Parser;
use std::process::exit;
use swdo::Error;

#[derive(Parser, Debug)]
#[command(
    name = "swdo",
    version,
    about = "Swarm optimizers, Haar sub-bands, a small trainable classifier, \
             and the statistics around them"
)]
struct Cli {
    /// Worker threads for parallel evaluation [default: all logical cores].
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand, Debug)]
enum Command {
    /// Run one optimizer on a standard benchmark and record its history.
    Bench(commands::BenchArgs),
    /// Decompose a grayscale PGM into its four wavelet sub-bands.
    Dwt(commands::DwtArgs),
    /// Train the small classifier and report held-out metrics.
    Train(commands::TrainArgs),
    /// Search the hyperparameter box with a swarm optimizer.
    Tune(commands::TuneArgs),
    /// Pairwise t-test matrix for a fold table (bundled fixture or CSV).
    Stats(commands::StatsArgs),
    /// Run the full release gate and print its pass/fail table.
    Reproduce(commands::ReproduceArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version are successes; everything else is usage.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                exit(0);
            }
            eprint!("{e}");
            exit(1);
        }
    };
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!("error: building the {workers}-worker pool: {e}");
            exit(1);
        }
    }
    let outcome = match cli.command {
        Command::Bench(args) => commands::bench(args).map(|()| 0),
        Command::Dwt(args) => commands::dwt(args).map(|()| 0),
        Command::Train(args) => commands::train(args).map(|()| 0),
        Command::Tune(args) => commands::tune(args).map(|()| 0),
        Command::Stats(args) => commands::stats(args).map(|()| 0),
        Command::Reproduce(args) => commands::reproduce(args),
    };
    match outcome {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            exit(match e {
                Error::Config(_) => 1,
                _ => 2,
            });
        }
    }
}
