//! Command-line driver for the tube-kernel experiments.
//!
//! `tubelab run <experiment> [flags]` executes one experiment, writes a
//! JSON or CSV result document, and exits with
//!
//! * 0 when every threshold passes,
//! * 1 on a threshold failure,
//! * 2 on an invalid configuration,
//! * 3 on a resolution or internal module error.
//!
//! `TUBELAB_THREADS` caps the internal thread pool.

mod output;
mod run;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "tubelab", version, about = "Spectral kernel laboratory on the sphere tube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its result document.
    Run(run::RunArgs),
}

fn main() {
    if let Ok(threads) = std::env::var("TUBELAB_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        } else {
            eprintln!("tubelab: ignoring unparsable TUBELAB_THREADS={threads:?}");
        }
    }
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run::execute(args),
    };
    std::process::exit(code);
}
