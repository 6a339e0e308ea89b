//! `dprp`: differentially private random projections and sign random
//! projections. One binary, subcommands for calibration, analytic tables,
//! privatization, similarity estimation, benchmarks, privacy audits, and
//! Monte Carlo oracles.
//!
//! All randomness flows from `--seed`; module streams derive from it by
//! labeled splitting, so identical invocations produce identical outputs.
//! Set `DPRP_LOG=debug` for progress logging.

// Parameter guards use `!(x > 0.0)` so NaN inputs are rejected along with
// out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "dprp", version, about = "Differentially private random projections")]
struct Cli {
    /// Root seed for all randomness.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads (defaults to the core count).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory; tables print to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Noise-scale tables over (epsilon, delta, sensitivity) grids.
    Calibrate(commands::calibrate::Args),
    /// Closed-form quantities (tail bounds, sign-change probabilities,
    /// variances) as CSV.
    Analytic(commands::analytic::Args),
    /// Privatize a dataset; writes sketches plus a provenance sidecar.
    Privatize(commands::privatize::Args),
    /// Pairwise similarity estimates over privatized sketch directories.
    Estimate(commands::estimate::Args),
    /// Retrieval / k-NN benchmark harness.
    Bench(commands::bench::Args),
    /// Exact privacy audit of a mechanism on a neighbor grid.
    Audit(commands::audit::Args),
    /// Seeded Monte Carlo oracle estimates.
    Oracle(commands::oracle::Args),
}

fn run(cli: Cli) -> dprp::Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| dprp::Error::Config(format!("--jobs: {e}")))?;
    }
    let ctx = commands::Ctx {
        seed: cli.seed,
        jobs: cli.jobs,
        out: cli.out,
    };
    match cli.command {
        Command::Calibrate(args) => commands::calibrate::run(&ctx, args),
        Command::Analytic(args) => commands::analytic::run(&ctx, args),
        Command::Privatize(args) => commands::privatize::run(&ctx, args),
        Command::Estimate(args) => commands::estimate::run(&ctx, args),
        Command::Bench(args) => commands::bench::run(&ctx, args),
        Command::Audit(args) => commands::audit::run(&ctx, args),
        Command::Oracle(args) => commands::oracle::run(&ctx, args),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DPRP_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
