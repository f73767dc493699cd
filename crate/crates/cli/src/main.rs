//! Batch front end for the voxmoments library: rasterize molecules, extract
//! moment features, export datasets, analyze class dispersion, and benchmark
//! the engines.
//!
//! Exit codes: 0 = clean, 1 = runtime or partial failure, 2 = usage or
//! configuration error.

mod alloc;
mod bench;
mod config;
mod featurize;
mod input;
mod reconstruct_cmd;
mod stats_cmd;
mod voxelize_cmd;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[global_allocator]
static ALLOCATOR: alloc::CountingAllocator = alloc::CountingAllocator;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, config, or input preconditions; maps to exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Runtime failure (I/O, malformed data, partial output); exit code 1.
    #[error("{0}")]
    Failure(String),
}

#[derive(Parser)]
#[command(
    name = "voxmoments",
    version,
    about = "Voxel moment features for molecular shapes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize XYZ molecules into binvox occupancy grids
    Voxelize(voxelize_cmd::VoxelizeArgs),
    /// Compute moment features and export a CSV/ARFF dataset
    Featurize(featurize::FeaturizeArgs),
    /// Class-wise dispersion report for a feature dataset
    Stats(stats_cmd::StatsArgs),
    /// Time the moment engines and report per-voxel costs
    Bench(bench::BenchArgs),
    /// Invert a complete Hahn transform back into a voxel grid
    Reconstruct(reconstruct_cmd::ReconstructArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Voxelize(args) => voxelize_cmd::run(args),
        Command::Featurize(args) => featurize::run(args),
        Command::Stats(args) => stats_cmd::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Reconstruct(args) => reconstruct_cmd::run(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CliError::Usage(_) => ExitCode::from(2),
                CliError::Failure(_) => ExitCode::from(1),
            }
        }
    }
}
