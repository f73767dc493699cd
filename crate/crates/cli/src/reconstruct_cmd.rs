//! `voxmoments reconstruct`: complete Hahn transform of a small occupancy
//! grid followed by the inverse transform, reporting how faithfully the
//! round trip reproduces the input.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use voxmoments::binvox::{read_binvox, write_binvox};
use voxmoments::moments::{hahn_moments_complete, hahn_table_for_grid, reconstruct_hahn};

use crate::config::SharedArgs;
use crate::CliError;

/// The complete transform needs all n^3 coefficients, so work grows very
/// quickly with resolution; refuse anything past this.
const MAX_COMPLETE_N: usize = 16;

#[derive(Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    shared: SharedArgs,

    /// Occupancy grid to round-trip (.binvox)
    #[arg(value_name = "BINVOX")]
    input: PathBuf,

    /// Write the reconstructed grid here (.binvox)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

pub fn run(args: ReconstructArgs) -> Result<u8, CliError> {
    let cfg = args.shared.resolve()?;

    let bytes = fs::read(&args.input)
        .map_err(|e| CliError::Failure(format!("{}: {e}", args.input.display())))?;
    let grid = read_binvox(&bytes)
        .map_err(|e| CliError::Failure(format!("{}: {e}", args.input.display())))?;

    let n = grid.n();
    if n > MAX_COMPLETE_N {
        return Err(CliError::Usage(format!(
            "grid is {n}^3; complete reconstruction needs all {n}^3 coefficients and is \
             capped at {MAX_COMPLETE_N}^3. Re-voxelize smaller (voxmoments voxelize \
             --grid {MAX_COMPLETE_N} ...) or extract features instead, which never \
             needs the complete transform"
        )));
    }

    let table = hahn_table_for_grid(&grid, cfg.mu, cfg.nu)
        .map_err(|e| CliError::Usage(format!("Hahn table: {e}")))?;
    let set = hahn_moments_complete(&grid, &table)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let field = reconstruct_hahn(&set, &table).map_err(|e| CliError::Failure(e.to_string()))?;

    let max_abs = field.max_abs_diff(&grid);
    println!("max abs reconstruction error: {max_abs:e}");

    let rebuilt = field
        .to_grid_clamped()
        .map_err(|e| CliError::Failure(format!("reconstructed field invalid: {e}")))?;
    fs::write(&args.out, write_binvox(&rebuilt))
        .map_err(|e| CliError::Failure(format!("{}: {e}", args.out.display())))?;
    Ok(0)
}
