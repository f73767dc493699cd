//! `voxmoments voxelize`: one binvox per XYZ input plus a manifest, carrying
//! on past per-file failures.

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use voxmoments::binvox::write_binvox;
use voxmoments::voxel::{parse_xyz, voxelize, RadiusTable};

use crate::config::SharedArgs;
use crate::input::molecule_id;
use crate::CliError;

#[derive(Args)]
pub struct VoxelizeArgs {
    #[command(flatten)]
    shared: SharedArgs,

    /// Directory receiving one <id>.binvox per molecule plus manifest.csv
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,

    /// XYZ molecule files
    #[arg(required = true, value_name = "XYZ")]
    inputs: Vec<PathBuf>,
}

pub fn run(args: VoxelizeArgs) -> Result<u8, CliError> {
    let cfg = args.shared.resolve()?;

    let mut seen = HashSet::new();
    for path in &args.inputs {
        let id = molecule_id(path).map_err(CliError::Usage)?;
        if !seen.insert(id.clone()) {
            return Err(CliError::Usage(format!(
                "duplicate molecule id {id:?}; input stems must be unique"
            )));
        }
    }

    fs::create_dir_all(&args.out_dir).map_err(|e| {
        CliError::Failure(format!("cannot create {}: {e}", args.out_dir.display()))
    })?;

    let radii = RadiusTable::vdw();
    let mut manifest: Vec<(String, String)> = Vec::new();
    let mut failures = 0usize;
    for path in &args.inputs {
        let id = molecule_id(path).map_err(CliError::Usage)?;
        let outcome = fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|text| parse_xyz(&text).map_err(|e| e.to_string()))
            .and_then(|mol| {
                voxelize(&mol, cfg.grid, cfg.mode, &radii, cfg.margin)
                    .map_err(|e| e.to_string())
            })
            .and_then(|grid| {
                let file = format!("{id}.binvox");
                fs::write(args.out_dir.join(&file), write_binvox(&grid))
                    .map(|_| file)
                    .map_err(|e| e.to_string())
            });
        match outcome {
            Ok(file) => manifest.push((id, file)),
            Err(msg) => {
                eprintln!("{}: {msg}", path.display());
                failures += 1;
            }
        }
    }

    let manifest_path = args.out_dir.join("manifest.csv");
    let mut writer = csv::Writer::from_path(&manifest_path).map_err(|e| {
        CliError::Failure(format!("cannot write {}: {e}", manifest_path.display()))
    })?;
    writer
        .write_record(["id", "file"])
        .and_then(|_| {
            manifest
                .iter()
                .try_for_each(|(id, file)| writer.write_record([id, file]))
        })
        .and_then(|_| writer.flush().map_err(csv::Error::from))
        .map_err(|e| CliError::Failure(format!("manifest write failed: {e}")))?;

    if failures > 0 {
        eprintln!(
            "{failures} of {} inputs failed; manifest lists the {} that succeeded",
            args.inputs.len(),
            manifest.len()
        );
        Ok(1)
    } else {
        Ok(0)
    }
}
