//! Loading molecules from disk: either raw XYZ geometry (rasterized on the
//! fly) or a prebuilt binvox occupancy grid.

use std::fs;
use std::path::Path;

use voxmoments::binvox::read_binvox;
use voxmoments::voxel::{parse_xyz, voxelize, RadiusTable, VoxelGrid};

use crate::config::RunConfig;

/// A voxel grid tagged with the molecule id it came from (the input file
/// stem, which is also the join key against the labels file).
pub struct NamedGrid {
    pub id: String,
    pub grid: VoxelGrid,
}

/// File stem used as the molecule id.
pub fn molecule_id(path: &Path) -> Result<String, String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(|s| s.to_string())
        .ok_or_else(|| format!("{}: cannot derive a molecule id", path.display()))
}

/// Read one input file. XYZ files are voxelized with the configured grid
/// size, mode, and margin; binvox files are taken as-is (their resolution
/// may differ from the configured one).
pub fn load_input(path: &Path, cfg: &RunConfig) -> Result<NamedGrid, String> {
    let id = molecule_id(path)?;
    let ext = path
        .extension()
        .and_then(|s| s.to_str())
        .map(|s| s.to_ascii_lowercase())
        .unwrap_or_default();
    let grid = match ext.as_str() {
        "xyz" => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let mol = parse_xyz(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            voxelize(&mol, cfg.grid, cfg.mode, &RadiusTable::vdw(), cfg.margin)
                .map_err(|e| format!("{}: {e}", path.display()))?
        }
        "binvox" => {
            let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            read_binvox(&bytes).map_err(|e| format!("{}: {e}", path.display()))?
        }
        other => {
            return Err(format!(
                "{}: unsupported input extension {other:?}, expected .xyz or .binvox",
                path.display()
            ))
        }
    };
    Ok(NamedGrid { id, grid })
}
