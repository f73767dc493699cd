//! Inverse Hahn transform: rebuild a voxel field from its coefficients.
//!
//! The forward transform is an orthonormal change of basis, so the complete
//! coefficient set (all per-axis orders up to `n - 1`) inverts it exactly up
//! to rounding. A truncated set yields the orthogonal projection of the
//! field onto the spanned subspace, whose L2 residual can only shrink as
//! more coefficients are supplied.

use crate::hahn::HahnBasisTable;
use crate::voxel::{GridError, VoxelGrid};

use super::{MomentError, MomentFamily, MomentIndex, MomentSet};

/// A reconstructed scalar field, before any clamping to occupancy range.
///
/// Values are kept raw so reconstruction error can be measured honestly;
/// [`ReconstructedField::to_grid_clamped`] produces a storable grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedField {
    n: usize,
    translate: [f64; 3],
    scale: f64,
    /// Field values in binvox payload order (y fastest, then z, then x).
    values: Vec<f64>,
}

impl ReconstructedField {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[(x * self.n + z) * self.n + y]
    }

    /// Largest absolute difference against a grid of the same size.
    pub fn max_abs_diff(&self, grid: &VoxelGrid) -> f64 {
        assert_eq!(self.n, grid.n(), "grids must have the same size");
        self.values
            .iter()
            .zip(grid.raw_values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Root-mean-square difference against a grid of the same size.
    pub fn rms_diff(&self, grid: &VoxelGrid) -> f64 {
        assert_eq!(self.n, grid.n(), "grids must have the same size");
        let sum: f64 = self
            .values
            .iter()
            .zip(grid.raw_values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (sum / self.values.len() as f64).sqrt()
    }

    /// Clamp into [0, 1] and wrap as a voxel grid with the original
    /// placement metadata.
    pub fn to_grid_clamped(&self) -> Result<VoxelGrid, GridError> {
        let clamped = self.values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        VoxelGrid::from_values(self.n, clamped, self.translate, self.scale)
    }
}

fn check_set(set: &MomentSet, table: &HahnBasisTable) -> Result<usize, MomentError> {
    if set.family != MomentFamily::Hahn {
        return Err(MomentError::WrongFamily {
            expected: MomentFamily::Hahn.name(),
            got: set.family.name(),
        });
    }
    let n = set.grid.n;
    if table.n() != n {
        return Err(MomentError::GridSizeMismatch {
            table_n: table.n(),
            grid_n: n,
        });
    }
    Ok(n)
}

/// Gather entries into a dense `[p][q][r]` array, rejecting out-of-range
/// and duplicate indices. Returns the array and the number of filled cells.
fn dense_coefficients(
    set: &MomentSet,
    n: usize,
) -> Result<(Vec<f64>, usize), MomentError> {
    let mut dense = vec![0.0f64; n * n * n];
    let mut seen = vec![false; n * n * n];
    let mut filled = 0usize;
    let limit = n as u32;
    for &(idx, value) in &set.entries {
        let MomentIndex::Cube { p, q, r } = idx else {
            return Err(MomentError::IndexOutOfRange(idx));
        };
        if p >= limit || q >= limit || r >= limit {
            return Err(MomentError::IndexOutOfRange(idx));
        }
        let flat = (p as usize * n + q as usize) * n + r as usize;
        if seen[flat] {
            return Err(MomentError::DuplicateIndex(idx));
        }
        seen[flat] = true;
        dense[flat] = value.re;
        filled += 1;
    }
    Ok((dense, filled))
}

fn inverse_transform(dense: &[f64], n: usize, table: &HahnBasisTable) -> Vec<f64> {
    let rows: Vec<&[f64]> = (0..n).map(|s| table.row(s)).collect();

    // Stage A: expand r -> z. a[(p, q, z)] = sum_r H[p][q][r] h_r(z).
    let mut a = vec![0.0f64; n * n * n];
    for p in 0..n {
        for q in 0..n {
            for z in 0..n {
                let mut acc = 0.0;
                for (r, row) in rows.iter().enumerate() {
                    acc += dense[(p * n + q) * n + r] * row[z];
                }
                a[(p * n + q) * n + z] = acc;
            }
        }
    }

    // Stage B: expand q -> y. b[(p, y, z)] = sum_q a[p][q][z] h_q(y).
    let mut b = vec![0.0f64; n * n * n];
    for p in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mut acc = 0.0;
                for (q, row) in rows.iter().enumerate() {
                    acc += a[(p * n + q) * n + z] * row[y];
                }
                b[(p * n + y) * n + z] = acc;
            }
        }
    }

    // Stage C: expand p -> x, writing straight into binvox layout.
    let mut values = vec![0.0f64; n * n * n];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mut acc = 0.0;
                for (p, row) in rows.iter().enumerate() {
                    acc += b[(p * n + y) * n + z] * row[x];
                }
                values[(x * n + z) * n + y] = acc;
            }
        }
    }
    values
}

fn rebuild(
    set: &MomentSet,
    table: &HahnBasisTable,
    require_complete: bool,
) -> Result<ReconstructedField, MomentError> {
    let n = check_set(set, table)?;
    if table.max_order() < n - 1 {
        return Err(MomentError::TableOrderTooLow {
            needed: n as u32 - 1,
            available: table.max_order() as u32,
        });
    }
    let (dense, filled) = dense_coefficients(set, n)?;
    let expected = n * n * n;
    if require_complete && filled != expected {
        return Err(MomentError::IncompleteSet {
            missing: expected - filled,
            expected,
        });
    }
    Ok(ReconstructedField {
        n,
        translate: set.grid.translate,
        scale: set.grid.scale,
        values: inverse_transform(&dense, n, table),
    })
}

/// Invert a complete Hahn coefficient set back into a voxel field.
///
/// Requires every coefficient with per-axis orders up to `n - 1`; a partial
/// set is an error because the result would silently be a projection rather
/// than the field. Use [`reconstruct_hahn_partial`] when a projection is
/// what you want.
pub fn reconstruct_hahn(
    set: &MomentSet,
    table: &HahnBasisTable,
) -> Result<ReconstructedField, MomentError> {
    rebuild(set, table, true)
}

/// Project onto the subspace spanned by whatever coefficients are present.
///
/// Absent coefficients are treated as zero. With an orthonormal basis this
/// is the least-squares approximation of the original field within the
/// spanned subspace.
pub fn reconstruct_hahn_partial(
    set: &MomentSet,
    table: &HahnBasisTable,
) -> Result<ReconstructedField, MomentError> {
    rebuild(set, table, false)
}

/// Convenience holder tying a reconstruction to its source for reporting.
pub struct ReconstructionStats {
    pub max_abs_error: f64,
    pub rms_error: f64,
}

impl ReconstructedField {
    pub fn stats_against(&self, grid: &VoxelGrid) -> ReconstructionStats {
        ReconstructionStats {
            max_abs_error: self.max_abs_diff(grid),
            rms_error: self.rms_diff(grid),
        }
    }
}
