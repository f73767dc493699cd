//! Moment descriptors computed over voxel grids.
//!
//! Five families share a common result type. The cube families (geometric,
//! Legendre, Hahn) index moments by per-axis orders `(p, q, r)`; the ball
//! families (complex, Zernike) index them by `(s, l, m)` with `l` matching
//! the parity of `s` and `|m| <= l`. Every engine walks its index set in the
//! canonical order defined by [`cube_indices`] / [`spherical_indices`], so a
//! moment set serializes to the same column layout no matter which engine
//! produced it.

mod ball;
mod cube;
mod reconstruct;

pub use ball::{complex_moments, zernike_moments};
pub use cube::{
    geometric_moments, hahn_moments, hahn_moments_complete, hahn_table_for_grid, legendre_moments,
};
pub use reconstruct::{reconstruct_hahn, reconstruct_hahn_partial, ReconstructedField};

use num_complex::Complex64;
use thiserror::Error;

use crate::voxel::VoxelGrid;

/// Moment family tag carried by every [`MomentSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentFamily {
    Geometric,
    Complex,
    Legendre,
    Zernike,
    Hahn,
}

impl MomentFamily {
    /// Lowercase name used in file headers and CLI output.
    pub fn name(self) -> &'static str {
        match self {
            MomentFamily::Geometric => "geometric",
            MomentFamily::Complex => "complex",
            MomentFamily::Legendre => "legendre",
            MomentFamily::Zernike => "zernike",
            MomentFamily::Hahn => "hahn",
        }
    }

    /// Parse the lowercase family name.
    pub fn parse(name: &str) -> Option<MomentFamily> {
        Some(match name {
            "geometric" => MomentFamily::Geometric,
            "complex" => MomentFamily::Complex,
            "legendre" => MomentFamily::Legendre,
            "zernike" => MomentFamily::Zernike,
            "hahn" => MomentFamily::Hahn,
            _ => return None,
        })
    }

    /// True for families indexed by per-axis cube orders `(p, q, r)`.
    pub fn is_cube(self) -> bool {
        matches!(
            self,
            MomentFamily::Geometric | MomentFamily::Legendre | MomentFamily::Hahn
        )
    }
}

/// Which site weight the geometric engine uses along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometricVariant {
    /// Sample the monomial at the voxel index: weight `i^p` for site `i`.
    ZeroOrder,
    /// Integrate the monomial over the unit cell centred on the index:
    /// weight [`monomial_integral`]`(p, i)`.
    Precise,
}

/// Index of a single moment within a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MomentIndex {
    /// Per-axis orders for the geometric, Legendre, and Hahn families.
    Cube { p: u32, q: u32, r: u32 },
    /// Radial order `s`, degree `l`, and azimuthal order `m` for the
    /// complex and Zernike families.
    Spherical { s: u32, l: u32, m: i32 },
}

impl std::fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            MomentIndex::Cube { p, q, r } => write!(f, "p{p}q{q}r{r}"),
            MomentIndex::Spherical { s, l, m } => {
                if m < 0 {
                    write!(f, "s{s}l{l}mn{}", -m)
                } else {
                    write!(f, "s{s}l{l}m{m}")
                }
            }
        }
    }
}

/// Grid placement metadata propagated from the source [`VoxelGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMeta {
    pub n: usize,
    pub translate: [f64; 3],
    pub scale: f64,
}

impl GridMeta {
    pub fn of(grid: &VoxelGrid) -> GridMeta {
        GridMeta {
            n: grid.n(),
            translate: grid.translate(),
            scale: grid.scale(),
        }
    }
}

/// Ordered set of moments produced by one engine run.
///
/// Entries follow the canonical index order for the family. Real-valued
/// families store their values in the real part with a zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub family: MomentFamily,
    pub max_order: u32,
    pub entries: Vec<(MomentIndex, Complex64)>,
    pub grid: GridMeta,
    /// Fraction of total grid mass that fell outside the inscribed ball and
    /// was therefore ignored. Always zero for the cube families.
    pub discarded_mass_fraction: f64,
}

impl MomentSet {
    /// Look up a moment by index. Linear scan; fine for the small sets the
    /// feature pipeline uses.
    pub fn value(&self, index: MomentIndex) -> Option<Complex64> {
        self.entries
            .iter()
            .find(|(i, _)| *i == index)
            .map(|&(_, v)| v)
    }
}

/// Fixed-width descriptor: the 165 moments of one family at maximum order 8.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub family: MomentFamily,
    pub entries: Vec<(MomentIndex, Complex64)>,
}

/// Count of features per family at the supported maximum order.
pub const FEATURE_COUNT: usize = 165;

/// Maximum order at which every family yields exactly [`FEATURE_COUNT`] moments.
pub const FEATURE_MAX_ORDER: u32 = 8;

/// Errors reported by the moment engines.
#[derive(Debug, Error, PartialEq)]
pub enum MomentError {
    #[error("basis table built for lattice size {table_n} cannot be applied to a {grid_n}^3 grid")]
    GridSizeMismatch { table_n: usize, grid_n: usize },
    #[error("basis table holds orders up to {available}, but order {needed} was requested")]
    TableOrderTooLow { needed: u32, available: u32 },
    #[error("requested maximum order {requested} exceeds the largest lattice order {limit}")]
    OrderExceedsLattice { requested: u32, limit: u32 },
    #[error("feature vectors are defined at maximum order {expected}, got {got}")]
    WrongMaxOrder { expected: u32, got: u32 },
    #[error("expected {expected} moments for this operation, found {found}")]
    WrongEntryCount { expected: usize, found: usize },
    #[error("moment set is missing {missing} of the {expected} coefficients needed for exact reconstruction")]
    IncompleteSet { missing: usize, expected: usize },
    #[error("duplicate moment index {0}")]
    DuplicateIndex(MomentIndex),
    #[error("operation requires the {expected} family, got {got}")]
    WrongFamily { expected: &'static str, got: &'static str },
    #[error("moment index {0} lies outside the grid's valid order range")]
    IndexOutOfRange(MomentIndex),
}

/// Integral of `x^s` over the unit interval centred at `a`.
///
/// Closed form: `((a + 1/2)^(s+1) - (a - 1/2)^(s+1)) / (s + 1)`. This is the
/// exact cell average that the precise geometric variant uses in place of the
/// point sample `a^s`.
pub fn monomial_integral(s: u32, a: f64) -> f64 {
    let e = s + 1;
    ((a + 0.5).powi(e as i32) - (a - 0.5).powi(e as i32)) / f64::from(e)
}

/// Canonical cube index order: ascending total order `p + q + r`, ties broken
/// lexicographically by `(p, q, r)`.
pub fn cube_indices(max_order: u32) -> Vec<MomentIndex> {
    let mut out = Vec::new();
    for total in 0..=max_order {
        for p in 0..=total {
            for q in 0..=(total - p) {
                let r = total - p - q;
                out.push(MomentIndex::Cube { p, q, r });
            }
        }
    }
    out
}

/// Canonical spherical index order: ascending radial order `s`; within each
/// `s`, ascending degree `l` over the degrees sharing the parity of `s` with
/// `l <= s`; within each `l`, `m` from `-l` to `+l`.
pub fn spherical_indices(max_order: u32) -> Vec<MomentIndex> {
    let mut out = Vec::new();
    for s in 0..=max_order {
        let mut l = s % 2;
        while l <= s {
            for m in -(l as i32)..=(l as i32) {
                out.push(MomentIndex::Spherical { s, l, m });
            }
            l += 2;
        }
    }
    out
}

/// Validate a moment set as a fixed-width feature vector.
///
/// The descriptor layout is only defined at maximum order
/// [`FEATURE_MAX_ORDER`], where every family has exactly [`FEATURE_COUNT`]
/// moments; any other order is rejected rather than silently padded.
pub fn feature_vector(set: &MomentSet) -> Result<FeatureVector, MomentError> {
    if set.max_order != FEATURE_MAX_ORDER {
        return Err(MomentError::WrongMaxOrder {
            expected: FEATURE_MAX_ORDER,
            got: set.max_order,
        });
    }
    if set.entries.len() != FEATURE_COUNT {
        return Err(MomentError::WrongEntryCount {
            expected: FEATURE_COUNT,
            found: set.entries.len(),
        });
    }
    Ok(FeatureVector {
        family: set.family,
        entries: set.entries.clone(),
    })
}
