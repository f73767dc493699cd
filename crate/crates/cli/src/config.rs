//! Run configuration: command-line flags merged over an optional TOML file
//! merged over built-in defaults.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;
use voxmoments::moments::{GeometricVariant, MomentFamily};
use voxmoments::voxel::VoxelMode;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyChoice {
    All,
    Geometric,
    Legendre,
    Hahn,
    Complex,
    Zernike,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    /// Atoms fill every voxel within their van der Waals radius.
    Sphere,
    /// Atoms mark only the voxel nearest their center.
    Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantChoice {
    /// Weight each voxel by its site coordinates raised to the order.
    ZeroOrder,
    /// Integrate the monomial exactly over each unit voxel.
    Precise,
}

/// Flags shared by the commands that compute moments. Every flag is
/// optional here; omitted values fall back to the config file and then to
/// the built-in defaults.
#[derive(Args, Debug)]
pub struct SharedArgs {
    /// TOML file supplying defaults for the other flags
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Moment family to compute, or all five [default: all]
    #[arg(long)]
    pub family: Option<FamilyChoice>,

    /// Maximum total moment order [default: 8]
    #[arg(long)]
    pub max_order: Option<u32>,

    /// Voxel grid resolution used when rasterizing XYZ inputs [default: 64]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Hahn weight exponent mu [default: 0]
    #[arg(long)]
    pub mu: Option<f64>,

    /// Hahn weight exponent nu [default: 0]
    #[arg(long)]
    pub nu: Option<f64>,

    /// How atoms mark voxels when rasterizing XYZ inputs [default: sphere]
    #[arg(long)]
    pub mode: Option<ModeChoice>,

    /// Fraction of the grid kept empty around the molecule [default: 0.1]
    #[arg(long)]
    pub margin: Option<f64>,

    /// One-voxel weight used by the geometric family [default: zero-order]
    #[arg(long)]
    pub geometric_variant: Option<VariantChoice>,

    /// Benchmark repeat count [default: 50]
    #[arg(long)]
    pub repeats: Option<usize>,
}

/// The same knobs as [`SharedArgs`], as they appear in a TOML config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<FamilyChoice>,
    max_order: Option<u32>,
    grid: Option<usize>,
    mu: Option<f64>,
    nu: Option<f64>,
    mode: Option<ModeChoice>,
    margin: Option<f64>,
    geometric_variant: Option<VariantChoice>,
    repeats: Option<usize>,
}

/// Fully resolved configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub families: Vec<MomentFamily>,
    pub max_order: u32,
    pub grid: usize,
    pub mu: f64,
    pub nu: f64,
    pub mode: VoxelMode,
    pub margin: f64,
    pub variant: GeometricVariant,
    pub repeats: usize,
}

impl SharedArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str::<FileConfig>(&text).map_err(|e| {
                    CliError::Usage(format!("bad config {}: {e}", path.display()))
                })?
            }
            None => FileConfig::default(),
        };

        let family = self.family.or(file.family).unwrap_or(FamilyChoice::All);
        let families = match family {
            FamilyChoice::All => vec![
                MomentFamily::Geometric,
                MomentFamily::Legendre,
                MomentFamily::Hahn,
                MomentFamily::Complex,
                MomentFamily::Zernike,
            ],
            FamilyChoice::Geometric => vec![MomentFamily::Geometric],
            FamilyChoice::Legendre => vec![MomentFamily::Legendre],
            FamilyChoice::Hahn => vec![MomentFamily::Hahn],
            FamilyChoice::Complex => vec![MomentFamily::Complex],
            FamilyChoice::Zernike => vec![MomentFamily::Zernike],
        };

        let config = RunConfig {
            families,
            max_order: self.max_order.or(file.max_order).unwrap_or(8),
            grid: self.grid.or(file.grid).unwrap_or(64),
            mu: self.mu.or(file.mu).unwrap_or(0.0),
            nu: self.nu.or(file.nu).unwrap_or(0.0),
            mode: match self.mode.or(file.mode).unwrap_or(ModeChoice::Sphere) {
                ModeChoice::Sphere => VoxelMode::Sphere,
                ModeChoice::Point => VoxelMode::Point,
            },
            margin: self.margin.or(file.margin).unwrap_or(0.1),
            variant: match self
                .geometric_variant
                .or(file.geometric_variant)
                .unwrap_or(VariantChoice::ZeroOrder)
            {
                VariantChoice::ZeroOrder => GeometricVariant::ZeroOrder,
                VariantChoice::Precise => GeometricVariant::Precise,
            },
            repeats: self.repeats.or(file.repeats).unwrap_or(50),
        };

        if config.grid < 2 {
            return Err(CliError::Usage(format!(
                "--grid must be at least 2, got {}",
                config.grid
            )));
        }
        if !(0.0..=0.45).contains(&config.margin) {
            return Err(CliError::Usage(format!(
                "--margin must lie in [0, 0.45], got {}",
                config.margin
            )));
        }
        if config.repeats == 0 {
            return Err(CliError::Usage("--repeats must be positive".into()));
        }
        if config.mu <= -1.0 || config.nu <= -1.0 {
            return Err(CliError::Usage(format!(
                "Hahn exponents must exceed -1, got mu={} nu={}",
                config.mu, config.nu
            )));
        }
        Ok(config)
    }
}
