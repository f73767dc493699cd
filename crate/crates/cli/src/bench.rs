//! `voxmoments bench`: wall-time and working-set figures for each moment
//! family over a fixed input set.
//!
//! Numbers are machine-dependent; nothing here is asserted against published
//! figures. Basis-table construction is timed as its own phase since
//! published timings rarely say whether they include it. The measured phase
//! runs single-threaded so the allocator accounting stays attributable.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use voxmoments::hahn::{HahnBasisTable, HahnParams};
use voxmoments::moments::{
    complex_moments, geometric_moments, hahn_moments, legendre_moments, zernike_moments,
    MomentFamily,
};
use voxmoments::stats::{median, quartiles};

use crate::alloc;
use crate::config::{RunConfig, SharedArgs};
use crate::input::{load_input, NamedGrid};
use crate::CliError;

#[derive(Args)]
pub struct BenchArgs {
    #[command(flatten)]
    shared: SharedArgs,

    /// Also write the measurements as CSV here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Input molecules (.xyz or .binvox)
    #[arg(required = true, value_name = "INPUT")]
    inputs: Vec<PathBuf>,
}

struct FamilyReport {
    family: MomentFamily,
    median_ns_per_voxel: f64,
    iqr_ns_per_voxel: f64,
    table_median_ns: f64,
    peak_bytes_per_voxel: f64,
}

/// Build whatever basis tables `family` needs for these grids.
fn build_tables(
    family: MomentFamily,
    grids: &[NamedGrid],
    cfg: &RunConfig,
) -> Result<HashMap<usize, HahnBasisTable>, CliError> {
    let mut tables = HashMap::new();
    if family != MomentFamily::Hahn {
        return Ok(tables);
    }
    for ng in grids {
        let n = ng.grid.n();
        if cfg.max_order as usize > n - 1 {
            return Err(CliError::Usage(format!(
                "{}: grid is {n}^3 but the Hahn family needs max order {} <= {}",
                ng.id,
                cfg.max_order,
                n - 1
            )));
        }
        if !tables.contains_key(&n) {
            let params = HahnParams::new(cfg.mu, cfg.nu, n)
                .map_err(|e| CliError::Usage(format!("Hahn parameters: {e}")))?;
            let table = HahnBasisTable::build(params, cfg.max_order as usize)
                .map_err(|e| CliError::Usage(format!("Hahn table for n={n}: {e}")))?;
            tables.insert(n, table);
        }
    }
    Ok(tables)
}

fn compute_family(
    family: MomentFamily,
    grids: &[NamedGrid],
    cfg: &RunConfig,
    tables: &HashMap<usize, HahnBasisTable>,
) -> Result<(), CliError> {
    for ng in grids {
        let set = match family {
            MomentFamily::Geometric => geometric_moments(&ng.grid, cfg.max_order, cfg.variant),
            MomentFamily::Legendre => legendre_moments(&ng.grid, cfg.max_order),
            MomentFamily::Hahn => hahn_moments(&ng.grid, cfg.max_order, &tables[&ng.grid.n()])
                .map_err(|e| CliError::Failure(format!("{}: {e}", ng.id)))?,
            MomentFamily::Complex => complex_moments(&ng.grid, cfg.max_order),
            MomentFamily::Zernike => zernike_moments(&ng.grid, cfg.max_order),
        };
        std::hint::black_box(&set);
    }
    Ok(())
}

pub fn run(args: BenchArgs) -> Result<u8, CliError> {
    let cfg = args.shared.resolve()?;

    let grids: Vec<NamedGrid> = args
        .inputs
        .iter()
        .map(|path| load_input(path, &cfg))
        .collect::<Result<Vec<_>, String>>()
        .map_err(CliError::Failure)?;
    let total_voxels: usize = grids.iter().map(|ng| ng.grid.n().pow(3)).sum();

    let mut reports = Vec::new();
    for &family in &cfg.families {
        let mut compute_ns = Vec::with_capacity(cfg.repeats);
        let mut table_ns = Vec::with_capacity(cfg.repeats);
        for _ in 0..cfg.repeats {
            let t0 = Instant::now();
            let tables = build_tables(family, &grids, &cfg)?;
            table_ns.push(t0.elapsed().as_nanos() as f64);

            let t1 = Instant::now();
            compute_family(family, &grids, &cfg, &tables)?;
            compute_ns.push(t1.elapsed().as_nanos() as f64 / total_voxels as f64);
        }

        // One extra accounted pass for the working-set figure.
        let tables = build_tables(family, &grids, &cfg)?;
        alloc::reset_peak();
        let baseline = alloc::live_bytes();
        compute_family(family, &grids, &cfg, &tables)?;
        let extra = alloc::peak_bytes().saturating_sub(baseline);

        let med = median(&compute_ns).expect("repeats >= 1");
        let iqr = if compute_ns.len() >= 2 {
            let (q1, q3) = quartiles(&compute_ns).expect("repeats >= 2");
            q3 - q1
        } else {
            0.0
        };
        reports.push(FamilyReport {
            family,
            median_ns_per_voxel: med,
            iqr_ns_per_voxel: iqr,
            table_median_ns: median(&table_ns).expect("repeats >= 1"),
            peak_bytes_per_voxel: extra as f64 / total_voxels as f64,
        });
    }

    println!(
        "bench: {} molecule(s), {total_voxels} voxels total, max order {}, {} repeat(s)",
        grids.len(),
        cfg.max_order,
        cfg.repeats
    );
    println!("timings are machine-dependent; compare only within this run");
    println!(
        "{:<10} {:>18} {:>15} {:>16} {:>18}",
        "family", "median ns/voxel", "iqr ns/voxel", "table build ns", "peak bytes/voxel"
    );
    for r in &reports {
        println!(
            "{:<10} {:>18.2} {:>15.2} {:>16.0} {:>18.2}",
            r.family.name(),
            r.median_ns_per_voxel,
            r.iqr_ns_per_voxel,
            r.table_median_ns,
            r.peak_bytes_per_voxel
        );
    }

    if let Some(path) = &args.out {
        let mut writer = csv::Writer::from_path(path)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
        writer
            .write_record([
                "family",
                "median_ns_per_voxel",
                "iqr_ns_per_voxel",
                "table_build_median_ns",
                "peak_bytes_per_voxel",
                "note",
            ])
            .and_then(|_| {
                reports.iter().try_for_each(|r| {
                    writer.write_record([
                        r.family.name(),
                        &format!("{}", r.median_ns_per_voxel),
                        &format!("{}", r.iqr_ns_per_voxel),
                        &format!("{}", r.table_median_ns),
                        &format!("{}", r.peak_bytes_per_voxel),
                        "machine-dependent",
                    ])
                })
            })
            .and_then(|_| writer.flush().map_err(csv::Error::from))
            .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?;
    }
    Ok(0)
}
