//! `voxmoments featurize`: moment feature vectors for a set of molecules,
//! exported as CSV and/or ARFF.
//!
//! Cube-domain families (geometric, legendre, hahn) export their real values
//! as shortest-round-trip decimals. Ball-domain families (complex, zernike)
//! export each complex value as the full decimal rendering of its 128-bit
//! interleaved code, so nothing is truncated on the way out.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use voxmoments::encoding::encode_feature_vector;
use voxmoments::hahn::{HahnBasisTable, HahnParams};
use voxmoments::moments::{
    complex_moments, cube_indices, feature_vector, geometric_moments, hahn_moments,
    legendre_moments, spherical_indices, zernike_moments, MomentFamily, MomentIndex,
};
use voxmoments::voxel::VoxelGrid;

use crate::config::{RunConfig, SharedArgs};
use crate::input::{load_input, molecule_id, NamedGrid};
use crate::CliError;

#[derive(Args)]
pub struct FeaturizeArgs {
    #[command(flatten)]
    shared: SharedArgs,

    /// CSV mapping molecule id to class (columns: id,class)
    #[arg(long, value_name = "FILE")]
    labels: PathBuf,

    /// Write the dataset as CSV here
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,

    /// Write the dataset as ARFF here
    #[arg(long, value_name = "FILE")]
    arff: Option<PathBuf>,

    /// Worker threads for per-molecule computation [default: all cores]
    #[arg(long)]
    threads: Option<usize>,

    /// Input molecules (.xyz or .binvox)
    #[arg(required = true, value_name = "INPUT")]
    inputs: Vec<PathBuf>,
}

/// Column headers for one family, in the canonical feature order.
fn family_columns(family: MomentFamily, max_order: u32) -> Vec<String> {
    let name = family.name();
    let indices = if family.is_cube() {
        cube_indices(max_order)
    } else {
        spherical_indices(max_order)
    };
    indices
        .into_iter()
        .map(|idx| match idx {
            MomentIndex::Cube { p, q, r } => format!("{name}_{p}_{q}_{r}"),
            MomentIndex::Spherical { s, l, m } => format!("{name}_{s}_{l}_{m}"),
        })
        .collect()
}

/// All feature values for one molecule, as the exact strings to export.
fn feature_strings(
    grid: &VoxelGrid,
    cfg: &RunConfig,
    tables: &HashMap<usize, HahnBasisTable>,
) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for &family in &cfg.families {
        let set = match family {
            MomentFamily::Geometric => geometric_moments(grid, cfg.max_order, cfg.variant),
            MomentFamily::Legendre => legendre_moments(grid, cfg.max_order),
            MomentFamily::Hahn => {
                let table = tables
                    .get(&grid.n())
                    .ok_or_else(|| "missing Hahn table".to_string())?;
                hahn_moments(grid, cfg.max_order, table).map_err(|e| e.to_string())?
            }
            MomentFamily::Complex => complex_moments(grid, cfg.max_order),
            MomentFamily::Zernike => zernike_moments(grid, cfg.max_order),
        };
        let fv = feature_vector(&set).map_err(|e| e.to_string())?;
        if family.is_cube() {
            out.extend(fv.entries.iter().map(|(_, v)| format!("{}", v.re)));
        } else {
            out.extend(encode_feature_vector(&fv).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

/// Parse the labels file: a CSV of id,class with an optional `id,class`
/// header row.
fn read_labels(path: &PathBuf) -> Result<HashMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read labels {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut labels = HashMap::new();
    for (row, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| CliError::Usage(format!("labels row {}: {e}", row + 1)))?;
        if record.len() != 2 {
            return Err(CliError::Usage(format!(
                "labels row {}: expected 2 fields (id,class), found {}",
                row + 1,
                record.len()
            )));
        }
        let (id, class) = (record[0].trim(), record[1].trim());
        if row == 0 && id == "id" && class == "class" {
            continue;
        }
        if labels.insert(id.to_string(), class.to_string()).is_some() {
            return Err(CliError::Usage(format!("labels: duplicate id {id:?}")));
        }
    }
    Ok(labels)
}

pub fn run(args: FeaturizeArgs) -> Result<u8, CliError> {
    let cfg = args.shared.resolve()?;
    if args.csv.is_none() && args.arff.is_none() {
        return Err(CliError::Usage(
            "nothing to write: pass --csv and/or --arff".into(),
        ));
    }
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
    }

    let labels = read_labels(&args.labels)?;
    let mut missing = Vec::new();
    for path in &args.inputs {
        let id = molecule_id(path).map_err(CliError::Usage)?;
        if !labels.contains_key(&id) {
            missing.push(id);
        }
    }
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "labels file {} does not cover: {}",
            args.labels.display(),
            missing.join(", ")
        )));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Failure(format!("worker pool: {e}")))?;

    // Load every grid first (cheap relative to moments) so Hahn tables can
    // be built once per distinct resolution before the heavy parallel phase.
    let grids: Vec<NamedGrid> = pool
        .install(|| {
            args.inputs
                .par_iter()
                .map(|path| load_input(path, &cfg))
                .collect::<Result<Vec<_>, String>>()
        })
        .map_err(CliError::Failure)?;

    let mut tables: HashMap<usize, HahnBasisTable> = HashMap::new();
    if cfg.families.contains(&MomentFamily::Hahn) {
        for ng in &grids {
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
    }

    // One row of strings per molecule, computed in parallel but collected
    // in input order.
    let rows: Vec<Vec<String>> = pool
        .install(|| {
            grids
                .par_iter()
                .map(|ng| {
                    feature_strings(&ng.grid, &cfg, &tables)
                        .map_err(|msg| format!("{}: {msg}", ng.id))
                })
                .collect::<Result<Vec<_>, String>>()
        })
        .map_err(CliError::Failure)?;

    let columns: Vec<String> = cfg
        .families
        .iter()
        .flat_map(|&f| family_columns(f, cfg.max_order))
        .collect();

    if let Some(path) = &args.csv {
        write_csv(path, &columns, &grids, &labels, &rows)?;
    }
    if let Some(path) = &args.arff {
        write_arff(path, &columns, &grids, &labels, &rows)?;
    }
    Ok(0)
}

fn write_csv(
    path: &PathBuf,
    columns: &[String],
    grids: &[NamedGrid],
    labels: &HashMap<String, String>,
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
    let mut header = vec!["id".to_string()];
    header.extend_from_slice(columns);
    header.push("class".to_string());
    writer
        .write_record(&header)
        .and_then(|_| {
            grids.iter().zip(rows).try_for_each(|(ng, row)| {
                let mut record = vec![ng.id.clone()];
                record.extend_from_slice(row);
                record.push(labels[&ng.id].clone());
                writer.write_record(&record)
            })
        })
        .and_then(|_| writer.flush().map_err(csv::Error::from))
        .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn write_arff(
    path: &PathBuf,
    columns: &[String],
    grids: &[NamedGrid],
    labels: &HashMap<String, String>,
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let classes: BTreeSet<&str> = grids.iter().map(|ng| labels[&ng.id].as_str()).collect();
    let class_list = classes.into_iter().collect::<Vec<_>>().join(",");

    let mut out = String::new();
    out.push_str("@relation voxmoments\n\n");
    for col in columns {
        out.push_str(&format!("@attribute {col} numeric\n"));
    }
    out.push_str(&format!("@attribute class {{{class_list}}}\n\n@data\n"));
    for (ng, row) in grids.iter().zip(rows) {
        out.push_str(&row.join(","));
        out.push(',');
        out.push_str(&labels[&ng.id]);
        out.push('\n');
    }

    let mut file = fs::File::create(path)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(out.as_bytes())
        .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}
