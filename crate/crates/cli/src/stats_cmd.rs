//! `voxmoments stats`: class-wise dispersion report over a featurize
//! dataset.
//!
//! Statistics run on real values. Encoded 128-bit columns (the complex and
//! zernike families) are decoded back into their two lanes first, and each
//! lane's magnitude becomes its own feature, named `<column>_re` and
//! `<column>_im`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use voxmoments::encoding::{deinterleave, EncodedFeature};
use voxmoments::stats::{class_dispersion, DispersionMode, LabeledDataset, StatsError};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatsMode {
    /// One NMAD per molecule, normalized to that molecule's own value.
    PerReference,
    /// One NMAD per class, normalized to the class median.
    Pooled,
}

#[derive(Args)]
pub struct StatsArgs {
    /// Feature dataset produced by `featurize --csv`
    #[arg(value_name = "DATASET")]
    dataset: PathBuf,

    /// Write the dispersion report here (CSV)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// How dispersion values are normalized
    #[arg(long, value_enum, default_value_t = StatsMode::PerReference)]
    mode: StatsMode,
}

/// Column names whose values are 128-bit interleaved codes rather than
/// plain reals.
fn is_encoded_column(name: &str) -> bool {
    name.starts_with("complex_") || name.starts_with("zernike_")
}

pub fn run(args: StatsArgs) -> Result<u8, CliError> {
    let mut reader = csv::Reader::from_path(&args.dataset).map_err(|e| {
        CliError::Usage(format!("cannot read {}: {e}", args.dataset.display()))
    })?;
    let header = reader
        .headers()
        .map_err(|e| CliError::Failure(format!("{}: {e}", args.dataset.display())))?
        .clone();
    if header.len() < 3 || &header[0] != "id" || &header[header.len() - 1] != "class" {
        return Err(CliError::Usage(format!(
            "{}: expected a featurize dataset (id, features..., class)",
            args.dataset.display()
        )));
    }
    let feature_names: Vec<String> = header
        .iter()
        .skip(1)
        .take(header.len() - 2)
        .map(|s| s.to_string())
        .collect();

    // Expanded per-statistic feature names: one per real column, two per
    // encoded column.
    let mut stat_names = Vec::new();
    for name in &feature_names {
        if is_encoded_column(name) {
            stat_names.push(format!("{name}_re"));
            stat_names.push(format!("{name}_im"));
        } else {
            stat_names.push(name.clone());
        }
    }

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::Failure(format!("{}: {e}", args.dataset.display())))?;
        if record.len() != header.len() {
            return Err(CliError::Failure(format!(
                "row {}: expected {} fields, found {}",
                row_no + 2,
                header.len(),
                record.len()
            )));
        }
        ids.push(record[0].to_string());
        labels.push(record[record.len() - 1].to_string());
        let mut row = Vec::with_capacity(stat_names.len());
        for (name, field) in feature_names.iter().zip(record.iter().skip(1)) {
            if is_encoded_column(name) {
                let code: u128 = field.parse().map_err(|_| {
                    CliError::Failure(format!(
                        "row {}, column {name}: {field:?} is not a 128-bit code",
                        row_no + 2
                    ))
                })?;
                let decoded = deinterleave(EncodedFeature::from_value(code));
                if !decoded.finite {
                    return Err(CliError::Failure(format!(
                        "row {}, column {name}: decoded value is not finite",
                        row_no + 2
                    )));
                }
                row.push(decoded.value.re.abs());
                row.push(decoded.value.im.abs());
            } else {
                let value: f64 = field.parse().map_err(|_| {
                    CliError::Failure(format!(
                        "row {}, column {name}: {field:?} is not a number",
                        row_no + 2
                    ))
                })?;
                row.push(value);
            }
        }
        rows.push(row);
    }

    let dataset = LabeledDataset::new(ids, labels, rows).map_err(map_stats_error)?;
    let mode = match args.mode {
        StatsMode::PerReference => DispersionMode::PerReference,
        StatsMode::Pooled => DispersionMode::Pooled,
    };
    let report = class_dispersion(&dataset, mode).map_err(map_stats_error)?;

    let mut writer = csv::Writer::from_path(&args.out)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", args.out.display())))?;
    writer
        .write_record(["feature", "intra_qcd", "inter_qcd", "degenerate"])
        .and_then(|_| {
            stat_names
                .iter()
                .zip(&report.features)
                .try_for_each(|(name, f)| {
                    writer.write_record([
                        name.as_str(),
                        &format!("{}", f.intra_qcd),
                        &format!("{}", f.inter_qcd),
                        if f.degenerate { "true" } else { "false" },
                    ])
                })
        })
        .and_then(|_| {
            writer.write_record([
                "intra_class_variance_ratio",
                &format!("{}", report.intra_class_variance_ratio),
                "",
                "",
            ])
        })
        .and_then(|_| {
            writer.write_record([
                "degenerate_features",
                &format!("{}", report.degenerate_count),
                "",
                "",
            ])
        })
        .and_then(|_| writer.flush().map_err(csv::Error::from))
        .map_err(|e| CliError::Failure(format!("{}: {e}", args.out.display())))?;

    println!(
        "{} features, {} degenerate; intra-class variance ratio {}",
        report.features.len(),
        report.degenerate_count,
        report.intra_class_variance_ratio
    );
    Ok(0)
}

fn map_stats_error(err: StatsError) -> CliError {
    match err {
        StatsError::SingleClass(_) => CliError::Usage(format!(
            "{err}: inter-class dispersion is undefined for a single class"
        )),
        StatsError::ClassTooSmall(_) | StatsError::TooFew(_) | StatsError::Empty => {
            CliError::Usage(err.to_string())
        }
        other => CliError::Failure(other.to_string()),
    }
}
