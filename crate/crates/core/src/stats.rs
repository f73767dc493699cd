//! Robust dispersion statistics for labeled feature matrices.
//!
//! The quality measure for a feature is how tightly it clusters within a
//! class compared to the whole dataset: for each row r we form the
//! normalized median absolute deviation NMAD_r = MAD(X) / |x_r| * 100, where
//! X is the multiset of that feature's values over r's own class (intra) or
//! over all rows (inter) and x_r is r's own value. The quartile coefficient
//! of dispersion (QCD) of the per-row NMADs summarizes each side, and a
//! feature "separates" when its intra-class QCD is strictly below its
//! inter-class QCD.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("statistic requires a nonempty list")]
    Empty,
    #[error("quartiles require at least 2 values (got {0})")]
    TooFew(usize),
    #[error("normalization reference must be nonzero")]
    ZeroReference,
    #[error("quartile sum is zero; dispersion ratio undefined")]
    ZeroQuartileSum,
    #[error("dataset row {row} has no label")]
    MissingLabel { row: usize },
    #[error("class {0:?} has fewer than 2 members")]
    ClassTooSmall(String),
    #[error("statistics need at least 2 distinct classes (got {0})")]
    SingleClass(usize),
    #[error("row {row} has {got} features, expected {expect}")]
    RaggedRow { row: usize, got: usize, expect: usize },
}

/// Median with the usual convention: mean of the two middle elements for
/// even lengths.
pub fn median(xs: &[f64]) -> Result<f64, StatsError> {
    if xs.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("statistics reject NaN inputs"));
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Median absolute deviation: median of |x - median(xs)|.
pub fn mad(xs: &[f64]) -> Result<f64, StatsError> {
    let m = median(xs)?;
    let deviations: Vec<f64> = xs.iter().map(|x| (x - m).abs()).collect();
    median(&deviations)
}

/// Normalized MAD as a percentage of a reference magnitude.
pub fn nmad(mad_value: f64, reference: f64) -> Result<f64, StatsError> {
    if reference == 0.0 {
        return Err(StatsError::ZeroReference);
    }
    Ok(mad_value / reference.abs() * 100.0)
}

/// First and third quartiles by linear interpolation at positions
/// `0.25 (n-1)` and `0.75 (n-1)` of the sorted list.
pub fn quartiles(xs: &[f64]) -> Result<(f64, f64), StatsError> {
    if xs.len() < 2 {
        return Err(StatsError::TooFew(xs.len()));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("statistics reject NaN inputs"));
    let at = |pos: f64| -> f64 {
        let lo = pos.floor() as usize;
        let frac = pos - pos.floor();
        if frac == 0.0 {
            sorted[lo]
        } else {
            sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
        }
    };
    let n = (sorted.len() - 1) as f64;
    Ok((at(0.25 * n), at(0.75 * n)))
}

/// Quartile coefficient of dispersion (Q3 - Q1) / (Q3 + Q1).
pub fn qcd(xs: &[f64]) -> Result<f64, StatsError> {
    let (q1, q3) = quartiles(xs)?;
    if q1 + q3 == 0.0 {
        return Err(StatsError::ZeroQuartileSum);
    }
    Ok((q3 - q1) / (q3 + q1))
}

/// How the class-dispersion pass aggregates NMAD values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionMode {
    /// One NMAD per row: MAD over the relevant value set, normalized by the
    /// row's own value. This is the default and the mode the report
    /// guarantees are written against.
    PerReference,
    /// One NMAD per class: MAD over the class (or the whole dataset for the
    /// inter side), normalized by the class median. Kept for comparison;
    /// coarser, since each feature yields only one NMAD per class.
    Pooled,
}

/// A feature matrix with one class label per row.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    /// Row-major: `features[row][column]`.
    pub features: Vec<Vec<f64>>,
}

impl LabeledDataset {
    pub fn new(
        ids: Vec<String>,
        labels: Vec<String>,
        features: Vec<Vec<f64>>,
    ) -> Result<Self, StatsError> {
        if features.is_empty() {
            return Err(StatsError::Empty);
        }
        if labels.len() < features.len() {
            return Err(StatsError::MissingLabel { row: labels.len() });
        }
        let width = features[0].len();
        for (row, r) in features.iter().enumerate() {
            if r.len() != width {
                return Err(StatsError::RaggedRow {
                    row,
                    got: r.len(),
                    expect: width,
                });
            }
        }
        Ok(LabeledDataset {
            ids,
            labels,
            features,
        })
    }

    pub fn feature_count(&self) -> usize {
        self.features[0].len()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.features.iter().map(|r| r[j]).collect()
    }

    fn class_rows(&self) -> Vec<(String, Vec<usize>)> {
        let mut classes: Vec<(String, Vec<usize>)> = Vec::new();
        for (row, label) in self.labels.iter().enumerate().take(self.features.len()) {
            match classes.iter_mut().find(|(c, _)| c == label) {
                Some((_, rows)) => rows.push(row),
                None => classes.push((label.clone(), vec![row])),
            }
        }
        classes
    }
}

/// Per-feature outcome of the dispersion pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureDispersion {
    pub intra_qcd: f64,
    pub inter_qcd: f64,
    /// Degenerate features (zero reference value somewhere, or an undefined
    /// quartile ratio) are excluded from the ratio.
    pub degenerate: bool,
    pub separates: bool,
}

/// Dataset-level dispersion summary.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionReport {
    pub features: Vec<FeatureDispersion>,
    pub degenerate_count: usize,
    /// Fraction of non-degenerate features whose intra-class QCD is
    /// strictly below their inter-class QCD.
    pub intra_class_variance_ratio: f64,
}

/// QCD of an NMAD list with the degenerate-zero convention: a list that is
/// identically zero (perfectly tight cluster) counts as dispersion 0 rather
/// than an undefined ratio.
fn qcd_of_nmads(nmads: &[f64]) -> Result<f64, StatsError> {
    if nmads.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    qcd(nmads)
}

/// Intra- vs inter-class dispersion of every feature column.
///
/// For each feature and each row r: the intra NMAD normalizes the MAD of
/// r's own class by |x_r|; the inter NMAD normalizes the MAD of the whole
/// dataset by |x_r|. QCD over the per-row NMAD lists gives one intra and
/// one inter value per feature. Features hitting a zero reference or an
/// undefined quartile ratio are flagged degenerate and skipped by the
/// summary ratio.
pub fn class_dispersion(
    dataset: &LabeledDataset,
    mode: DispersionMode,
) -> Result<DispersionReport, StatsError> {
    let classes = dataset.class_rows();
    if classes.len() < 2 {
        return Err(StatsError::SingleClass(classes.len()));
    }
    for (label, rows) in &classes {
        if rows.len() < 2 {
            return Err(StatsError::ClassTooSmall(label.clone()));
        }
    }

    let mut features = Vec::with_capacity(dataset.feature_count());
    let mut degenerate_count = 0usize;
    let mut separating = 0usize;
    let mut usable = 0usize;

    for j in 0..dataset.feature_count() {
        let column = dataset.column(j);
        let outcome = feature_dispersion(&column, &classes, mode);
        let fd = match outcome {
            Ok((intra_qcd, inter_qcd)) => {
                let separates = intra_qcd < inter_qcd;
                usable += 1;
                if separates {
                    separating += 1;
                }
                FeatureDispersion {
                    intra_qcd,
                    inter_qcd,
                    degenerate: false,
                    separates,
                }
            }
            Err(_) => {
                degenerate_count += 1;
                FeatureDispersion {
                    intra_qcd: f64::NAN,
                    inter_qcd: f64::NAN,
                    degenerate: true,
                    separates: false,
                }
            }
        };
        features.push(fd);
    }

    let ratio = if usable > 0 {
        separating as f64 / usable as f64
    } else {
        0.0
    };
    Ok(DispersionReport {
        features,
        degenerate_count,
        intra_class_variance_ratio: ratio,
    })
}

fn feature_dispersion(
    column: &[f64],
    classes: &[(String, Vec<usize>)],
    mode: DispersionMode,
) -> Result<(f64, f64), StatsError> {
    let all_mad = mad(column)?;
    match mode {
        DispersionMode::PerReference => {
            let mut intra = Vec::with_capacity(column.len());
            let mut inter = Vec::with_capacity(column.len());
            for (_, rows) in classes {
                let class_values: Vec<f64> = rows.iter().map(|&r| column[r]).collect();
                let class_mad = mad(&class_values)?;
                for &r in rows {
                    intra.push(nmad(class_mad, column[r])?);
                    inter.push(nmad(all_mad, column[r])?);
                }
            }
            Ok((qcd_of_nmads(&intra)?, qcd_of_nmads(&inter)?))
        }
        DispersionMode::Pooled => {
            let mut intra = Vec::with_capacity(classes.len());
            let mut inter = Vec::with_capacity(classes.len());
            for (_, rows) in classes {
                let class_values: Vec<f64> = rows.iter().map(|&r| column[r]).collect();
                let reference = median(&class_values)?;
                intra.push(nmad(mad(&class_values)?, reference)?);
                inter.push(nmad(all_mad, reference)?);
            }
            Ok((qcd_of_nmads(&intra)?, qcd_of_nmads(&inter)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[3.0]).unwrap(), 3.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(median(&[5.0, 1.0, 3.0]).unwrap(), 3.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.5);
        assert_eq!(median(&[]).unwrap_err(), StatsError::Empty);
    }

    #[test]
    fn mad_hand_values() {
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 1.0);
        assert_eq!(mad(&[7.0, 7.0, 7.0]).unwrap(), 0.0);
        // Outliers cannot drag the MAD: the deviation multiset is
        // {0,0,0,99} whose median is 0.
        assert_eq!(mad(&[1.0, 1.0, 1.0, 100.0]).unwrap(), 0.0);
        // Breakdown check: one wild value in five leaves MAD at 1.
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 1e9]).unwrap(), 1.0);
    }

    #[test]
    fn nmad_percentage() {
        assert_eq!(nmad(1.0, 2.0).unwrap(), 50.0);
        assert_eq!(nmad(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(nmad(1.0, -2.0).unwrap(), 50.0);
        assert_eq!(nmad(1.0, 0.0).unwrap_err(), StatsError::ZeroReference);
    }

    #[test]
    fn quartiles_by_linear_interpolation() {
        assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), (2.0, 4.0));
        assert_eq!(quartiles(&[1.0, 3.0]).unwrap(), (1.5, 2.5));
        assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0]).unwrap(), (1.75, 3.25));
        assert_eq!(quartiles(&[6.0, 6.0, 6.0]).unwrap(), (6.0, 6.0));
        assert_eq!(quartiles(&[1.0]).unwrap_err(), StatsError::TooFew(1));
    }

    #[test]
    fn qcd_hand_values() {
        assert_eq!(qcd(&[4.0, 4.0, 4.0]).unwrap(), 0.0);
        // (Q1, Q3) = (2, 6) -> 4/8.
        assert_eq!(qcd(&[2.0, 2.0, 2.0, 6.0, 6.0, 6.0]).unwrap(), 0.5);
        assert_close(qcd(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 1.0 / 3.0);
        assert_eq!(
            qcd(&[-1.0, -1.0, 1.0, 1.0]).unwrap_err(),
            StatsError::ZeroQuartileSum
        );
    }

    #[test]
    fn qcd_bounded_for_nonnegative_input() {
        let xs = [0.0, 1.0, 2.5, 7.0, 11.0, 30.0];
        let v = qcd(&xs).unwrap();
        assert!((0.0..=1.0).contains(&v));
    }

    fn six_row_dataset() -> LabeledDataset {
        // Four feature columns exercising the interesting cases:
        //   f0: tight arithmetic runs in both classes -> intra == inter QCD
        //   f1: globally constant -> all NMADs zero -> 0 vs 0, not strict
        //   f2: contains a zero value -> degenerate reference
        //   f3: class B much more spread than A -> strict separation
        LabeledDataset::new(
            (1..=6).map(|i| format!("row{i}")).collect(),
            ["A", "A", "A", "B", "B", "B"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            vec![
                vec![1.0, 5.0, 0.0, 1.0],
                vec![2.0, 5.0, 2.0, 2.0],
                vec![3.0, 5.0, 4.0, 3.0],
                vec![11.0, 5.0, 6.0, 10.0],
                vec![12.0, 5.0, 8.0, 30.0],
                vec![13.0, 5.0, 10.0, 50.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn six_row_dataset_matches_manual_evaluation() {
        let report = class_dispersion(&six_row_dataset(), DispersionMode::PerReference).unwrap();
        assert_eq!(report.features.len(), 4);

        // f0: both classes have MAD 1, dataset MAD 5, so the inter NMAD
        // list is exactly 5x the intra list and the scale-free QCDs agree:
        // both equal 197/287.
        let f0 = report.features[0];
        assert!(!f0.degenerate);
        assert_close(f0.intra_qcd, 197.0 / 287.0);
        assert_close(f0.inter_qcd, 197.0 / 287.0);
        assert!(!f0.separates);

        // f1: constant column, every NMAD is zero on both sides.
        let f1 = report.features[1];
        assert_eq!((f1.intra_qcd, f1.inter_qcd), (0.0, 0.0));
        assert!(!f1.separates);

        // f2: the first row's value is 0, so its NMAD is undefined.
        assert!(report.features[2].degenerate);

        // f3: intra {100, 50, 100/3, 200, 200/3, 40} -> QCD 59/161;
        // inter {500, 250, 500/3, 50, 50/3, 10} -> QCD 49/61.
        let f3 = report.features[3];
        assert_close(f3.intra_qcd, 59.0 / 161.0);
        assert_close(f3.inter_qcd, 49.0 / 61.0);
        assert!(f3.separates);

        assert_eq!(report.degenerate_count, 1);
        assert_close(report.intra_class_variance_ratio, 1.0 / 3.0);
    }

    #[test]
    fn identical_classes_never_separate() {
        // Mirrored classes: the pooled value multiset doubles the class
        // multiset, which leaves the MAD unchanged, so intra and inter
        // NMADs agree row by row.
        let ds = LabeledDataset::new(
            (1..=6).map(|i| format!("m{i}")).collect(),
            ["A", "A", "A", "B", "B", "B"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            vec![
                vec![1.0, 9.0],
                vec![2.0, 4.0],
                vec![3.0, 6.5],
                vec![1.0, 9.0],
                vec![2.0, 4.0],
                vec![3.0, 6.5],
            ],
        )
        .unwrap();
        let report = class_dispersion(&ds, DispersionMode::PerReference).unwrap();
        for f in &report.features {
            assert!(!f.degenerate);
            assert_eq!(f.intra_qcd, f.inter_qcd);
            assert!(!f.separates);
        }
        assert_eq!(report.intra_class_variance_ratio, 0.0);
    }

    #[test]
    fn constant_within_class_counts_toward_ratio() {
        // f constant per class but distinct across classes: intra NMADs all
        // zero (QCD 0 by the degenerate-zero convention), inter NMADs
        // {20, 20, 100/7, 100/7} with QCD 1/6 > 0.
        let ds = LabeledDataset::new(
            (1..=4).map(|i| format!("m{i}")).collect(),
            ["A", "A", "B", "B"].iter().map(|s| s.to_string()).collect(),
            vec![vec![5.0], vec![5.0], vec![7.0], vec![7.0]],
        )
        .unwrap();
        let report = class_dispersion(&ds, DispersionMode::PerReference).unwrap();
        let f = report.features[0];
        assert_eq!(f.intra_qcd, 0.0);
        assert_close(f.inter_qcd, 1.0 / 6.0);
        assert!(f.separates);
        assert_eq!(report.intra_class_variance_ratio, 1.0);
    }

    #[test]
    fn row_permutation_changes_nothing() {
        let base = six_row_dataset();
        let perm = [4usize, 0, 5, 2, 1, 3];
        let shuffled = LabeledDataset::new(
            perm.iter().map(|&i| base.ids[i].clone()).collect(),
            perm.iter().map(|&i| base.labels[i].clone()).collect(),
            perm.iter().map(|&i| base.features[i].clone()).collect(),
        )
        .unwrap();
        let a = class_dispersion(&base, DispersionMode::PerReference).unwrap();
        let b = class_dispersion(&shuffled, DispersionMode::PerReference).unwrap();
        assert_eq!(a.degenerate_count, b.degenerate_count);
        assert_eq!(
            a.intra_class_variance_ratio,
            b.intra_class_variance_ratio
        );
        for (x, y) in a.features.iter().zip(&b.features) {
            if !x.degenerate {
                assert_eq!(x.intra_qcd, y.intra_qcd);
                assert_eq!(x.inter_qcd, y.inter_qcd);
            }
        }
    }

    #[test]
    fn positive_scaling_changes_nothing() {
        let base = six_row_dataset();
        let scaled = LabeledDataset::new(
            base.ids.clone(),
            base.labels.clone(),
            base.features
                .iter()
                .map(|r| r.iter().map(|v| v * 1000.0).collect())
                .collect(),
        )
        .unwrap();
        let a = class_dispersion(&base, DispersionMode::PerReference).unwrap();
        let b = class_dispersion(&scaled, DispersionMode::PerReference).unwrap();
        for (x, y) in a.features.iter().zip(&b.features) {
            assert_eq!(x.degenerate, y.degenerate);
            if !x.degenerate {
                assert_eq!(x.intra_qcd, y.intra_qcd);
                assert_eq!(x.inter_qcd, y.inter_qcd);
            }
        }
        assert_eq!(
            a.intra_class_variance_ratio,
            b.intra_class_variance_ratio
        );
    }

    #[test]
    fn guards_on_classes() {
        let single = LabeledDataset::new(
            vec!["a".into(), "b".into()],
            vec!["X".into(), "X".into()],
            vec![vec![1.0], vec![2.0]],
        )
        .unwrap();
        assert_eq!(
            class_dispersion(&single, DispersionMode::PerReference).unwrap_err(),
            StatsError::SingleClass(1)
        );

        let small = LabeledDataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["X".into(), "X".into(), "Y".into()],
            vec![vec![1.0], vec![2.0], vec![3.0]],
        )
        .unwrap();
        assert_eq!(
            class_dispersion(&small, DispersionMode::PerReference).unwrap_err(),
            StatsError::ClassTooSmall("Y".into())
        );
    }

    #[test]
    fn pooled_mode_runs_and_stays_in_range() {
        let report = class_dispersion(&six_row_dataset(), DispersionMode::Pooled).unwrap();
        for f in &report.features {
            if !f.degenerate {
                assert!(f.intra_qcd.is_finite());
                assert!(f.inter_qcd.is_finite());
            }
        }
    }

    #[test]
    fn dataset_validation() {
        let ragged = LabeledDataset::new(
            vec!["a".into(), "b".into()],
            vec!["X".into(), "Y".into()],
            vec![vec![1.0, 2.0], vec![3.0]],
        );
        assert_eq!(
            ragged.unwrap_err(),
            StatsError::RaggedRow {
                row: 1,
                got: 1,
                expect: 2
            }
        );
        let unlabeled = LabeledDataset::new(
            vec!["a".into()],
            vec![],
            vec![vec![1.0]],
        );
        assert_eq!(unlabeled.unwrap_err(), StatsError::MissingLabel { row: 0 });
    }
}
