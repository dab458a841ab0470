//! Supervised classifiers: a multinomial logistic model trained by
//! full-batch gradient descent with backtracking line search, and a
//! one-vs-all L1-regularized linear SVM with a max combiner.
//!
//! Both models standardize inputs with statistics fitted on the training
//! rows and are bitwise deterministic for a fixed configuration.

mod l1svm;
mod logistic;

pub use l1svm::{predict_ova_max, svm_posterior, svm_scores, train_l1svm_ova, L1SvmConfig, L1SvmOvaModel};
pub use logistic::{
    logistic_loss_grad, predict_logistic, softmax, train_logistic, LogisticConfig, LogisticModel,
    TrainSummary,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite feature value in row {row}")]
    NonFinite { row: usize },
    #[error("{labels} labels for {rows} rows")]
    LabelCountMismatch { labels: usize, rows: usize },
    #[error("label {label} out of range for {class_count} classes")]
    LabelOutOfRange { label: usize, class_count: usize },
    #[error("class {class} absent from training data")]
    MissingClass { class: usize },
    #[error("need at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("matrix has no columns")]
    NoColumns,
}

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("input has dimension {found}, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Row-major design matrix of `rows` samples by `cols` features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, TrainError> {
        if cols == 0 {
            return Err(TrainError::NoColumns);
        }
        if data.len() != rows * cols {
            return Err(TrainError::RaggedRows {
                row: rows,
                expected: cols,
                found: data.len().saturating_sub(rows.saturating_sub(1) * cols),
            });
        }
        if let Some(row) = (0..rows).find(|&r| {
            data[r * cols..(r + 1) * cols]
                .iter()
                .any(|v| !v.is_finite())
        }) {
            return Err(TrainError::NonFinite { row });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, TrainError> {
        let cols = rows.first().map_or(0, Vec::len);
        if cols == 0 {
            return Err(TrainError::NoColumns);
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(TrainError::RaggedRows {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Per-column location/scale parameters fitted on training rows.
///
/// Scale is the population standard deviation; a constant column gets a
/// surrogate scale of one, so it standardizes to all zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &FeatureMatrix) -> Result<Self, TrainError> {
        if x.rows() < 2 {
            return Err(TrainError::TooFewSamples(x.rows()));
        }
        let n = x.rows() as f64;
        let mut means = vec![0.0; x.cols()];
        let mut stds = vec![0.0; x.cols()];
        for j in 0..x.cols() {
            let mut sum = 0.0;
            for i in 0..x.rows() {
                sum += x.row(i)[j];
            }
            let mean = sum / n;
            let mut ss = 0.0;
            for i in 0..x.rows() {
                let d = x.row(i)[j] - mean;
                ss += d * d;
            }
            let std = (ss / n).sqrt();
            means[j] = mean;
            // Guard against constant columns (and near-constant columns
            // whose deviations are pure rounding noise).
            stds[j] = if std <= 1e-12 * mean.abs().max(1.0) {
                1.0
            } else {
                std
            };
        }
        Ok(Self { means, stds })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, x: &FeatureMatrix) -> FeatureMatrix {
        let mut data = Vec::with_capacity(x.rows() * x.cols());
        for i in 0..x.rows() {
            data.extend(self.transform_row(x.row(i)));
        }
        FeatureMatrix {
            rows: x.rows(),
            cols: x.cols(),
            data,
        }
    }
}

// Shared by both trainers: labels must match the rows, stay in range, and
// cover every class at least once.
fn check_labels(
    x: &FeatureMatrix,
    labels: &[usize],
    class_count: usize,
) -> Result<(), TrainError> {
    if class_count < 2 {
        return Err(TrainError::TooFewClasses(class_count));
    }
    if labels.len() != x.rows() {
        return Err(TrainError::LabelCountMismatch {
            labels: labels.len(),
            rows: x.rows(),
        });
    }
    let mut present = vec![false; class_count];
    for &label in labels {
        if label >= class_count {
            return Err(TrainError::LabelOutOfRange { label, class_count });
        }
        present[label] = true;
    }
    if let Some(class) = present.iter().position(|&p| !p) {
        return Err(TrainError::MissingClass { class });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardizer_two_sample_column() {
        let x = FeatureMatrix::from_rows(vec![vec![1.0], vec![3.0]]).unwrap();
        let st = Standardizer::fit(&x).unwrap();
        assert_eq!(st.means, vec![2.0]);
        assert_eq!(st.stds, vec![1.0]); // population std of {1, 3}
        let z = st.transform(&x);
        assert_eq!(z.row(0), &[-1.0]);
        assert_eq!(z.row(1), &[1.0]);
    }

    #[test]
    fn standardizer_constant_column_uses_surrogate_scale() {
        let x = FeatureMatrix::from_rows(vec![vec![5.0], vec![5.0], vec![5.0]]).unwrap();
        let st = Standardizer::fit(&x).unwrap();
        assert_eq!(st.means, vec![5.0]);
        assert_eq!(st.stds, vec![1.0]);
        let z = st.transform(&x);
        for i in 0..3 {
            assert_eq!(z.row(i), &[0.0]);
        }
        // Non-representable constants standardize to zero as well.
        let x = FeatureMatrix::from_rows(vec![vec![0.1], vec![0.1], vec![0.1]]).unwrap();
        let st = Standardizer::fit(&x).unwrap();
        assert_eq!(st.stds, vec![1.0]);
        let z = st.transform(&x);
        for i in 0..3 {
            assert!(z.row(i)[0].abs() < 1e-15);
        }
    }

    #[test]
    fn standardizer_already_standardized_column() {
        let x = FeatureMatrix::from_rows(vec![vec![-1.0], vec![1.0]]).unwrap();
        let st = Standardizer::fit(&x).unwrap();
        assert_eq!(st.means, vec![0.0]);
        assert_eq!(st.stds, vec![1.0]);
    }

    #[test]
    fn standardizer_idempotent_on_training_set() {
        let x = FeatureMatrix::from_rows(vec![
            vec![1.0, 10.0, 3.0],
            vec![2.0, 20.0, 3.0],
            vec![4.0, 15.0, 3.0],
            vec![0.5, 12.0, 3.0],
        ])
        .unwrap();
        let st = Standardizer::fit(&x).unwrap();
        let z = st.transform(&x);
        let n = z.rows() as f64;
        for j in 0..z.cols() {
            let mean: f64 = (0..z.rows()).map(|i| z.row(i)[j]).sum::<f64>() / n;
            let var: f64 = (0..z.rows()).map(|i| (z.row(i)[j] - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-9, "column {j} mean {mean}");
            if j < 2 {
                assert!((var.sqrt() - 1.0).abs() < 1e-9, "column {j} std {}", var.sqrt());
            } else {
                assert_eq!(var, 0.0); // constant column stays all-zero
            }
        }
    }

    #[test]
    fn standardizer_needs_two_rows() {
        let x = FeatureMatrix::from_rows(vec![vec![1.0]]).unwrap();
        assert_eq!(Standardizer::fit(&x), Err(TrainError::TooFewSamples(1)));
    }

    #[test]
    fn label_checks() {
        let x = FeatureMatrix::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(
            check_labels(&x, &[0, 1, 1], 2),
            Ok(())
        );
        assert_eq!(
            check_labels(&x, &[0, 1], 2),
            Err(TrainError::LabelCountMismatch { labels: 2, rows: 3 })
        );
        assert_eq!(
            check_labels(&x, &[0, 1, 2], 2),
            Err(TrainError::LabelOutOfRange {
                label: 2,
                class_count: 2
            })
        );
        assert_eq!(
            check_labels(&x, &[0, 0, 0], 2),
            Err(TrainError::MissingClass { class: 1 })
        );
    }
}
