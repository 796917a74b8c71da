use super::{SampleRecord, N_FEATURES};
use crate::error::{Error, Result};

/// Single-channel network input: 13 rows (one per feature, in file column
/// order) by `cols` columns, stored row-major. Records produce one column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: Vec<f64>,
    cols: usize,
}

impl FeatureMatrix {
    pub const ROWS: usize = N_FEATURES;

    pub fn from_record(record: &SampleRecord) -> Result<Self> {
        Self::from_column(&record.values()?)
    }

    pub fn from_column(column: &[f64]) -> Result<Self> {
        Self::from_rows(column, 1)
    }

    pub fn from_rows(values: &[f64], cols: usize) -> Result<Self> {
        if cols == 0 || values.len() != Self::ROWS * cols {
            return Err(Error::DimensionMismatch {
                expected: Self::ROWS * cols.max(1),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::MalformedRow {
                line: i / cols + 1,
                reason: "non-finite feature value".into(),
            });
        }
        Ok(Self {
            values: values.to_vec(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        Self::ROWS
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Column `col` read top to bottom.
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..Self::ROWS).map(|r| self.get(r, col)).collect()
    }

    /// Row-major contents; for a single-column matrix this is the feature vector.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Shorthand used by the model: standardized record values to a 13x1 matrix.
pub fn to_feature_matrix(record: &SampleRecord) -> Result<FeatureMatrix> {
    FeatureMatrix::from_record(record)
}
