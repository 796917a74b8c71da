//! Heart-disease records, file dialects, and the preprocessing pipeline
//! (imputation, Z-score standardization, feature-matrix construction).

mod impute;
mod matrix;
mod parse;
mod pipeline;
mod scaler;

pub use impute::{impute_missing, CategoricalRule, ImputationPolicy, Imputer, NumericRule};
pub use matrix::{to_feature_matrix, FeatureMatrix};
pub use parse::{parse_dataset, parse_feature_list, parse_record_line, parse_str, Dialect};
pub use pipeline::{Preprocessor, Sample};
pub use scaler::{apply_scaler, fit_scaler, ScalerStats};

use crate::error::{Error, Result};

/// Number of clinical attributes per record.
pub const N_FEATURES: usize = 13;

/// Conventional attribute names, in file column order.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach", "exang", "oldpeak",
    "slope", "ca", "thal",
];

/// sex, cp, fbs, restecg, exang, slope, ca and thal are coded categories.
pub const DEFAULT_CATEGORICAL_MASK: [bool; N_FEATURES] = [
    false, true, true, false, false, true, true, false, true, false, true, true, true,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Absent,
    Present,
}

impl Label {
    pub fn index(self) -> usize {
        match self {
            Label::Absent => 0,
            Label::Present => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            0 => Some(Label::Absent),
            1 => Some(Label::Present),
            _ => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.index() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub features: [Option<f64>; N_FEATURES],
    pub label: Label,
}

impl SampleRecord {
    pub fn complete(values: [f64; N_FEATURES], label: Label) -> Self {
        Self {
            features: values.map(Some),
            label,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.features.iter().all(Option::is_some)
    }

    /// Feature values of a fully imputed record.
    pub fn values(&self) -> Result<[f64; N_FEATURES]> {
        let mut out = [0.0; N_FEATURES];
        for (column, (slot, value)) in out.iter_mut().zip(&self.features).enumerate() {
            *slot = value.ok_or(Error::MissingValue { column })?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<SampleRecord>,
    pub feature_names: Vec<String>,
    pub categorical_mask: [bool; N_FEATURES],
}

impl Dataset {
    pub fn new(records: Vec<SampleRecord>) -> Self {
        Self {
            records,
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            categorical_mask: DEFAULT_CATEGORICAL_MASK,
        }
    }

    pub fn with_categorical_mask(mut self, mask: [bool; N_FEATURES]) -> Self {
        self.categorical_mask = mask;
        self
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.records.iter().map(|r| r.label).collect()
    }

    /// Records at `indices`, keeping names and mask.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
            categorical_mask: self.categorical_mask,
        }
    }

    /// Counts of (absent, present) labels.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for r in &self.records {
            counts[r.label.index()] += 1;
        }
        counts
    }

    pub fn missing_counts(&self) -> [usize; N_FEATURES] {
        let mut counts = [0; N_FEATURES];
        for r in &self.records {
            for (c, v) in counts.iter_mut().zip(&r.features) {
                if v.is_none() {
                    *c += 1;
                }
            }
        }
        counts
    }

    pub fn has_both_classes(&self) -> bool {
        let [a, b] = self.class_counts();
        a > 0 && b > 0
    }

    /// Values of one column, `None` where missing.
    pub fn column(&self, index: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        self.records.iter().map(move |r| r.features[index])
    }
}
