use std::cmp::Ordering;

use super::{Dataset, N_FEATURES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumericRule {
    #[default]
    ColumnMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CategoricalRule {
    #[default]
    ColumnMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ImputationPolicy {
    pub numeric_rule: NumericRule,
    pub categorical_rule: CategoricalRule,
}

/// Per-column fill values learned from a reference partition.
///
/// A column with no observed values in the reference gets no fill value; it
/// is only an error to apply the imputer to data that is missing that column.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputer {
    fill: [Option<f64>; N_FEATURES],
}

impl Imputer {
    pub fn fit(source: &Dataset, policy: ImputationPolicy) -> Self {
        let mut fill = [None; N_FEATURES];
        for (column, slot) in fill.iter_mut().enumerate() {
            let observed: Vec<f64> = source.column(column).flatten().collect();
            if observed.is_empty() {
                continue;
            }
            *slot = Some(if source.categorical_mask[column] {
                match policy.categorical_rule {
                    CategoricalRule::ColumnMode => mode(observed),
                }
            } else {
                match policy.numeric_rule {
                    NumericRule::ColumnMean => mean(&observed),
                }
            });
        }
        Self { fill }
    }

    pub fn from_fill_values(fill: [Option<f64>; N_FEATURES]) -> Self {
        Self { fill }
    }

    pub fn fill_values(&self) -> &[Option<f64>; N_FEATURES] {
        &self.fill
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let mut out = data.clone();
        for record in &mut out.records {
            record.features = self.fill_features(&record.features)?;
        }
        Ok(out)
    }

    pub fn fill_features(
        &self,
        features: &[Option<f64>; N_FEATURES],
    ) -> Result<[Option<f64>; N_FEATURES]> {
        let mut out = *features;
        for (column, slot) in out.iter_mut().enumerate() {
            if slot.is_none() {
                *slot = Some(self.fill[column].ok_or(Error::AllMissingColumn { column })?);
            }
        }
        Ok(out)
    }
}

/// Fills every missing value in `data` from statistics of `stats_source`.
pub fn impute_missing(
    data: &Dataset,
    policy: ImputationPolicy,
    stats_source: &Dataset,
) -> Result<Dataset> {
    Imputer::fit(stats_source, policy).apply(data)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

// Most frequent value; ties go to the smallest.
fn mode(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let mut best = (values[0], 0usize);
    let mut i = 0;
    while i < values.len() {
        let run = values[i..]
            .iter()
            .take_while(|v| v.total_cmp(&values[i]) == Ordering::Equal)
            .count();
        if run > best.1 {
            best = (values[i], run);
        }
        i += run;
    }
    best.0
}
