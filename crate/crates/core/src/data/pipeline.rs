use super::{
    fit_scaler, Dataset, FeatureMatrix, ImputationPolicy, Imputer, Label, ScalerStats, N_FEATURES,
};
use crate::error::{Error, Result};

/// Imputation values and scaler statistics learned from one training partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessor {
    pub imputer: Imputer,
    pub scaler: ScalerStats,
}

/// A standardized network input with its class.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: FeatureMatrix,
    pub label: Label,
}

impl Preprocessor {
    pub fn fit(train: &Dataset, policy: ImputationPolicy) -> Result<Self> {
        let imputer = Imputer::fit(train, policy);
        let scaler = fit_scaler(&imputer.apply(train)?)?;
        Ok(Self { imputer, scaler })
    }

    /// Imputed and standardized values of one raw record.
    pub fn transform_features(&self, features: &[Option<f64>]) -> Result<[f64; N_FEATURES]> {
        let features: &[Option<f64>; N_FEATURES] =
            features.try_into().map_err(|_| Error::ArityMismatch {
                expected: N_FEATURES,
                found: features.len(),
            })?;
        let filled = self.imputer.fill_features(features)?;
        let mut out = [0.0; N_FEATURES];
        for (c, slot) in out.iter_mut().enumerate() {
            let v = filled[c].ok_or(Error::MissingValue { column: c })?;
            *slot = self.scaler.transform_value(c, v);
        }
        Ok(out)
    }

    pub fn transform(&self, data: &Dataset) -> Result<Vec<Sample>> {
        data.records
            .iter()
            .map(|r| {
                Ok(Sample {
                    input: FeatureMatrix::from_column(&self.transform_features(&r.features)?)?,
                    label: r.label,
                })
            })
            .collect()
    }
}
