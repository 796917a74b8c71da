use crate::data::{Dataset, ImputationPolicy, Label, Preprocessor, N_FEATURES};
use crate::error::{Error, Result};
use crate::train::Prediction;

/// How one input column maps into the encoded design matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnEncoding {
    Numeric,
    /// Observed categories in ascending order; the first is the reference and
    /// gets no indicator column.
    Categorical {
        categories: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DummyEncoding {
    pub columns: Vec<ColumnEncoding>,
}

impl DummyEncoding {
    /// Learns the category sets of every categorical column of a fully imputed dataset.
    pub fn fit(data: &Dataset) -> Result<Self> {
        let mut columns = Vec::with_capacity(N_FEATURES);
        for c in 0..N_FEATURES {
            if !data.categorical_mask[c] {
                columns.push(ColumnEncoding::Numeric);
                continue;
            }
            let mut categories = data
                .column(c)
                .map(|v| v.ok_or(Error::MissingValue { column: c }))
                .collect::<Result<Vec<f64>>>()?;
            categories.sort_by(f64::total_cmp);
            categories.dedup();
            columns.push(ColumnEncoding::Categorical { categories });
        }
        Ok(Self { columns })
    }

    pub fn width(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match c {
                ColumnEncoding::Numeric => 1,
                ColumnEncoding::Categorical { categories } => categories.len().saturating_sub(1),
            })
            .sum()
    }

    /// Numeric values pass through; a categorical value becomes c-1 indicators,
    /// all zero for the reference or for a category not seen when fitting.
    pub fn encode(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.columns.len() {
            return Err(Error::ArityMismatch {
                expected: self.columns.len(),
                found: values.len(),
            });
        }
        let mut out = Vec::with_capacity(self.width());
        for (v, col) in values.iter().zip(&self.columns) {
            match col {
                ColumnEncoding::Numeric => out.push(*v),
                ColumnEncoding::Categorical { categories } => {
                    out.extend(
                        categories
                            .iter()
                            .skip(1)
                            .map(|c| if c == v { 1.0 } else { 0.0 }),
                    );
                }
            }
        }
        Ok(out)
    }
}

/// Reference-category dummy coding of a fully imputed dataset.
pub fn dummy_encode(data: &Dataset) -> Result<(Vec<Vec<f64>>, DummyEncoding)> {
    let encoding = DummyEncoding::fit(data)?;
    let rows = data
        .records
        .iter()
        .map(|r| encoding.encode(&r.values()?))
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, encoding))
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Full-batch gradient descent on the mean cross-entropy, from zero weights.
pub fn fit_logistic(
    x: &[Vec<f64>],
    y: &[f64],
    learning_rate: f64,
    epochs: usize,
) -> (Vec<f64>, f64) {
    let dim = x.first().map_or(0, Vec::len);
    let n = x.len() as f64;
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut grad_w = vec![0.0; dim];
    for _ in 0..epochs {
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (row, &target) in x.iter().zip(y) {
            let z = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + b;
            let err = sigmoid(z) - target;
            for (g, a) in grad_w.iter_mut().zip(row) {
                *g += err * a;
            }
            grad_b += err;
        }
        for (wi, g) in w.iter_mut().zip(&grad_w) {
            *wi -= learning_rate * g / n;
        }
        b -= learning_rate * grad_b / n;
    }
    (w, b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DvLogisticConfig {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for DvLogisticConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 2000,
        }
    }
}

/// Logistic regression over dummy-coded categoricals and standardized numerics.
#[derive(Debug, Clone, PartialEq)]
pub struct DvLogisticModel {
    pub preprocessor: Preprocessor,
    pub categorical_mask: [bool; N_FEATURES],
    pub encoding: DummyEncoding,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl DvLogisticModel {
    /// Imputed values with numeric columns standardized and categorical codes kept raw.
    fn prepare(
        preprocessor: &Preprocessor,
        mask: &[bool; N_FEATURES],
        features: &[Option<f64>],
    ) -> Result<[f64; N_FEATURES]> {
        let features: &[Option<f64>; N_FEATURES] =
            features.try_into().map_err(|_| Error::ArityMismatch {
                expected: N_FEATURES,
                found: features.len(),
            })?;
        let filled = preprocessor.imputer.fill_features(features)?;
        let mut out = [0.0; N_FEATURES];
        for c in 0..N_FEATURES {
            let v = filled[c].ok_or(Error::MissingValue { column: c })?;
            out[c] = if mask[c] {
                v
            } else {
                preprocessor.scaler.transform_value(c, v)
            };
        }
        Ok(out)
    }

    pub fn score(&self, features: &[Option<f64>]) -> Result<f64> {
        let values = Self::prepare(&self.preprocessor, &self.categorical_mask, features)?;
        let x = self.encoding.encode(&values)?;
        let z = x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias;
        Ok(sigmoid(z))
    }

    /// Positive class when the score exceeds 0.5.
    pub fn predict(&self, features: &[Option<f64>]) -> Result<Prediction> {
        let p = self.score(features)?;
        Ok(Prediction {
            class: if p > 0.5 {
                Label::Present
            } else {
                Label::Absent
            },
            probabilities: [1.0 - p, p],
        })
    }
}

/// Fits imputation, scaling and encoding on `data`, then the logistic weights.
/// The optimizer starts from zero weights, so the result does not depend on `_seed`.
pub fn dv_logistic_train(
    data: &Dataset,
    config: &DvLogisticConfig,
    _seed: u64,
) -> Result<DvLogisticModel> {
    if !data.has_both_classes() {
        return Err(Error::SingleClassData);
    }
    if config.learning_rate.is_nan() || config.learning_rate <= 0.0 {
        return Err(Error::InvalidHyperparams(
            "logistic learning rate must be positive".into(),
        ));
    }
    let preprocessor = Preprocessor::fit(data, ImputationPolicy::default())?;
    let mask = data.categorical_mask;
    let mut prepared = data.clone();
    for r in &mut prepared.records {
        r.features = DvLogisticModel::prepare(&preprocessor, &mask, &r.features)?.map(Some);
    }
    let (x, encoding) = dummy_encode(&prepared)?;
    let y: Vec<f64> = data.records.iter().map(|r| r.label.as_f64()).collect();
    let (weights, bias) = fit_logistic(&x, &y, config.learning_rate, config.epochs);
    Ok(DvLogisticModel {
        preprocessor,
        categorical_mask: mask,
        encoding,
        weights,
        bias,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SampleRecord;

    fn record(values: [f64; N_FEATURES], label: Label) -> SampleRecord {
        SampleRecord::complete(values, label)
    }

    #[test]
    fn chest_pain_indicators_use_first_category_as_reference() {
        let mut mask = [false; N_FEATURES];
        mask[2] = true;
        let d = Dataset::new(
            [1.0, 2.0, 3.0, 4.0, 3.0]
                .iter()
                .map(|&cp| {
                    let mut v = [0.0; N_FEATURES];
                    v[2] = cp;
                    record(v, Label::Absent)
                })
                .collect(),
        )
        .with_categorical_mask(mask);
        let (rows, enc) = dummy_encode(&d).unwrap();
        assert_eq!(enc.width(), 12 + 3);
        assert_eq!(&rows[2][2..5], &[0.0, 1.0, 0.0]);
        assert_eq!(&rows[0][2..5], &[0.0, 0.0, 0.0]);
        // unseen category -> all-zero indicators
        let mut v = [0.0; N_FEATURES];
        v[2] = 9.0;
        assert_eq!(&enc.encode(&v).unwrap()[2..5], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn binary_categorical_gets_one_column() {
        let mut mask = [false; N_FEATURES];
        mask[1] = true;
        let d = Dataset::new(vec![
            record([0.0; N_FEATURES], Label::Absent),
            record([1.0; N_FEATURES], Label::Present),
        ])
        .with_categorical_mask(mask);
        let (rows, enc) = dummy_encode(&d).unwrap();
        assert_eq!(enc.width(), N_FEATURES);
        assert_eq!(rows[1][1], 1.0);
        assert_eq!(rows[0][1], 0.0);
    }

    #[test]
    fn all_numeric_encoding_is_identity() {
        let values: [f64; N_FEATURES] = std::array::from_fn(|i| i as f64 * -0.3);
        let d = Dataset::new(vec![record(values, Label::Absent)])
            .with_categorical_mask([false; N_FEATURES]);
        let (rows, _) = dummy_encode(&d).unwrap();
        assert_eq!(rows[0], values.to_vec());
    }

    #[test]
    fn separable_toy_set_is_fit_exactly() {
        let x = vec![
            vec![2.0, 1.0],
            vec![1.5, 2.0],
            vec![3.0, 0.5],
            vec![-1.0, -2.0],
            vec![-2.0, -0.5],
            vec![-0.5, -1.5],
        ];
        let y = vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let (w, b) = fit_logistic(&x, &y, 0.1, 500);
        for (row, t) in x.iter().zip(&y) {
            let p = sigmoid(row[0] * w[0] + row[1] * w[1] + b);
            assert_eq!(p > 0.5, *t == 1.0);
        }
    }

    #[test]
    fn zero_epochs_scores_one_half() {
        let (w, b) = fit_logistic(&[vec![1.0, 2.0]], &[1.0], 0.1, 0);
        assert_eq!((w, b), (vec![0.0, 0.0], 0.0));
    }

    #[test]
    fn label_swap_negates_weights_on_symmetric_pair() {
        let x = vec![vec![1.0, 2.0], vec![-1.0, -2.0]];
        let (w, b) = fit_logistic(&x, &[1.0, 0.0], 0.1, 200);
        let (w2, b2) = fit_logistic(&x, &[0.0, 1.0], 0.1, 200);
        // first step from zero: gradient = mean((0.5 - y) x) = (-0.5, -1.0), so w moves along +x1
        let (w1, _) = fit_logistic(&x, &[1.0, 0.0], 0.1, 1);
        assert!((w1[0] - 0.05).abs() < 1e-15 && (w1[1] - 0.1).abs() < 1e-15);
        for (a, c) in w.iter().zip(&w2) {
            assert!((a + c).abs() < 1e-12);
        }
        assert!(b.abs() < 1e-12 && b2.abs() < 1e-12);
    }

    #[test]
    fn zero_model_scores_half_and_picks_class_zero() {
        let d = Dataset::new(vec![
            record([0.0; N_FEATURES], Label::Absent),
            record([1.0; N_FEATURES], Label::Present),
        ]);
        let mut m = dv_logistic_train(
            &d,
            &DvLogisticConfig {
                epochs: 0,
                ..Default::default()
            },
            0,
        )
        .unwrap();
        let p = m.predict(&[Some(0.5); N_FEATURES]).unwrap();
        assert_eq!((p.class, p.probabilities[1]), (Label::Absent, 0.5));

        // monotone in a positively weighted numeric feature (column 0 is numeric)
        m.weights.iter_mut().for_each(|w| *w = 0.0);
        m.weights[0] = 1.5;
        let mut last = 0.0;
        for age in [-50.0, 0.0, 0.3, 0.7, 40.0] {
            let mut f = [Some(0.0); N_FEATURES];
            f[0] = Some(age);
            let s = m.score(&f).unwrap();
            assert!(s >= last);
            last = s;
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let d = Dataset::new(vec![record([0.0; N_FEATURES], Label::Absent)]);
        assert!(matches!(
            dv_logistic_train(&d, &DvLogisticConfig::default(), 0),
            Err(Error::SingleClassData)
        ));
    }
}
