use nalgebra::{DMatrix, DVector};

use crate::data::{Label, Preprocessor, N_FEATURES};
use crate::error::{Error, Result};
use crate::train::Prediction;

use super::logistic::sigmoid;

pub const DEFAULT_RIDGE: f64 = 1e-6;

/// Single-hidden-layer network with sigmoid hidden units and a linear output
/// layer, one output per class.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    pub preprocessor: Preprocessor,
    pub hidden_size: usize,
    /// `hidden_size x N_FEATURES`, row-major.
    pub hidden_weights: Vec<f64>,
    pub hidden_biases: Vec<f64>,
    /// `hidden_size x 2`, row-major.
    pub output_weights: Vec<f64>,
}

/// Sigmoid hidden activations for `inputs` (each of length `N_FEATURES`), as an
/// `inputs.len() x hidden` row-major matrix.
pub fn hidden_activations(
    inputs: &[[f64; N_FEATURES]],
    hidden_weights: &[f64],
    hidden_biases: &[f64],
) -> Vec<f64> {
    let h = hidden_biases.len();
    let mut out = Vec::with_capacity(inputs.len() * h);
    for x in inputs {
        for j in 0..h {
            let row = &hidden_weights[j * N_FEATURES..(j + 1) * N_FEATURES];
            let z = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + hidden_biases[j];
            out.push(sigmoid(z));
        }
    }
    out
}

/// One-hot targets as an `n x 2` row-major matrix.
pub fn one_hot(labels: &[Label]) -> Vec<f64> {
    labels
        .iter()
        .flat_map(|l| match l {
            Label::Absent => [1.0, 0.0],
            Label::Present => [0.0, 1.0],
        })
        .collect()
}

fn normal_equations(
    h_act: &[f64],
    rows: usize,
    cols: usize,
    y: &[f64],
    classes: usize,
    ridge: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let h = DMatrix::from_row_slice(rows, cols, h_act);
    let y = DMatrix::from_row_slice(rows, classes, y);
    let mut a = h.transpose() * &h;
    for i in 0..cols {
        a[(i, i)] += ridge;
    }
    (a, h.transpose() * y)
}

/// Solves `(HᵀH + ridge·I) W = HᵀY` for the `cols x classes` output weights
/// (row-major) by Cholesky factorization, followed by iterative refinement.
pub fn elm_solve_output(
    h_act: &[f64],
    rows: usize,
    cols: usize,
    y: &[f64],
    classes: usize,
    ridge: f64,
) -> Result<Vec<f64>> {
    if h_act.len() != rows * cols || y.len() != rows * classes {
        return Err(Error::ShapeMismatch(format!(
            "activations {} for {rows}x{cols}, targets {} for {rows}x{classes}",
            h_act.len(),
            y.len()
        )));
    }
    if !(ridge > 0.0 && ridge.is_finite()) || h_act.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let (a, b) = normal_equations(h_act, rows, cols, y, classes, ridge);
    let chol = a.clone().cholesky().ok_or(Error::NonFiniteInput)?;
    let mut w = chol.solve(&b);
    for _ in 0..3 {
        let r = &b - &a * &w;
        if r.amax() == 0.0 {
            break;
        }
        w += chol.solve(&r);
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(w.transpose().as_slice().to_vec())
}

/// `‖(HᵀH + ridge·I) W − HᵀY‖∞` for row-major `w`.
pub fn ridge_residual(
    h_act: &[f64],
    rows: usize,
    cols: usize,
    y: &[f64],
    classes: usize,
    ridge: f64,
    w: &[f64],
) -> f64 {
    let (a, b) = normal_equations(h_act, rows, cols, y, classes, ridge);
    let w = DMatrix::from_row_slice(cols, classes, w);
    (a * w - b).amax()
}

impl ElmModel {
    pub fn input_dim(&self) -> usize {
        N_FEATURES
    }

    /// Raw output-layer activations for one record.
    pub fn outputs(&self, features: &[Option<f64>]) -> Result<[f64; 2]> {
        let x = self.preprocessor.transform_features(features)?;
        let act = hidden_activations(&[x], &self.hidden_weights, &self.hidden_biases);
        Ok(output_activations(&act, &self.output_weights))
    }

    /// Argmax of the output activations (ties to class 0). The reported
    /// probabilities are the softmax of the two activations.
    pub fn predict(&self, features: &[Option<f64>]) -> Result<Prediction> {
        let out = self.outputs(features)?;
        let p = crate::nn::softmax(&out);
        Ok(Prediction {
            class: if out[1] > out[0] {
                Label::Present
            } else {
                Label::Absent
            },
            probabilities: [p[0], p[1]],
        })
    }
}

pub(crate) fn output_activations(act: &[f64], output_weights: &[f64]) -> [f64; 2] {
    let v = DVector::from_column_slice(act);
    let w = DMatrix::from_row_slice(act.len(), 2, output_weights);
    let o = w.transpose() * v;
    [o[0], o[1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system_recovers_targets() {
        let h = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let y = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let w = elm_solve_output(&h, 3, 3, &y, 2, 1e-8).unwrap();
        for (a, b) in w.iter().zip(&y) {
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn huge_ridge_shrinks_to_zero() {
        let h = [0.3, 0.9, 0.1, 0.5];
        let y = [1.0, 0.0, 0.0, 1.0];
        let w = elm_solve_output(&h, 2, 2, &y, 2, 1e12).unwrap();
        assert!(w.iter().all(|v| v.abs() < 1e-11));
    }

    #[test]
    fn non_finite_activations_are_rejected() {
        let h = [f64::NAN, 1.0];
        assert!(matches!(
            elm_solve_output(&h, 1, 2, &[1.0, 0.0], 2, 1e-6),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn two_sample_prediction_matches_hand_arithmetic() {
        // hidden activations [0.2, 0.7] and [0.9, 0.1]; W = [[1, -1], [0, 2]]
        let w = [1.0, -1.0, 0.0, 2.0];
        assert_eq!(output_activations(&[0.2, 0.7], &w), [0.2, -0.2 + 1.4]);
        assert_eq!(output_activations(&[0.9, 0.1], &w), [0.9, -0.9 + 0.2]);
    }
}
