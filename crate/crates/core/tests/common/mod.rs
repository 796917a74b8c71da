#![allow(dead_code)]

use std::path::PathBuf;

use cardioseq::data::{Dataset, FeatureMatrix, Label};
use cardioseq::error::Result;
use cardioseq::model::{Classifier, Learner};
use cardioseq::nn::{model_backward, model_forward, Dropout, Mode, ModelParams};
use cardioseq::train::Prediction;

/// Zero-pads `input` by `w / 2` on each side and slides every kernel over it.
/// `kernels[k]` is `(weights, bias)`.
pub fn naive_conv(input: &[f64], kernels: &[(Vec<f64>, f64)]) -> Vec<Vec<f64>> {
    let mut maps = Vec::new();
    for (weights, bias) in kernels {
        let half = weights.len() / 2;
        let mut padded = vec![0.0; half];
        padded.extend_from_slice(input);
        padded.extend(std::iter::repeat_n(0.0, half));
        let mut map = Vec::new();
        for i in 0..input.len() {
            let mut acc = 0.0;
            for t in 0..weights.len() {
                acc += weights[t] * padded[i + t];
            }
            map.push(acc + bias);
        }
        maps.push(map);
    }
    maps
}

/// `-ln softmax(logits)[label]`, computed stably.
pub fn nll(logits: &[f64], label: Label) -> f64 {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logits.iter().map(|z| (z - m).exp()).sum::<f64>().ln();
    lse - logits[label.index()]
}

pub fn loss_at(params: &ModelParams, x: &[f64], label: Label, dropout: Dropout) -> f64 {
    let input = FeatureMatrix::from_column(x).unwrap();
    let out = model_forward(&input, params, Mode::Train(dropout)).unwrap();
    nll(&out.logits, label)
}

/// Central differences with step `h` for every parameter.
pub fn finite_difference(
    params: &ModelParams,
    x: &[f64],
    label: Label,
    dropout: Dropout,
    h: f64,
) -> Vec<f64> {
    let mut p = params.clone();
    (0..params.len())
        .map(|i| {
            let orig = p.as_slice()[i];
            p.as_mut_slice()[i] = orig + h;
            let up = loss_at(&p, x, label, dropout);
            p.as_mut_slice()[i] = orig - h;
            let down = loss_at(&p, x, label, dropout);
            p.as_mut_slice()[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

pub fn analytic_gradient(
    params: &ModelParams,
    x: &[f64],
    label: Label,
    dropout: Dropout,
) -> Vec<f64> {
    let input = FeatureMatrix::from_column(x).unwrap();
    let out = model_forward(&input, params, Mode::Train(dropout)).unwrap();
    model_backward(out.cache.as_ref().unwrap(), params, label)
        .unwrap()
        .as_slice()
        .to_vec()
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// Gaussian elimination with partial pivoting on `a x = b`, `b` with several columns.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * p;
            }
            let (upper, lower) = b.split_at_mut(row);
            for (x, p) in lower[0].iter_mut().zip(&upper[col]) {
                *x -= f * p;
            }
        }
    }
    let m = b[0].len();
    let mut x = vec![vec![0.0; m]; n];
    for row in (0..n).rev() {
        for c in 0..m {
            let mut acc = b[row][c];
            for k in row + 1..n {
                acc -= a[row][k] * x[k][c];
            }
            x[row][c] = acc / a[row][row];
        }
    }
    x
}

/// `HᵀH + λI` and `HᵀY` by plain loops over row-major inputs.
pub fn normal_equations(
    h: &[f64],
    rows: usize,
    cols: usize,
    y: &[f64],
    classes: usize,
    ridge: f64,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut a = vec![vec![0.0; cols]; cols];
    let mut b = vec![vec![0.0; classes]; cols];
    for r in 0..rows {
        for i in 0..cols {
            for j in 0..cols {
                a[i][j] += h[r * cols + i] * h[r * cols + j];
            }
            for c in 0..classes {
                b[i][c] += h[r * cols + i] * y[r * classes + c];
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += ridge;
    }
    (a, b)
}

/// `‖(HᵀH + λI) W − HᵀY‖∞` with `w` row-major `cols x classes`.
pub fn ridge_residual_oracle(
    h: &[f64],
    rows: usize,
    cols: usize,
    y: &[f64],
    classes: usize,
    ridge: f64,
    w: &[f64],
) -> f64 {
    let (a, b) = normal_equations(h, rows, cols, y, classes, ridge);
    let mut worst = 0.0_f64;
    for i in 0..cols {
        for c in 0..classes {
            let mut acc = -b[i][c];
            for k in 0..cols {
                acc += a[i][k] * w[k * classes + c];
            }
            worst = worst.max(acc.abs());
        }
    }
    worst
}

/// Learner whose models always answer the same class.
pub struct Constant(pub Label);

impl Classifier for Constant {
    fn predict(&self, _features: &[Option<f64>]) -> Result<Prediction> {
        let mut p = [0.0; 2];
        p[self.0.index()] = 1.0;
        Ok(Prediction {
            class: self.0,
            probabilities: p,
        })
    }
}

impl Learner for Constant {
    type Model = Constant;

    fn name(&self) -> String {
        "constant".into()
    }

    fn describe(&self) -> String {
        format!("class={}", self.0.index())
    }

    fn fit(&self, _train: &Dataset, _seed: u64) -> Result<Constant> {
        Ok(Constant(self.0))
    }
}

/// Workspace-level `data/` directory.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Path from the environment variable `var`, else `data/<file>` when present.
pub fn locate(var: &str, file: &str) -> Option<PathBuf> {
    if let Some(p) = std::env::var_os(var) {
        let p = PathBuf::from(p);
        return p.is_file().then_some(p);
    }
    let p = data_dir().join(file);
    p.is_file().then_some(p)
}

pub fn statlog_path() -> Option<PathBuf> {
    locate("CARDIOSEQ_STATLOG", "heart.dat")
}

pub fn cleveland_path() -> Option<PathBuf> {
    locate("CARDIOSEQ_CLEVELAND", "processed.cleveland.data")
}
