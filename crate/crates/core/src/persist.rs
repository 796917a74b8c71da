//! Versioned plain-text model files.
//!
//! ```text
//! cardioseq-model v1
//! model-kind cnn
//! meta kernels 8
//! tensor conv1.weight 8 1
//! 0.123
//! ...
//! ```
//!
//! A `tensor NAME ROWS COLS` line is followed by `ROWS` lines of `COLS`
//! whitespace-separated values (no lines when `COLS` is 0). Blank lines and lines starting with `#` are
//! ignored. Values are written in shortest round-trip form, so a saved model
//! reloads bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::baselines::{ColumnEncoding, DummyEncoding, DvLogisticModel, ElmModel};
use crate::data::{Imputer, Preprocessor, ScalerStats, N_FEATURES};
use crate::error::{Error, Result};
use crate::model::{AnyModel, ModelKind};
use crate::nn::{Architecture, ModelParams, PoolMode};
use crate::train::{Hyperparams, TrainedModel, TrainingCurve};

pub const MAGIC: &str = "cardioseq-model v1";
/// Upper bound on the element count of a single tensor.
pub const MAX_TENSOR_LEN: usize = 1 << 22;
/// Upper bound on kernels per width accepted from a file.
pub const MAX_KERNELS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

/// The generic content of a model file before it is interpreted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorFile {
    pub kind: String,
    pub meta: Vec<(String, String)>,
    pub tensors: Vec<(String, Tensor)>,
}

fn format_err(line: usize, reason: impl Into<String>) -> Error {
    Error::ModelFormat {
        line,
        reason: reason.into(),
    }
}

impl TensorFile {
    pub fn new(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            ..Default::default()
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push_tensor(&mut self, name: &str, rows: usize, cols: usize, values: Vec<f64>) {
        debug_assert_eq!(rows * cols, values.len());
        self.tensors
            .push((name.to_string(), Tensor { rows, cols, values }));
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC}\nmodel-kind {}\n", self.kind);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta {k} {v}");
        }
        for (name, t) in &self.tensors {
            let _ = writeln!(out, "tensor {name} {} {}", t.rows, t.cols);
            for row in t.values.chunks(t.cols.max(1)) {
                let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            Some((n, l)) => {
                return Err(format_err(
                    n,
                    format!("expected `{MAGIC}`, found `{}`", truncate(l)),
                ))
            }
            None => return Err(format_err(0, "empty model file")),
        }
        let mut file = TensorFile::default();
        match lines.next() {
            Some((_, l)) if l.starts_with("model-kind ") => {
                file.kind = l["model-kind ".len()..].trim().to_string()
            }
            Some((n, _)) => return Err(format_err(n, "expected `model-kind` line")),
            None => return Err(format_err(0, "missing `model-kind` line")),
        }
        while let Some((n, line)) = lines.next() {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("meta") => {
                    let key = parts
                        .next()
                        .ok_or_else(|| format_err(n, "meta line without key"))?;
                    let value = parts.collect::<Vec<_>>().join(" ");
                    if file.meta.iter().any(|(k, _)| k == key) {
                        return Err(format_err(
                            n,
                            format!("duplicate meta key `{}`", truncate(key)),
                        ));
                    }
                    file.meta.push((key.to_string(), value));
                }
                Some("tensor") => {
                    let fields: Vec<&str> = parts.collect();
                    let [name, rows, cols] = fields[..] else {
                        return Err(format_err(n, "expected `tensor NAME ROWS COLS`"));
                    };
                    let dim = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| format_err(n, format!("bad dimension `{}`", truncate(s))))
                    };
                    let (rows, cols) = (dim(rows)?, dim(cols)?);
                    let len = rows
                        .checked_mul(cols)
                        .filter(|&len| len <= MAX_TENSOR_LEN)
                        .ok_or_else(|| format_err(n, "tensor too large"))?;
                    if file.tensors.iter().any(|(t, _)| t == name) {
                        return Err(format_err(
                            n,
                            format!("duplicate tensor `{}`", truncate(name)),
                        ));
                    }
                    let mut values = Vec::with_capacity(len.min(4096));
                    let value_lines = if cols == 0 { 0 } else { rows };
                    for _ in 0..value_lines {
                        let (rn, row) = lines
                            .next()
                            .ok_or_else(|| format_err(n, format!("tensor `{name}` ends early")))?;
                        let before = values.len();
                        for tok in row.split_whitespace() {
                            let v: f64 = tok.parse().map_err(|_| {
                                format_err(rn, format!("bad number `{}`", truncate(tok)))
                            })?;
                            values.push(v);
                            if values.len() - before > cols {
                                break;
                            }
                        }
                        if values.len() - before != cols {
                            return Err(format_err(
                                rn,
                                format!("expected {cols} values in tensor `{name}`"),
                            ));
                        }
                    }
                    file.tensors
                        .push((name.to_string(), Tensor { rows, cols, values }));
                }
                Some(other) => {
                    return Err(format_err(n, format!("unexpected `{}`", truncate(other))))
                }
                None => {}
            }
        }
        Ok(file)
    }

    pub fn meta(&self, key: &str) -> Result<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| format_err(0, format!("missing meta `{key}`")))
    }

    pub fn meta_parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.meta(key)?;
        v.parse()
            .map_err(|_| format_err(0, format!("bad value `{}` for meta `{key}`", truncate(v))))
    }

    pub fn tensor(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
            .ok_or_else(|| format_err(0, format!("missing tensor `{name}`")))
    }

    /// Values of tensor `name`, which must have exactly the given shape and be finite.
    pub fn tensor_shaped(&self, name: &str, rows: usize, cols: usize) -> Result<&[f64]> {
        let t = self.tensor(name)?;
        if t.rows != rows || t.cols != cols {
            return Err(format_err(
                0,
                format!(
                    "tensor `{name}` is {}x{}, expected {rows}x{cols}",
                    t.rows, t.cols
                ),
            ));
        }
        if t.values.iter().any(|v| !v.is_finite()) {
            return Err(format_err(
                0,
                format!("tensor `{name}` has non-finite values"),
            ));
        }
        Ok(&t.values)
    }
}

fn truncate(s: &str) -> String {
    s.chars().take(40).collect()
}

fn push_preprocessor(file: &mut TensorFile, p: &Preprocessor) {
    let fill = p
        .imputer
        .fill_values()
        .iter()
        .map(|v| v.unwrap_or(f64::NAN))
        .collect();
    file.push_tensor("impute.fill", 1, N_FEATURES, fill);
    file.push_tensor("scaler.mean", 1, N_FEATURES, p.scaler.mean.clone());
    file.push_tensor("scaler.std", 1, N_FEATURES, p.scaler.std.clone());
}

fn read_preprocessor(file: &TensorFile) -> Result<Preprocessor> {
    let fill = file.tensor("impute.fill")?;
    if (fill.rows, fill.cols) != (1, N_FEATURES) || fill.values.iter().any(|v| v.is_infinite()) {
        return Err(format_err(
            0,
            "tensor `impute.fill` must be 1x13 of finite values or nan",
        ));
    }
    let fill: [Option<f64>; N_FEATURES] =
        std::array::from_fn(|i| Some(fill.values[i]).filter(|v| !v.is_nan()));
    let mean = file.tensor_shaped("scaler.mean", 1, N_FEATURES)?.to_vec();
    let std = file.tensor_shaped("scaler.std", 1, N_FEATURES)?.to_vec();
    if std.iter().any(|s| *s < 0.0) {
        return Err(format_err(0, "negative standard deviation"));
    }
    Ok(Preprocessor {
        imputer: Imputer::from_fill_values(fill),
        scaler: ScalerStats { mean, std },
    })
}

fn to_file(model: &AnyModel) -> TensorFile {
    let mut file = TensorFile::new(model.kind().name());
    match model {
        AnyModel::Cnn(m) => {
            let h = &m.hyper;
            file.push_meta("kernels", h.kernels_per_width);
            file.push_meta("pool", h.pool);
            file.push_meta("learning_rate", h.learning_rate);
            file.push_meta("dropout", h.dropout_rate);
            file.push_meta("epochs", h.epochs);
            file.push_meta("batch", h.batch_size);
            file.push_meta("adam_beta1", h.adam_beta1);
            file.push_meta("adam_beta2", h.adam_beta2);
            file.push_meta("adam_epsilon", h.adam_epsilon);
            file.push_meta("seed", h.seed);
            push_preprocessor(&mut file, &m.preprocessor);
            for spec in m.params.architecture().tensors() {
                file.push_tensor(
                    &spec.name,
                    spec.rows,
                    spec.cols,
                    m.params.as_slice()[spec.range()].to_vec(),
                );
            }
        }
        AnyModel::DvLogistic(m) => {
            push_preprocessor(&mut file, &m.preprocessor);
            let mask = m
                .categorical_mask
                .iter()
                .map(|&c| if c { 1.0 } else { 0.0 })
                .collect();
            file.push_tensor("categorical_mask", 1, N_FEATURES, mask);
            for (c, col) in m.encoding.columns.iter().enumerate() {
                if let ColumnEncoding::Categorical { categories } = col {
                    file.push_tensor(
                        &format!("encoding.{c}"),
                        1,
                        categories.len(),
                        categories.clone(),
                    );
                }
            }
            file.push_tensor("dv.weight", 1, m.weights.len(), m.weights.clone());
            file.push_tensor("dv.bias", 1, 1, vec![m.bias]);
        }
        AnyModel::Elm(m) => {
            file.push_meta("hidden", m.hidden_size);
            push_preprocessor(&mut file, &m.preprocessor);
            file.push_tensor(
                "elm.hidden_weight",
                m.hidden_size,
                N_FEATURES,
                m.hidden_weights.clone(),
            );
            file.push_tensor("elm.hidden_bias", m.hidden_size, 1, m.hidden_biases.clone());
            file.push_tensor(
                "elm.output_weight",
                m.hidden_size,
                2,
                m.output_weights.clone(),
            );
        }
    }
    file
}

fn from_file(file: &TensorFile) -> Result<AnyModel> {
    let kind: ModelKind = file
        .kind
        .parse()
        .map_err(|_| format_err(2, format!("unknown model kind `{}`", truncate(&file.kind))))?;
    let preprocessor = read_preprocessor(file)?;
    match kind {
        ModelKind::Cnn => {
            let pool: PoolMode = file.meta_parse("pool")?;
            let hyper = Hyperparams {
                learning_rate: file.meta_parse("learning_rate")?,
                dropout_rate: file.meta_parse("dropout")?,
                epochs: file.meta_parse("epochs")?,
                batch_size: file.meta_parse("batch")?,
                adam_beta1: file.meta_parse("adam_beta1")?,
                adam_beta2: file.meta_parse("adam_beta2")?,
                adam_epsilon: file.meta_parse("adam_epsilon")?,
                kernels_per_width: file.meta_parse("kernels")?,
                pool,
                seed: file.meta_parse("seed")?,
            };
            if hyper.kernels_per_width == 0 || hyper.kernels_per_width > MAX_KERNELS {
                return Err(format_err(
                    0,
                    format!("kernel count must lie in 1..={MAX_KERNELS}"),
                ));
            }
            let arch = Architecture::new(hyper.kernels_per_width, pool);
            arch.validate().map_err(|e| format_err(0, e.to_string()))?;
            if arch.n_params() > MAX_TENSOR_LEN {
                return Err(format_err(0, "architecture too large"));
            }
            let mut data = Vec::with_capacity(arch.n_params());
            for spec in arch.tensors() {
                data.extend_from_slice(file.tensor_shaped(&spec.name, spec.rows, spec.cols)?);
            }
            Ok(AnyModel::Cnn(TrainedModel {
                params: ModelParams::from_flat(arch, data)?,
                preprocessor,
                hyper,
                curve: TrainingCurve::default(),
            }))
        }
        ModelKind::DvLogistic => {
            let mask_values = file.tensor_shaped("categorical_mask", 1, N_FEATURES)?;
            let mut categorical_mask = [false; N_FEATURES];
            for (m, v) in categorical_mask.iter_mut().zip(mask_values) {
                *m = match v {
                    0.0 => false,
                    1.0 => true,
                    _ => return Err(format_err(0, "categorical mask must be 0 or 1")),
                };
            }
            let mut columns = Vec::with_capacity(N_FEATURES);
            for (c, &categorical) in categorical_mask.iter().enumerate() {
                if categorical {
                    let t = file.tensor(&format!("encoding.{c}"))?;
                    let categories = file
                        .tensor_shaped(&format!("encoding.{c}"), 1, t.cols)?
                        .to_vec();
                    if categories.is_empty() || categories.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(format_err(
                            0,
                            format!("categories of column {c} must be strictly increasing"),
                        ));
                    }
                    columns.push(ColumnEncoding::Categorical { categories });
                } else {
                    columns.push(ColumnEncoding::Numeric);
                }
            }
            let encoding = DummyEncoding { columns };
            let weights = file
                .tensor_shaped("dv.weight", 1, encoding.width())?
                .to_vec();
            let bias = file.tensor_shaped("dv.bias", 1, 1)?[0];
            Ok(AnyModel::DvLogistic(DvLogisticModel {
                preprocessor,
                categorical_mask,
                encoding,
                weights,
                bias,
            }))
        }
        ModelKind::PsoElm => {
            let hidden: usize = file.meta_parse("hidden")?;
            if hidden == 0 || hidden > MAX_TENSOR_LEN / N_FEATURES {
                return Err(format_err(0, "hidden size out of range"));
            }
            Ok(AnyModel::Elm(ElmModel {
                preprocessor,
                hidden_size: hidden,
                hidden_weights: file
                    .tensor_shaped("elm.hidden_weight", hidden, N_FEATURES)?
                    .to_vec(),
                hidden_biases: file.tensor_shaped("elm.hidden_bias", hidden, 1)?.to_vec(),
                output_weights: file.tensor_shaped("elm.output_weight", hidden, 2)?.to_vec(),
            }))
        }
    }
}

pub fn model_to_text(model: &AnyModel) -> String {
    to_file(model).to_text()
}

pub fn model_from_text(text: &str) -> Result<AnyModel> {
    from_file(&TensorFile::parse(text)?)
}

/// Key/value pairs of a model file's meta lines, for display.
pub fn model_meta(text: &str) -> Result<BTreeMap<String, String>> {
    Ok(TensorFile::parse(text)?.meta.into_iter().collect())
}
