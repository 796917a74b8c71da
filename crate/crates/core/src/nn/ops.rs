//! Activation, pooling, dense and softmax layers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub fn relu(pre: &[f64]) -> Vec<f64> {
    pre.iter().map(|&v| v.max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolMode {
    /// One maximum per feature map.
    Global,
    /// Maxima over windows of `width` taken every `stride`; a trailing partial window is kept.
    Windowed { width: usize, stride: usize },
}

impl Default for PoolMode {
    /// Non-overlapping pairs, which keeps coarse position information.
    fn default() -> Self {
        PoolMode::Windowed {
            width: 2,
            stride: 2,
        }
    }
}

impl PoolMode {
    pub fn validate(self) -> Result<Self> {
        match self {
            PoolMode::Windowed { width, stride } if width == 0 || stride == 0 => Err(
                Error::InvalidPool("window width and stride must be positive".into()),
            ),
            mode => Ok(mode),
        }
    }

    pub fn output_len(self, len: usize) -> usize {
        match self {
            PoolMode::Global => 1,
            PoolMode::Windowed { width, stride } => {
                if len <= width {
                    1
                } else {
                    // a trailing window must still start inside the map
                    ((len - width).div_ceil(stride) + 1).min((len - 1) / stride + 1)
                }
            }
        }
    }
}

impl fmt::Display for PoolMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoolMode::Global => f.write_str("global"),
            PoolMode::Windowed { width, stride } => write!(f, "windowed:{width}:{stride}"),
        }
    }
}

impl FromStr for PoolMode {
    type Err = Error;

    /// `global` or `windowed:<width>:<stride>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "global" {
            return Ok(PoolMode::Global);
        }
        let bad = || Error::InvalidPool(format!("expected `global` or `windowed:W:S`, got `{s}`"));
        let rest = s.strip_prefix("windowed:").ok_or_else(bad)?;
        let (w, st) = rest.split_once(':').ok_or_else(bad)?;
        PoolMode::Windowed {
            width: w.parse().map_err(|_| bad())?,
            stride: st.parse().map_err(|_| bad())?,
        }
        .validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pooled {
    pub values: Vec<f64>,
    /// Position in the input map of each pooled maximum.
    pub indices: Vec<usize>,
}

/// Max pooling; ties resolve to the lowest index.
pub fn max_pool(map: &[f64], mode: PoolMode) -> Result<Pooled> {
    if map.is_empty() {
        return Err(Error::EmptyMap);
    }
    let mode = mode.validate()?;
    let (width, stride) = match mode {
        PoolMode::Global => (map.len(), map.len()),
        PoolMode::Windowed { width, stride } => (width, stride),
    };
    let n_out = mode.output_len(map.len());
    let mut values = Vec::with_capacity(n_out);
    let mut indices = Vec::with_capacity(n_out);
    for w in 0..n_out {
        let start = w * stride;
        let end = (start + width).min(map.len());
        let mut best = start;
        for i in start + 1..end {
            if map[i] > map[best] {
                best = i;
            }
        }
        values.push(map[best]);
        indices.push(best);
    }
    Ok(Pooled { values, indices })
}

/// Fully connected layer; `weights` is row-major with one row per output neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub inputs: usize,
}

impl DenseLayer {
    pub fn new(weights: Vec<f64>, biases: Vec<f64>, inputs: usize) -> Result<Self> {
        if weights.len() != biases.len() * inputs {
            return Err(Error::DimensionMismatch {
                expected: biases.len() * inputs,
                found: weights.len(),
            });
        }
        Ok(Self {
            weights,
            biases,
            inputs,
        })
    }

    pub fn outputs(&self) -> usize {
        self.biases.len()
    }
}

pub fn dense_forward(input: &[f64], layer: &DenseLayer) -> Result<Vec<f64>> {
    if input.len() != layer.inputs {
        return Err(Error::DimensionMismatch {
            expected: layer.inputs,
            found: input.len(),
        });
    }
    Ok(dense_apply(&layer.weights, &layer.biases, input))
}

pub(crate) fn dense_apply(weights: &[f64], biases: &[f64], input: &[f64]) -> Vec<f64> {
    biases
        .iter()
        .zip(weights.chunks_exact(input.len().max(1)))
        .map(|(b, row)| row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b)
        .collect()
}

/// Normalized exponential with max subtraction.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
