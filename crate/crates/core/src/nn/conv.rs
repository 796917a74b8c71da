use crate::error::{Error, Result};

/// One-row convolution kernel of odd width.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvKernel {
    weights: Vec<f64>,
    bias: f64,
}

impl ConvKernel {
    pub fn new(weights: Vec<f64>, bias: f64) -> Result<Self> {
        let width = weights.len();
        if width == 0 || width.is_multiple_of(2) {
            return Err(Error::InvalidKernel(format!(
                "width must be odd and positive, got {width}"
            )));
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidKernel("non-finite parameter".into()));
        }
        Ok(Self { weights, bias })
    }

    pub fn width(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }
}

/// The zero-padded input slice seen by the kernel when centred on `start_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvWindow {
    pub start_index: usize,
    pub values: Vec<f64>,
}

impl ConvWindow {
    pub fn extract(input: &[f64], start_index: usize, width: usize) -> Self {
        let offset = (width - 1) / 2;
        let values = (0..width)
            .map(|s| padded(input, start_index + s, offset))
            .collect();
        Self {
            start_index,
            values,
        }
    }

    pub fn dot(&self, kernel: &ConvKernel) -> f64 {
        self.values
            .iter()
            .zip(kernel.weights())
            .map(|(x, w)| x * w)
            .sum::<f64>()
            + kernel.bias()
    }
}

#[inline]
fn padded(input: &[f64], shifted: usize, offset: usize) -> f64 {
    shifted
        .checked_sub(offset)
        .and_then(|j| input.get(j))
        .copied()
        .unwrap_or(0.0)
}

/// Stride-1 convolution with zero same-padding: the output has the input's length.
pub fn conv_forward(input: &[f64], kernel: &ConvKernel) -> Vec<f64> {
    let mut out = vec![0.0; input.len()];
    conv_same(input, kernel.weights(), kernel.bias(), &mut out);
    out
}

pub(crate) fn conv_same(input: &[f64], weights: &[f64], bias: f64, out: &mut [f64]) {
    let offset = (weights.len() - 1) / 2;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (s, w) in weights.iter().enumerate() {
            acc += w * padded(input, i + s, offset);
        }
        *o = acc + bias;
    }
}

/// Accumulates weight and bias gradients given the gradient at the pre-activation.
pub(crate) fn conv_backward(
    input: &[f64],
    grad_out: &[f64],
    grad_weights: &mut [f64],
    grad_bias: &mut f64,
) {
    let offset = (grad_weights.len() - 1) / 2;
    for (i, g) in grad_out.iter().enumerate() {
        if *g == 0.0 {
            continue;
        }
        for (s, gw) in grad_weights.iter_mut().enumerate() {
            *gw += g * padded(input, i + s, offset);
        }
        *grad_bias += g;
    }
}
