use std::hash::{DefaultHasher, Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::conv::{conv_backward, conv_same, ConvKernel};
use super::ops::{dense_apply, max_pool, softmax, DenseLayer, PoolMode};
use crate::data::{FeatureMatrix, Label, N_FEATURES};
use crate::error::{Error, Result};

pub const N_CLASSES: usize = 2;

/// Network shape: one bank of `kernels_per_width` kernels for each width,
/// each producing a same-length feature map that is max-pooled and fed to a
/// dense softmax head.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Architecture {
    pub widths: Vec<usize>,
    pub kernels_per_width: usize,
    pub pool: PoolMode,
    pub input_len: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Self::new(8, PoolMode::default())
    }
}

impl Architecture {
    pub fn new(kernels_per_width: usize, pool: PoolMode) -> Self {
        Self {
            widths: vec![1, 3, 5],
            kernels_per_width,
            pool,
            input_len: N_FEATURES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kernels_per_width == 0 {
            return Err(Error::InvalidHyperparams(
                "kernels per width must be positive".into(),
            ));
        }
        if self.widths.is_empty() || self.widths.iter().any(|w| w % 2 == 0) {
            return Err(Error::InvalidKernel(format!(
                "widths must be odd, got {:?}",
                self.widths
            )));
        }
        if self.input_len == 0 {
            return Err(Error::EmptyMap);
        }
        self.pool.validate()?;
        Ok(())
    }

    pub fn n_maps(&self) -> usize {
        self.widths.len() * self.kernels_per_width
    }

    pub fn pooled_per_map(&self) -> usize {
        self.pool.output_len(self.input_len)
    }

    pub fn dense_inputs(&self) -> usize {
        self.n_maps() * self.pooled_per_map()
    }

    /// Named tensors in storage order.
    pub fn tensors(&self) -> Vec<TensorSpec> {
        let mut specs = Vec::new();
        let mut offset = 0;
        let mut push = |name: String, rows: usize, cols: usize| {
            specs.push(TensorSpec {
                name,
                rows,
                cols,
                offset,
            });
            offset += rows * cols;
        };
        for &w in &self.widths {
            push(format!("conv{w}.weight"), self.kernels_per_width, w);
            push(format!("conv{w}.bias"), self.kernels_per_width, 1);
        }
        push("dense.weight".into(), N_CLASSES, self.dense_inputs());
        push("dense.bias".into(), N_CLASSES, 1);
        specs
    }

    pub fn n_params(&self) -> usize {
        self.tensors().last().map_or(0, |t| t.offset + t.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// All trainable values in one flat buffer laid out by [`Architecture::tensors`].
/// Gradients and optimizer moments use the same type.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    arch: Architecture,
    data: Vec<f64>,
}

pub type Gradients = ModelParams;

impl ModelParams {
    pub fn zeros(arch: Architecture) -> Result<Self> {
        arch.validate()?;
        let data = vec![0.0; arch.n_params()];
        Ok(Self { arch, data })
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init(arch: Architecture, rng: &mut impl Rng) -> Result<Self> {
        let mut params = Self::zeros(arch)?;
        let k = params.arch.kernels_per_width;
        let fans: Vec<(usize, usize)> = params
            .arch
            .widths
            .iter()
            .map(|&w| (w, w * k))
            .chain(std::iter::once((params.arch.dense_inputs(), N_CLASSES)))
            .collect();
        let weight_tensors: Vec<TensorSpec> = params
            .arch
            .tensors()
            .into_iter()
            .filter(|t| t.name.ends_with(".weight"))
            .collect();
        for (spec, (fan_in, fan_out)) in weight_tensors.iter().zip(fans) {
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for v in &mut params.data[spec.range()] {
                *v = rng.gen_range(-limit..=limit);
            }
        }
        Ok(params)
    }

    pub fn from_flat(arch: Architecture, data: Vec<f64>) -> Result<Self> {
        arch.validate()?;
        if data.len() != arch.n_params() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} parameters, found {}",
                arch.n_params(),
                data.len()
            )));
        }
        Ok(Self { arch, data })
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn same_shape(&self, other: &ModelParams) -> bool {
        self.arch == other.arch && self.data.len() == other.data.len()
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            arch: self.arch.clone(),
            data: vec![0.0; self.data.len()],
        }
    }

    pub fn tensor(&self, name: &str) -> Option<&[f64]> {
        self.arch
            .tensors()
            .into_iter()
            .find(|t| t.name == name)
            .map(|t| &self.data[t.range()])
    }

    /// Offsets of (weights, biases) for bank `b`.
    fn bank_offsets(&self, b: usize) -> (usize, usize) {
        let k = self.arch.kernels_per_width;
        let before: usize = self.arch.widths[..b].iter().map(|w| k * w + k).sum();
        (before, before + k * self.arch.widths[b])
    }

    fn dense_offsets(&self) -> (usize, usize) {
        let w = self
            .arch
            .widths
            .iter()
            .map(|w| self.arch.kernels_per_width * (w + 1))
            .sum();
        (w, w + N_CLASSES * self.arch.dense_inputs())
    }

    fn kernel_slices(&self, b: usize, k: usize) -> (&[f64], f64) {
        let width = self.arch.widths[b];
        let (wo, bo) = self.bank_offsets(b);
        (
            &self.data[wo + k * width..wo + (k + 1) * width],
            self.data[bo + k],
        )
    }

    pub fn kernel(&self, bank: usize, index: usize) -> Result<ConvKernel> {
        let (w, b) = self.kernel_slices(bank, index);
        ConvKernel::new(w.to_vec(), b)
    }

    pub fn dense(&self) -> DenseLayer {
        let (wo, bo) = self.dense_offsets();
        DenseLayer {
            weights: self.data[wo..bo].to_vec(),
            biases: self.data[bo..bo + N_CLASSES].to_vec(),
            inputs: self.arch.dense_inputs(),
        }
    }

    /// Content hash used to detect a cache/parameter mismatch.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.arch.hash(&mut h);
        for v in &self.data {
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dropout {
    pub rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Infer,
    Train(Dropout),
}

/// Intermediate values of one train-mode forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    fingerprint: u64,
    input: Vec<f64>,
    /// Pre-activation of every feature map, bank-major.
    pre_activations: Vec<Vec<f64>>,
    /// Per map, the input position of each pooled value.
    pool_indices: Vec<Vec<usize>>,
    /// Inverted-dropout multipliers on the pooled vector (0 or 1/(1-rate)).
    dropout_scale: Vec<f64>,
    dense_input: Vec<f64>,
    probabilities: Vec<f64>,
}

impl ForwardCache {
    pub fn pre_activations(&self) -> &[Vec<f64>] {
        &self.pre_activations
    }

    pub fn pool_indices(&self) -> &[Vec<usize>] {
        &self.pool_indices
    }

    pub fn dropout_scale(&self) -> &[f64] {
        &self.dropout_scale
    }

    pub fn dense_input(&self) -> &[f64] {
        &self.dense_input
    }
}

#[derive(Debug, Clone)]
pub struct ForwardOutput {
    pub logits: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub cache: Option<ForwardCache>,
}

/// conv -> ReLU -> max-pool for every kernel, concatenated bank by bank
/// (width order, then kernel order), then dropout (train only), dense and softmax.
pub fn model_forward(
    input: &FeatureMatrix,
    params: &ModelParams,
    mode: Mode,
) -> Result<ForwardOutput> {
    if input.cols() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: input.cols(),
        });
    }
    forward_vector(input.as_slice(), params, mode)
}

pub(crate) fn forward_vector(x: &[f64], params: &ModelParams, mode: Mode) -> Result<ForwardOutput> {
    let arch = &params.arch;
    if x.len() != arch.input_len {
        return Err(Error::DimensionMismatch {
            expected: arch.input_len,
            found: x.len(),
        });
    }
    let train = matches!(mode, Mode::Train(_));
    let mut pre_activations = Vec::with_capacity(if train { arch.n_maps() } else { 0 });
    let mut pool_indices = Vec::with_capacity(if train { arch.n_maps() } else { 0 });
    let mut pooled = Vec::with_capacity(arch.dense_inputs());
    let mut pre = vec![0.0; x.len()];

    for b in 0..arch.widths.len() {
        for k in 0..arch.kernels_per_width {
            let (w, bias) = params.kernel_slices(b, k);
            conv_same(x, w, bias, &mut pre);
            let act: Vec<f64> = pre.iter().map(|v| v.max(0.0)).collect();
            let p = max_pool(&act, arch.pool)?;
            pooled.extend_from_slice(&p.values);
            if train {
                pre_activations.push(pre.clone());
                pool_indices.push(p.indices);
            }
        }
    }

    let dropout_scale = match mode {
        Mode::Train(d) => dropout_mask(pooled.len(), d)?,
        Mode::Infer => Vec::new(),
    };
    let dense_input: Vec<f64> = if train {
        pooled
            .iter()
            .zip(&dropout_scale)
            .map(|(v, s)| v * s)
            .collect()
    } else {
        pooled
    };

    let (wo, bo) = params.dense_offsets();
    let logits = dense_apply(
        &params.data[wo..bo],
        &params.data[bo..bo + N_CLASSES],
        &dense_input,
    );
    let probabilities = softmax(&logits);

    let cache = train.then(|| ForwardCache {
        fingerprint: params.fingerprint(),
        input: x.to_vec(),
        pre_activations,
        pool_indices,
        dropout_scale,
        dense_input,
        probabilities: probabilities.clone(),
    });
    Ok(ForwardOutput {
        logits,
        probabilities,
        cache,
    })
}

fn dropout_mask(len: usize, dropout: Dropout) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&dropout.rate) {
        return Err(Error::InvalidHyperparams(format!(
            "dropout rate must be in [0, 1), got {}",
            dropout.rate
        )));
    }
    if dropout.rate == 0.0 {
        return Ok(vec![1.0; len]);
    }
    let keep = 1.0 / (1.0 - dropout.rate);
    let mut rng = ChaCha8Rng::seed_from_u64(dropout.seed);
    Ok((0..len)
        .map(|_| {
            if rng.gen::<f64>() < dropout.rate {
                0.0
            } else {
                keep
            }
        })
        .collect())
}

/// Gradient of the cross-entropy loss `-ln p[label]` with respect to every parameter.
pub fn model_backward(
    cache: &ForwardCache,
    params: &ModelParams,
    label: Label,
) -> Result<Gradients> {
    if cache.fingerprint != params.fingerprint() {
        return Err(Error::StaleCache);
    }
    let arch = &params.arch;
    let mut grads = params.zeros_like();

    let mut d_logits = cache.probabilities.clone();
    d_logits[label.index()] -= 1.0;

    let n_in = arch.dense_inputs();
    let (wo, bo) = params.dense_offsets();
    let mut d_pooled = vec![0.0; n_in];
    for (m, &g) in d_logits.iter().enumerate() {
        grads.data[bo + m] = g;
        let row = wo + m * n_in;
        for (i, d) in d_pooled.iter_mut().enumerate() {
            grads.data[row + i] = g * cache.dense_input[i];
            *d += params.data[row + i] * g;
        }
    }
    for (d, s) in d_pooled.iter_mut().zip(&cache.dropout_scale) {
        *d *= s;
    }

    let per_map = arch.pooled_per_map();
    let mut d_pre = vec![0.0; arch.input_len];
    for b in 0..arch.widths.len() {
        let width = arch.widths[b];
        let (gwo, gbo) = params.bank_offsets(b);
        for k in 0..arch.kernels_per_width {
            let map = b * arch.kernels_per_width + k;
            let pre = &cache.pre_activations[map];
            d_pre.iter_mut().for_each(|v| *v = 0.0);
            for (j, &idx) in cache.pool_indices[map].iter().enumerate() {
                // ReLU gate: zero where the pre-activation was not positive
                if pre[idx] > 0.0 {
                    d_pre[idx] += d_pooled[map * per_map + j];
                }
            }
            let mut gb = 0.0;
            conv_backward(
                &cache.input,
                &d_pre,
                &mut grads.data[gwo + k * width..gwo + (k + 1) * width],
                &mut gb,
            );
            grads.data[gbo + k] = gb;
        }
    }
    Ok(grads)
}
