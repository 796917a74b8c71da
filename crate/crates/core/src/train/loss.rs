use crate::data::{Label, Sample};
use crate::error::{Error, Result};
use crate::nn::{argmax, forward_vector, Mode, ModelParams};

/// Floor applied to the probability inside each logarithm.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

/// Binary cross-entropy `-b ln(a) - (1 - b) ln(1 - a)` of the positive-class
/// probability `alpha` against `label`. Only the term selected by the label
/// contributes, and its log argument is floored at [`PROBABILITY_CLAMP`], so a
/// perfect prediction scores exactly 0 and a certain miss stays finite.
pub fn cross_entropy(alpha: f64, label: Label) -> f64 {
    let p = match label {
        Label::Present => alpha,
        Label::Absent => 1.0 - alpha,
    };
    let loss = 0.0 - p.clamp(PROBABILITY_CLAMP, 1.0).ln();
    // NaN passes through so divergence is visible
    if p.is_nan() {
        f64::NAN
    } else {
        loss
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchStats {
    pub loss: f64,
    pub accuracy: f64,
}

/// Mean loss and accuracy of an inference pass over `batch`.
pub fn batch_loss(params: &ModelParams, batch: &[Sample]) -> Result<BatchStats> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut loss = 0.0;
    let mut correct = 0usize;
    for s in batch {
        let out = forward_vector(s.input.as_slice(), params, Mode::Infer)?;
        loss += cross_entropy(out.probabilities[1], s.label);
        if argmax(&out.probabilities) == s.label.index() {
            correct += 1;
        }
    }
    let n = batch.len() as f64;
    Ok(BatchStats {
        loss: loss / n,
        accuracy: correct as f64 / n,
    })
}
