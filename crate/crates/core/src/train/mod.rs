//! Cross-entropy loss, Adam, the mini-batch training loop and prediction.

mod adam;
mod loss;

pub use adam::{adam_step, Adam, AdamState};
pub use loss::{batch_loss, cross_entropy, BatchStats, PROBABILITY_CLAMP};

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, ImputationPolicy, Label, Preprocessor, Sample};
use crate::error::{Error, Result};
use crate::nn::{
    argmax, forward_vector, model_backward, Architecture, Dropout, Mode, ModelParams, PoolMode,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub dropout_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub kernels_per_width: usize,
    pub pool: PoolMode,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            dropout_rate: 0.5,
            epochs: 50,
            batch_size: 16,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            kernels_per_width: 8,
            pool: PoolMode::default(),
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidHyperparams(msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return fail(format!(
                "dropout rate must be in [0, 1), got {}",
                self.dropout_rate
            ));
        }
        for (name, b) in [("beta1", self.adam_beta1), ("beta2", self.adam_beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return fail(format!("{name} must be in (0, 1), got {b}"));
            }
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return fail(format!(
                "adam epsilon must be positive, got {}",
                self.adam_epsilon
            ));
        }
        if self.batch_size == 0 {
            return fail("batch size must be positive".into());
        }
        self.architecture().validate()
    }

    pub fn architecture(&self) -> Architecture {
        Architecture::new(self.kernels_per_width, self.pool)
    }

    /// `key=value` pairs, in a fixed order.
    pub fn describe(&self) -> String {
        format!(
            "lr={} dropout={} epochs={} batch={} beta1={} beta2={} eps={} kernels={} pool={} seed={}",
            self.learning_rate,
            self.dropout_rate,
            self.epochs,
            self.batch_size,
            self.adam_beta1,
            self.adam_beta2,
            self.adam_epsilon,
            self.kernels_per_width,
            self.pool,
            self.seed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub train_loss: f64,
    pub val_accuracy: Option<f64>,
    pub val_loss: Option<f64>,
}

/// Per-epoch accuracy and loss, measured by a full inference pass after each epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingCurve {
    pub epochs: Vec<EpochRecord>,
}

impl TrainingCurve {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_acc,train_loss,val_acc,val_loss\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        for e in &self.epochs {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{},{}",
                e.epoch,
                e.train_accuracy,
                e.train_loss,
                opt(e.val_accuracy),
                opt(e.val_loss)
            );
        }
        out
    }
}

fn check_classes(samples: &[Sample]) -> Result<()> {
    let has = |l: Label| samples.iter().any(|s| s.label == l);
    if has(Label::Absent) && has(Label::Present) {
        Ok(())
    } else {
        Err(Error::SingleClassData)
    }
}

/// Trains the network on already standardized samples.
///
/// Each epoch shuffles the sample order (Fisher-Yates driven by a ChaCha8
/// stream seeded from `hyper.seed`), walks mini-batches of `batch_size` with
/// the last partial batch kept, averages per-sample gradients in batch order
/// and applies one Adam step per batch. Every random draw (initialization,
/// shuffles, dropout masks) comes from that one stream, so equal inputs give
/// bit-identical results.
pub fn train_network(
    samples: &[Sample],
    hyper: &Hyperparams,
    validation: Option<&[Sample]>,
) -> Result<(ModelParams, TrainingCurve)> {
    hyper.validate()?;
    check_classes(samples)?;
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut params = ModelParams::init(hyper.architecture(), &mut rng)?;
    let mut state = AdamState::for_params(&params);
    let optimizer = Adam::from_hyper(hyper);
    let mut curve = TrainingCurve::default();
    let mut order: Vec<usize> = (0..samples.len()).collect();

    for epoch in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for (b, batch) in order.chunks(hyper.batch_size).enumerate() {
            let mut grad_sum = vec![0.0; params.len()];
            let mut loss_sum = 0.0;
            for &i in batch {
                let s = &samples[i];
                let dropout = Dropout {
                    rate: hyper.dropout_rate,
                    seed: rng.gen(),
                };
                let out = forward_vector(s.input.as_slice(), &params, Mode::Train(dropout))?;
                loss_sum += cross_entropy(out.probabilities[1], s.label);
                let cache = out.cache.as_ref().expect("train mode fills the cache");
                let g = model_backward(cache, &params, s.label)?;
                for (acc, v) in grad_sum.iter_mut().zip(g.as_slice()) {
                    *acc += v;
                }
            }
            let n = batch.len() as f64;
            grad_sum.iter_mut().for_each(|g| *g /= n);
            if !loss_sum.is_finite() || grad_sum.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss {
                    epoch: epoch + 1,
                    batch: b + 1,
                });
            }
            optimizer.step(params.as_mut_slice(), &grad_sum, &mut state)?;
        }

        let train = batch_loss(&params, samples)?;
        let val = validation
            .filter(|v| !v.is_empty())
            .map(|v| batch_loss(&params, v))
            .transpose()?;
        if !train.loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch: epoch + 1,
                batch: 0,
            });
        }
        curve.epochs.push(EpochRecord {
            epoch: epoch + 1,
            train_accuracy: train.accuracy,
            train_loss: train.loss,
            val_accuracy: val.map(|v| v.accuracy),
            val_loss: val.map(|v| v.loss),
        });
    }
    Ok((params, curve))
}

/// The network together with the preprocessing it was trained behind.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub params: ModelParams,
    pub preprocessor: Preprocessor,
    pub hyper: Hyperparams,
    pub curve: TrainingCurve,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub class: Label,
    pub probabilities: [f64; 2],
}

impl Prediction {
    /// Argmax with exact ties resolved to class 0.
    pub fn from_probabilities(probabilities: [f64; 2]) -> Self {
        let class = Label::from_index(argmax(&probabilities)).unwrap_or(Label::Absent);
        Self {
            class,
            probabilities,
        }
    }
}

/// Fits imputation and scaling on `data`, then trains the network on the result.
pub fn train(
    data: &Dataset,
    hyper: &Hyperparams,
    validation: Option<&Dataset>,
) -> Result<TrainedModel> {
    hyper.validate()?;
    if !data.has_both_classes() {
        return Err(Error::SingleClassData);
    }
    let preprocessor = Preprocessor::fit(data, ImputationPolicy::default())?;
    let samples = preprocessor.transform(data)?;
    let val = validation.map(|v| preprocessor.transform(v)).transpose()?;
    let (params, curve) = train_network(&samples, hyper, val.as_deref())?;
    Ok(TrainedModel {
        params,
        preprocessor,
        hyper: hyper.clone(),
        curve,
    })
}

impl TrainedModel {
    /// Scores a raw record; missing values are filled from the training statistics.
    pub fn predict(&self, features: &[Option<f64>]) -> Result<Prediction> {
        let x = self.preprocessor.transform_features(features)?;
        let out = forward_vector(&x, &self.params, Mode::Infer)?;
        Ok(Prediction::from_probabilities([
            out.probabilities[0],
            out.probabilities[1],
        ]))
    }
}

pub fn predict(model: &TrainedModel, features: &[Option<f64>]) -> Result<Prediction> {
    model.predict(features)
}
