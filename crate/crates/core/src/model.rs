//! The three model families behind one interface.

use std::fmt;
use std::str::FromStr;

use crate::baselines::{
    dv_logistic_train, pso_elm_train, DvLogisticConfig, DvLogisticModel, ElmModel, PsoConfig,
};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::train::{train, Hyperparams, Prediction, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Cnn,
    DvLogistic,
    PsoElm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::DvLogistic, ModelKind::PsoElm, ModelKind::Cnn];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Cnn => "cnn",
            ModelKind::DvLogistic => "dv-logistic",
            ModelKind::PsoElm => "pso-elm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "cnn" | "1d-cnn" => Ok(ModelKind::Cnn),
            "dv-logistic" | "logistic" => Ok(ModelKind::DvLogistic),
            "pso-elm" | "elm" => Ok(ModelKind::PsoElm),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected cnn, dv-logistic or pso-elm)"
            ))),
        }
    }
}

pub trait Classifier {
    fn predict(&self, features: &[Option<f64>]) -> Result<Prediction>;
}

/// Something that can be fitted on a training partition. Implementations fit
/// any preprocessing they need on `train` alone.
pub trait Learner {
    type Model: Classifier;

    fn name(&self) -> String;
    fn describe(&self) -> String;
    fn fit(&self, train: &Dataset, seed: u64) -> Result<Self::Model>;
}

/// A model family together with its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Cnn(Hyperparams),
    DvLogistic(DvLogisticConfig),
    PsoElm(PsoConfig),
}

impl ModelSpec {
    /// The family with its default configuration.
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Cnn => ModelSpec::Cnn(Hyperparams::default()),
            ModelKind::DvLogistic => ModelSpec::DvLogistic(DvLogisticConfig::default()),
            ModelKind::PsoElm => ModelSpec::PsoElm(PsoConfig::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Cnn(_) => ModelKind::Cnn,
            ModelSpec::DvLogistic(_) => ModelKind::DvLogistic,
            ModelSpec::PsoElm(_) => ModelKind::PsoElm,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Cnn(TrainedModel),
    DvLogistic(DvLogisticModel),
    Elm(ElmModel),
}

impl AnyModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::Cnn(_) => ModelKind::Cnn,
            AnyModel::DvLogistic(_) => ModelKind::DvLogistic,
            AnyModel::Elm(_) => ModelKind::PsoElm,
        }
    }
}

impl Classifier for AnyModel {
    fn predict(&self, features: &[Option<f64>]) -> Result<Prediction> {
        match self {
            AnyModel::Cnn(m) => m.predict(features),
            AnyModel::DvLogistic(m) => m.predict(features),
            AnyModel::Elm(m) => m.predict(features),
        }
    }
}

impl Learner for ModelSpec {
    type Model = AnyModel;

    fn name(&self) -> String {
        self.kind().name().to_string()
    }

    fn describe(&self) -> String {
        match self {
            ModelSpec::Cnn(h) => h.describe(),
            ModelSpec::DvLogistic(c) => format!("lr={} epochs={}", c.learning_rate, c.epochs),
            ModelSpec::PsoElm(c) => format!(
                "hidden={} swarm={} iterations={} w={} c1={} c2={} ridge={} vmax={}",
                c.hidden_size,
                c.swarm_size,
                c.iterations,
                c.inertia,
                c.cognitive,
                c.social,
                c.ridge,
                c.velocity_clamp
            ),
        }
    }

    fn fit(&self, train_data: &Dataset, seed: u64) -> Result<AnyModel> {
        match self {
            ModelSpec::Cnn(h) => {
                let hyper = Hyperparams { seed, ..h.clone() };
                train(train_data, &hyper, None).map(AnyModel::Cnn)
            }
            ModelSpec::DvLogistic(c) => {
                dv_logistic_train(train_data, c, seed).map(AnyModel::DvLogistic)
            }
            ModelSpec::PsoElm(c) => {
                pso_elm_train(train_data, c, seed).map(|f| AnyModel::Elm(f.model))
            }
        }
    }
}
