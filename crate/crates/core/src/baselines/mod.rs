//! Comparison models: dummy-coded logistic regression and a swarm-tuned
//! extreme learning machine.

mod elm;
mod logistic;
mod pso;

pub use elm::{
    elm_solve_output, hidden_activations, one_hot, ridge_residual, ElmModel, DEFAULT_RIDGE,
};
pub use logistic::{
    dummy_encode, dv_logistic_train, fit_logistic, ColumnEncoding, DummyEncoding, DvLogisticConfig,
    DvLogisticModel,
};
pub use pso::{pso_elm_train, Particle, PsoConfig, PsoElmFit, PsoState};

use crate::error::Result;
use crate::train::Prediction;

/// Either baseline, for uniform scoring.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineModel {
    DvLogistic(DvLogisticModel),
    Elm(ElmModel),
}

pub fn baseline_predict(model: &BaselineModel, features: &[Option<f64>]) -> Result<Prediction> {
    match model {
        BaselineModel::DvLogistic(m) => m.predict(features),
        BaselineModel::Elm(m) => m.predict(features),
    }
}
