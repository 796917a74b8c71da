//! Training and evaluation engine for heart-disease risk classification with
//! a multi-width one-dimensional convolutional network, plus dummy-coded
//! logistic regression and PSO-tuned extreme learning machine baselines.

pub mod baselines;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod model;
pub mod nn;
pub mod persist;
pub mod synthetic;
pub mod train;

pub use error::{Error, Result};
