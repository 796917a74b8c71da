use crate::error::{Error, Result};
use crate::nn::{Gradients, ModelParams};

use super::Hyperparams;

/// First and second moment estimates, one entry per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            first_moment: vec![0.0; len],
            second_moment: vec![0.0; len],
            step_count: 0,
        }
    }

    pub fn for_params(params: &ModelParams) -> Self {
        Self::new(params.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Adam {
    pub fn from_hyper(hyper: &Hyperparams) -> Self {
        Self {
            learning_rate: hyper.learning_rate,
            beta1: hyper.adam_beta1,
            beta2: hyper.adam_beta2,
            epsilon: hyper.adam_epsilon,
        }
    }

    /// One bias-corrected update of `theta` in place.
    pub fn step(&self, theta: &mut [f64], grad: &[f64], state: &mut AdamState) -> Result<()> {
        let n = theta.len();
        if grad.len() != n || state.first_moment.len() != n || state.second_moment.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "parameters {n}, gradients {}, moments {}/{}",
                grad.len(),
                state.first_moment.len(),
                state.second_moment.len()
            )));
        }
        state.step_count += 1;
        let t = state.step_count as i32;
        let correction1 = 1.0 - self.beta1.powi(t);
        let correction2 = 1.0 - self.beta2.powi(t);
        for i in 0..n {
            let g = grad[i];
            let m = self.beta1 * state.first_moment[i] + (1.0 - self.beta1) * g;
            let v = self.beta2 * state.second_moment[i] + (1.0 - self.beta2) * g * g;
            state.first_moment[i] = m;
            state.second_moment[i] = v;
            let m_hat = m / correction1;
            let v_hat = v / correction2;
            theta[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

pub fn adam_step(
    params: &mut ModelParams,
    grads: &Gradients,
    state: &mut AdamState,
    hyper: &Hyperparams,
) -> Result<()> {
    if !params.same_shape(grads) {
        return Err(Error::ShapeMismatch(
            "gradients do not match the model architecture".into(),
        ));
    }
    Adam::from_hyper(hyper).step(params.as_mut_slice(), grads.as_slice(), state)
}
