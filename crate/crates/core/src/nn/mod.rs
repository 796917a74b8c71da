//! Multi-width 1D convolutional network: layers, forward pass and exact gradients.

mod conv;
mod model;
mod ops;

pub use conv::{conv_forward, ConvKernel, ConvWindow};
pub use model::{
    model_backward, model_forward, Architecture, Dropout, ForwardCache, ForwardOutput, Gradients,
    Mode, ModelParams, TensorSpec, N_CLASSES,
};
pub use ops::{argmax, dense_forward, max_pool, relu, softmax, DenseLayer, PoolMode, Pooled};

pub(crate) use model::forward_vector;
