//! Dense neural runtime: evaluation of compiled networks and a small
//! reverse-mode trainer (full-batch Adam) for the experiment models.

mod adam;
mod dense;
mod loss;
mod mlp;
mod unrolled;

use ndarray::{Array2, ArrayView2};
use thiserror::Error;

pub use adam::{AdamConfig, AdamState};
pub use dense::{Act, Dense, Gradient};
pub use loss::{argmax_rows, Loss};
pub use mlp::{init_mlp, TrainableMlp};
pub use unrolled::{UnrolledConfig, UnrolledNet};

use crate::network::{NetworkError, NetworkSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NnError {
    #[error("model needs at least one layer")]
    NoLayers,
    #[error("{layers} layers but {activations} activations")]
    ActivationCount { layers: usize, activations: usize },
    #[error("input has {found} features, model expects {expected}")]
    InputDim { expected: usize, found: usize },
    #[error("outputs have shape {outputs:?} but labels have shape {labels:?}")]
    LabelShape { outputs: (usize, usize), labels: (usize, usize) },
    #[error("batch is empty")]
    EmptyBatch,
    #[error("loss {loss} cannot be used with a {act:?} output layer")]
    LossActivation { loss: Loss, act: Act },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// A trainable model made of [`Dense`] layers.
pub trait Model {
    fn layers(&self) -> &[Dense];

    fn layers_mut(&mut self) -> &mut [Dense];

    fn input_dim(&self) -> usize;

    /// Batched forward pass, one input per row.
    fn predict(&self, inputs: ArrayView2<'_, f64>) -> Result<Array2<f64>, NnError>;

    /// Mean loss over the batch and exact gradients, one per layer.
    fn loss_and_gradients(
        &self,
        inputs: ArrayView2<'_, f64>,
        labels: ArrayView2<'_, f64>,
        loss: Loss,
    ) -> Result<(f64, Vec<Gradient>), NnError>;

    fn parameter_count(&self) -> usize {
        self.layers().iter().map(Dense::parameter_count).sum()
    }

    fn check_input(&self, inputs: ArrayView2<'_, f64>) -> Result<(), NnError> {
        if inputs.ncols() == self.input_dim() {
            Ok(())
        } else {
            Err(NnError::InputDim { expected: self.input_dim(), found: inputs.ncols() })
        }
    }
}

/// Anything that maps an input vector to an output vector.
pub trait Forward {
    fn forward_one(&self, input: &[f64]) -> Result<Vec<f64>, NnError>;
}

impl Forward for NetworkSpec {
    fn forward_one(&self, input: &[f64]) -> Result<Vec<f64>, NnError> {
        Ok(self.forward(input)?)
    }
}

impl<M: Model> Forward for M {
    fn forward_one(&self, input: &[f64]) -> Result<Vec<f64>, NnError> {
        let row = ArrayView2::from_shape((1, input.len()), input).expect("row vector");
        Ok(self.predict(row)?.into_raw_vec_and_offset().0)
    }
}

pub fn forward(net: &impl Forward, input: &[f64]) -> Result<Vec<f64>, NnError> {
    net.forward_one(input)
}

/// Rounds every output to 0 or 1; exactly 0.5 rounds up.
pub fn binarized_forward(net: &impl Forward, input: &[f64]) -> Result<Vec<f64>, NnError> {
    Ok(net.forward_one(input)?.into_iter().map(f64::round).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub adam: AdamConfig,
    pub loss: Loss,
}

impl TrainConfig {
    pub fn new(loss: Loss) -> Self {
        Self { epochs: 200, adam: AdamConfig::default(), loss }
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn with_learning_rate(mut self, learning_rate: f64) -> Self {
        self.adam.learning_rate = learning_rate;
        self
    }
}

/// Full-batch Adam. Returns the loss measured before each epoch's update.
///
/// `observer` sees `(epoch, loss)` for every epoch.
pub fn train<M: Model>(
    model: &mut M,
    inputs: ArrayView2<'_, f64>,
    labels: ArrayView2<'_, f64>,
    config: &TrainConfig,
    mut observer: Option<&mut dyn FnMut(usize, f64)>,
) -> Result<Vec<f64>, NnError> {
    if inputs.nrows() == 0 {
        return Err(NnError::EmptyBatch);
    }
    let mut adam = AdamState::new(config.adam, model.layers());
    let mut trace = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let (loss, grads) = model.loss_and_gradients(inputs, labels, config.loss)?;
        adam.step(model.layers_mut(), &grads);
        if let Some(observe) = observer.as_deref_mut() {
            observe(epoch, loss);
        }
        trace.push(loss);
    }
    Ok(trace)
}
