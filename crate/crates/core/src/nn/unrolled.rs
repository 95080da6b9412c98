use ndarray::{concatenate, s, Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dense::{Act, Cache, Dense, Gradient};
use super::loss::{output_delta, Loss};
use super::{Model, NnError};

/// Weight variance is `INIT_SCALE / fan_in` in every layer.
const INIT_SCALE: f64 = 1.5;

/// Shape of a trainable DFA-unrolled network.
#[derive(Debug, Clone, PartialEq)]
pub struct UnrolledConfig {
    /// Number of input blocks, one transition module per block.
    pub length: usize,
    pub alphabet_size: usize,
    /// Width of the carried state vector.
    pub state_dim: usize,
    /// Hidden ReLU width inside each transition module; `None` makes each
    /// module a single layer `[h; u] -> h`.
    pub hidden_width: Option<usize>,
    /// Activation on each module's state output.
    pub state_act: Act,
    /// The carried state starts as `e_{initial_state}`.
    pub initial_state: usize,
    /// Layers applied to the final state, as `(outputs, activation)`.
    pub head: Vec<(usize, Act)>,
}

/// `T` independent transition modules `h_t = g_t([h_{t-1}; u_t])` followed
/// by a head on `h_T`.
///
/// Modules do not share weights. Each step owns one or two consecutive
/// entries of [`Model::layers`]; the head follows.
#[derive(Debug, Clone, PartialEq)]
pub struct UnrolledNet {
    config: UnrolledConfig,
    layers: Vec<Dense>,
}

impl UnrolledNet {
    pub fn new(config: UnrolledConfig, seed: u64) -> Result<Self, NnError> {
        if config.state_dim == 0 || config.alphabet_size == 0 || config.hidden_width == Some(0) {
            return Err(NnError::NoLayers);
        }
        if config.initial_state >= config.state_dim {
            return Err(NnError::InputDim { expected: config.state_dim, found: config.initial_state + 1 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(2 * config.length + config.head.len());
        let carried = config.state_dim + config.alphabet_size;
        for _ in 0..config.length {
            match config.hidden_width {
                Some(hidden) => {
                    layers.push(Dense::init_normal(carried, hidden, Act::Relu, INIT_SCALE, &mut rng));
                    layers.push(Dense::init_normal(hidden, config.state_dim, config.state_act, INIT_SCALE, &mut rng));
                }
                None => layers.push(Dense::init_normal(carried, config.state_dim, config.state_act, INIT_SCALE, &mut rng)),
            }
        }
        let mut width = config.state_dim;
        for &(outputs, act) in &config.head {
            layers.push(Dense::init_normal(width, outputs, act, INIT_SCALE, &mut rng));
            width = outputs;
        }
        Ok(Self { config, layers })
    }

    pub fn config(&self) -> &UnrolledConfig {
        &self.config
    }

    fn layers_per_step(&self) -> usize {
        if self.config.hidden_width.is_some() { 2 } else { 1 }
    }

    fn step(&self, t: usize) -> &[Dense] {
        let per = self.layers_per_step();
        &self.layers[per * t..per * (t + 1)]
    }

    fn initial(&self, rows: usize) -> Array2<f64> {
        let mut h = Array2::zeros((rows, self.config.state_dim));
        h.column_mut(self.config.initial_state).fill(1.0);
        h
    }

    fn block<'a>(&self, inputs: &'a ArrayView2<'_, f64>, t: usize) -> ArrayView2<'a, f64> {
        let k = self.config.alphabet_size;
        inputs.slice(s![.., t * k..(t + 1) * k])
    }

    /// Output of the first `head_layers` head layers (0 gives the final carried state).
    pub fn embed(&self, inputs: ArrayView2<'_, f64>, head_layers: usize) -> Result<Array2<f64>, NnError> {
        self.check_input(inputs)?;
        let mut h = self.initial(inputs.nrows());
        for t in 0..self.config.length {
            h = concatenate(Axis(1), &[h.view(), self.block(&inputs, t)]).expect("rows agree");
            for layer in self.step(t) {
                h = layer.forward(h.view());
            }
        }
        for layer in self.head().iter().take(head_layers) {
            h = layer.forward(h.view());
        }
        Ok(h)
    }

    fn head(&self) -> &[Dense] {
        &self.layers[self.layers_per_step() * self.config.length..]
    }
}

impl Model for UnrolledNet {
    fn layers(&self) -> &[Dense] {
        &self.layers
    }

    fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    fn input_dim(&self) -> usize {
        self.config.length * self.config.alphabet_size
    }

    fn predict(&self, inputs: ArrayView2<'_, f64>) -> Result<Array2<f64>, NnError> {
        self.embed(inputs, self.config.head.len())
    }

    fn loss_and_gradients(
        &self,
        inputs: ArrayView2<'_, f64>,
        labels: ArrayView2<'_, f64>,
        loss: Loss,
    ) -> Result<(f64, Vec<Gradient>), NnError> {
        self.check_input(inputs)?;
        if inputs.nrows() == 0 {
            return Err(NnError::EmptyBatch);
        }
        if self.layers.is_empty() {
            return Err(NnError::NoLayers);
        }
        let per = self.layers_per_step();
        let step_layers = per * self.config.length;
        let state_dim = self.config.state_dim;

        let mut caches: Vec<Cache> = Vec::with_capacity(self.layers.len());
        let mut h = self.initial(inputs.nrows());
        for t in 0..self.config.length {
            h = concatenate(Axis(1), &[h.view(), self.block(&inputs, t)]).expect("rows agree");
            for layer in self.step(t) {
                let cache = layer.forward_cached(h);
                h = cache.output.clone();
                caches.push(cache);
            }
        }
        for layer in self.head() {
            let cache = layer.forward_cached(h);
            h = cache.output.clone();
            caches.push(cache);
        }

        let last = caches.last().expect("non-empty");
        let tail = self.layers.last().expect("non-empty");
        let (value, d_z) = output_delta(loss, tail.act, &last.z, &last.output, &labels.to_owned())?;

        let mut grads: Vec<Option<Gradient>> = vec![None; self.layers.len()];
        let top = self.layers.len() - 1;
        let (mut d_out, grad) = tail.backward_from_z(&caches[top], d_z);
        grads[top] = Some(grad);
        for index in (0..top).rev() {
            let (d_input, grad) = self.layers[index].backward(&caches[index], d_out);
            grads[index] = Some(grad);
            // the input to a step's first layer is [h_{t-1}; u_t]; only h flows further back
            d_out = if index < step_layers && index % per == 0 {
                d_input.slice(s![.., ..state_dim]).to_owned()
            } else {
                d_input
            };
        }
        Ok((value, grads.into_iter().map(|g| g.expect("every layer visited")).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn config(length: usize) -> UnrolledConfig {
        UnrolledConfig {
            length,
            alphabet_size: 2,
            state_dim: 3,
            hidden_width: Some(4),
            state_act: Act::Relu,
            initial_state: 0,
            head: vec![(1, Act::Sigmoid)],
        }
    }

    #[test]
    fn layer_layout() {
        let net = UnrolledNet::new(config(3), 0).unwrap();
        assert_eq!(net.layers().len(), 7);
        assert_eq!(net.input_dim(), 6);
        assert_eq!(net.layers()[0].inputs(), 5);
        assert_eq!(net.layers()[6].outputs(), 1);
    }

    #[test]
    fn zero_length_reads_initial_state() {
        let net = UnrolledNet::new(config(0), 0).unwrap();
        let x = Array2::zeros((2, 0));
        assert_eq!(net.embed(x.view(), 0).unwrap(), array![[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
    }

    #[test]
    fn predict_matches_embed_through_head() {
        let net = UnrolledNet::new(config(2), 9).unwrap();
        let x = array![[1.0, 0.0, 0.0, 1.0]];
        let state = net.embed(x.view(), 0).unwrap();
        let expected = net.layers()[4].forward(state.view());
        assert_eq!(net.predict(x.view()).unwrap(), expected);
    }
}
