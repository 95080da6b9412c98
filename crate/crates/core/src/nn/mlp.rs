use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dense::{Act, Dense, Gradient};
use super::loss::{output_delta, Loss};
use super::{Model, NnError};
use crate::network::{NetworkMetadata, NetworkSpec};

/// Plain stack of dense layers.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainableMlp {
    layers: Vec<Dense>,
}

/// Seeded MLP with layer sizes `dims` (input first) and one activation per layer.
pub fn init_mlp(dims: &[usize], activations: &[Act], seed: u64) -> Result<TrainableMlp, NnError> {
    if dims.len() < 2 {
        return Err(NnError::NoLayers);
    }
    if activations.len() != dims.len() - 1 {
        return Err(NnError::ActivationCount { layers: dims.len() - 1, activations: activations.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = dims
        .windows(2)
        .zip(activations)
        .map(|(pair, &act)| Dense::init(pair[0], pair[1], act, &mut rng))
        .collect();
    Ok(TrainableMlp { layers })
}

impl TrainableMlp {
    pub fn from_layers(layers: Vec<Dense>) -> Result<Self, NnError> {
        if layers.is_empty() {
            return Err(NnError::NoLayers);
        }
        for pair in layers.windows(2) {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(NnError::InputDim { expected: pair[1].inputs(), found: pair[0].outputs() });
            }
        }
        Ok(Self { layers })
    }

    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs()).chain(self.layers.iter().map(Dense::outputs)).collect()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Dense::outputs)
    }

    /// Frozen copy in the compiled-network IR.
    pub fn to_network_spec(&self) -> NetworkSpec {
        NetworkSpec::new(
            self.input_dim(),
            self.layers.iter().map(Dense::to_layer_spec).collect(),
            NetworkMetadata::default(),
        )
        .expect("trainable layers chain")
    }
}

impl Model for TrainableMlp {
    fn layers(&self) -> &[Dense] {
        &self.layers
    }

    fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    fn predict(&self, inputs: ArrayView2<'_, f64>) -> Result<Array2<f64>, NnError> {
        self.check_input(inputs)?;
        let mut current = inputs.to_owned();
        for layer in &self.layers {
            current = layer.forward(current.view());
        }
        Ok(current)
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
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut current = inputs.to_owned();
        for layer in &self.layers {
            let cache = layer.forward_cached(current);
            current = cache.output.clone();
            caches.push(cache);
        }
        let last = caches.last().expect("at least one layer");
        let tail = self.layers.last().expect("at least one layer");
        let (value, mut d_z) = output_delta(loss, tail.act, &last.z, &last.output, &labels.to_owned())?;

        let mut grads = Vec::with_capacity(self.layers.len());
        for (index, (layer, cache)) in self.layers.iter().zip(&caches).enumerate().rev() {
            let (d_input, grad) = layer.backward_from_z(cache, d_z);
            grads.push(grad);
            if index > 0 {
                let below = &self.layers[index - 1];
                d_z = below.act.backprop(&caches[index - 1].z, &caches[index - 1].output, d_input);
            } else {
                d_z = d_input;
            }
        }
        grads.reverse();
        Ok((value, grads))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn parameter_counts() {
        let small = init_mlp(&[2, 1], &[Act::Sigmoid], 0).unwrap();
        assert_eq!(small.parameter_count(), 3);
        let mlp = init_mlp(&[4, 32, 2], &[Act::Relu, Act::Sigmoid], 0).unwrap();
        assert_eq!(mlp.parameter_count(), 226);
        assert_eq!(mlp.dims(), vec![4, 32, 2]);
    }

    #[test]
    fn initialization_is_seeded() {
        let a = init_mlp(&[3, 5, 1], &[Act::Relu, Act::Identity], 42).unwrap();
        let b = init_mlp(&[3, 5, 1], &[Act::Relu, Act::Identity], 42).unwrap();
        let c = init_mlp(&[3, 5, 1], &[Act::Relu, Act::Identity], 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let limit = (1.0f64 / 3.0).sqrt();
        assert!(a.layers()[0].weights.iter().all(|w| w.abs() <= limit));
        assert!(a.layers().iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn init_validates_shapes() {
        assert_eq!(init_mlp(&[], &[], 0), Err(NnError::NoLayers));
        assert_eq!(init_mlp(&[3], &[], 0), Err(NnError::NoLayers));
        assert!(matches!(init_mlp(&[3, 2], &[], 0), Err(NnError::ActivationCount { .. })));
    }

    #[test]
    fn zero_weight_sigmoid_bce_is_ln2() {
        let mut mlp = init_mlp(&[2, 1], &[Act::Sigmoid], 0).unwrap();
        mlp.layers_mut()[0].weights.fill(0.0);
        let (loss, _) = mlp.loss_and_gradients(array![[1.0, 0.0]].view(), array![[1.0]].view(), Loss::Bce).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_batches() {
        let mlp = init_mlp(&[2, 1], &[Act::Sigmoid], 0).unwrap();
        let empty = Array2::<f64>::zeros((0, 2));
        let no_labels = Array2::<f64>::zeros((0, 1));
        assert_eq!(mlp.loss_and_gradients(empty.view(), no_labels.view(), Loss::Bce), Err(NnError::EmptyBatch));
        assert!(matches!(
            mlp.loss_and_gradients(array![[1.0, 0.0]].view(), array![[1.0, 0.0]].view(), Loss::Bce),
            Err(NnError::LabelShape { .. })
        ));
        assert!(matches!(mlp.predict(array![[1.0]].view()), Err(NnError::InputDim { .. })));
    }

    #[test]
    fn frozen_spec_matches_predict() {
        let mlp = init_mlp(&[3, 4, 2], &[Act::Relu, Act::Sigmoid], 5).unwrap();
        let x = array![[0.5, -1.0, 2.0]];
        let spec = mlp.to_network_spec();
        assert_eq!(spec.forward_batch(x.view()).unwrap(), mlp.predict(x.view()).unwrap());
    }
}
