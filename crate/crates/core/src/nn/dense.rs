use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::network::{sigmoid, Activation, LayerSpec};

/// Differentiable activations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Act {
    Identity,
    Relu,
    Sigmoid,
}

impl Act {
    pub(crate) fn apply(self, z: &Array2<f64>) -> Array2<f64> {
        match self {
            Act::Identity => z.clone(),
            Act::Relu => z.mapv(|v| v.max(0.0)),
            Act::Sigmoid => z.mapv(sigmoid),
        }
    }

    /// `d_out * act'(z)`, reusing the forward output `a` where cheaper.
    pub(crate) fn backprop(self, z: &Array2<f64>, a: &Array2<f64>, d_out: Array2<f64>) -> Array2<f64> {
        match self {
            Act::Identity => d_out,
            Act::Relu => {
                let mut d = d_out;
                d.zip_mut_with(z, |g, &v| {
                    if v <= 0.0 {
                        *g = 0.0;
                    }
                });
                d
            }
            Act::Sigmoid => {
                let mut d = d_out;
                d.zip_mut_with(a, |g, &s| *g *= s * (1.0 - s));
                d
            }
        }
    }

    pub fn to_activation(self) -> Activation {
        match self {
            Act::Identity => Activation::Identity,
            Act::Relu => Activation::Relu,
            Act::Sigmoid => Activation::Sigmoid,
        }
    }
}

/// Trainable affine layer, `weights` is `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub act: Act,
}

/// Parameter-shaped gradient of one [`Dense`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Gradient {
    pub fn zeros_like(layer: &Dense) -> Self {
        Self { weights: Array2::zeros(layer.weights.raw_dim()), bias: Array1::zeros(layer.bias.len()) }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().chain(self.bias.iter()).all(|&g| g == 0.0)
    }
}

/// Forward values kept for the backward pass.
pub(crate) struct Cache {
    pub input: Array2<f64>,
    pub z: Array2<f64>,
    pub output: Array2<f64>,
}

impl Dense {
    /// Uniform `±sqrt(1 / fan_in)` weights, zero biases.
    pub fn init(inputs: usize, outputs: usize, act: Act, rng: &mut impl Rng) -> Self {
        let limit = (1.0 / inputs.max(1) as f64).sqrt();
        let weights = Array2::from_shape_simple_fn((outputs, inputs), || rng.gen_range(-limit..=limit));
        Self { weights, bias: Array1::zeros(outputs), act }
    }

    /// Normal weights with variance `scale / fan_in`, uniform `±sqrt(1 / fan_in)` biases.
    pub fn init_normal(inputs: usize, outputs: usize, act: Act, scale: f64, rng: &mut impl Rng) -> Self {
        let fan_in = inputs.max(1) as f64;
        let normal = Normal::new(0.0, (scale / fan_in).sqrt()).expect("finite variance");
        let weights = Array2::from_shape_simple_fn((outputs, inputs), || normal.sample(rng));
        let limit = fan_in.recip().sqrt();
        let bias = Array1::from_shape_simple_fn(outputs, || rng.gen_range(-limit..=limit));
        Self { weights, bias, act }
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub(crate) fn pre_activation(&self, input: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut z = input.dot(&self.weights.t());
        z += &self.bias.view().insert_axis(Axis(0));
        z
    }

    pub fn forward(&self, input: ArrayView2<'_, f64>) -> Array2<f64> {
        self.act.apply(&self.pre_activation(input))
    }

    pub(crate) fn forward_cached(&self, input: Array2<f64>) -> Cache {
        let z = self.pre_activation(input.view());
        let output = self.act.apply(&z);
        Cache { input, z, output }
    }

    /// Given `d_z` (loss gradient w.r.t. pre-activation), returns `(d_input, gradient)`.
    pub(crate) fn backward_from_z(&self, cache: &Cache, d_z: Array2<f64>) -> (Array2<f64>, Gradient) {
        let weights = d_z.t().dot(&cache.input);
        let bias = d_z.sum_axis(Axis(0));
        let d_input = d_z.dot(&self.weights);
        (d_input, Gradient { weights, bias })
    }

    /// Given `d_output` (w.r.t. post-activation), returns `(d_input, gradient)`.
    pub(crate) fn backward(&self, cache: &Cache, d_output: Array2<f64>) -> (Array2<f64>, Gradient) {
        let d_z = self.act.backprop(&cache.z, &cache.output, d_output);
        self.backward_from_z(cache, d_z)
    }

    pub fn to_layer_spec(&self) -> LayerSpec {
        LayerSpec::new(self.weights.clone(), self.bias.clone(), self.act.to_activation())
    }
}
