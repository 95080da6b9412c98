//! Layered feedforward network description: the compilation target.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("layer {layer}: bias has {bias} entries but weights have {rows} rows")]
    BiasLength { layer: usize, bias: usize, rows: usize },
    #[error("layer {layer}: expects {expected} inputs but previous layer produces {found}")]
    Chain { layer: usize, expected: usize, found: usize },
    #[error("layer {layer}: {thresholds} thresholds for {units} step units")]
    Thresholds { layer: usize, thresholds: usize, units: usize },
    #[error("input has {found} entries, network expects {expected}")]
    InputDim { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
    /// Fires when `z >= theta` for the unit's own threshold.
    StepAtLeast(Vec<f64>),
    /// Fires when `z > theta`.
    StepAbove(Vec<f64>),
}

impl Activation {
    pub fn tag(&self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::StepAtLeast(_) => "step-ge",
            Activation::StepAbove(_) => "step-gt",
        }
    }

    pub fn thresholds(&self) -> Option<&[f64]> {
        match self {
            Activation::StepAtLeast(t) | Activation::StepAbove(t) => Some(t),
            _ => None,
        }
    }

    fn apply(&self, z: &mut Array2<f64>) {
        match self {
            Activation::Identity => {}
            Activation::Relu => z.mapv_inplace(|v| v.max(0.0)),
            Activation::Sigmoid => z.mapv_inplace(sigmoid),
            Activation::StepAtLeast(theta) => {
                for mut row in z.rows_mut() {
                    for (v, &t) in row.iter_mut().zip(theta) {
                        *v = if *v >= t { 1.0 } else { 0.0 };
                    }
                }
            }
            Activation::StepAbove(theta) => {
                for mut row in z.rows_mut() {
                    for (v, &t) in row.iter_mut().zip(theta) {
                        *v = if *v > t { 1.0 } else { 0.0 };
                    }
                }
            }
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// One affine map followed by an activation. `weights` is `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(weights: Array2<f64>, bias: Array1<f64>, activation: Activation) -> Self {
        Self { weights, bias, activation }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Which construction produced a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construction {
    TransitionLookup,
    UnrolledAcceptor,
    BinaryThreshold,
    EmbeddingHead,
    CompressedEmbedding,
    Unspecified,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::TransitionLookup => "transition-lookup",
            Construction::UnrolledAcceptor => "unrolled-acceptor",
            Construction::BinaryThreshold => "binary-threshold",
            Construction::EmbeddingHead => "embedding-head",
            Construction::CompressedEmbedding => "compressed-embedding",
            Construction::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Construction::TransitionLookup,
            Construction::UnrolledAcceptor,
            Construction::BinaryThreshold,
            Construction::EmbeddingHead,
            Construction::CompressedEmbedding,
            Construction::Unspecified,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown construction `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkMetadata {
    pub construction: Construction,
    /// Hex digest of the source automaton, see [`crate::format::dfa_digest`].
    pub source_dfa: Option<String>,
    /// Number of input symbols the network was unrolled for.
    pub length: Option<usize>,
    pub seed: Option<u64>,
}

impl NetworkMetadata {
    pub fn new(construction: Construction) -> Self {
        Self { construction, source_dfa: None, length: None, seed: None }
    }
}

impl Default for NetworkMetadata {
    fn default() -> Self {
        Self::new(Construction::Unspecified)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    layers: Vec<LayerSpec>,
    input_dim: usize,
    pub metadata: NetworkMetadata,
}

impl NetworkSpec {
    /// Checks that layer shapes chain from `input_dim`.
    pub fn new(
        input_dim: usize,
        layers: Vec<LayerSpec>,
        metadata: NetworkMetadata,
    ) -> Result<Self, NetworkError> {
        let mut width = input_dim;
        for (index, layer) in layers.iter().enumerate() {
            if layer.bias.len() != layer.output_dim() {
                return Err(NetworkError::BiasLength {
                    layer: index,
                    bias: layer.bias.len(),
                    rows: layer.output_dim(),
                });
            }
            if layer.input_dim() != width {
                return Err(NetworkError::Chain { layer: index, expected: layer.input_dim(), found: width });
            }
            if let Some(theta) = layer.activation.thresholds() {
                if theta.len() != layer.output_dim() {
                    return Err(NetworkError::Thresholds {
                        layer: index,
                        thresholds: theta.len(),
                        units: layer.output_dim(),
                    });
                }
            }
            width = layer.output_dim();
        }
        Ok(Self { layers, input_dim, metadata })
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    /// Mutable access for fault injection and fine tuning; shapes must be preserved.
    pub fn layer_mut(&mut self, index: usize) -> Option<&mut LayerSpec> {
        self.layers.get_mut(index)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, LayerSpec::output_dim)
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(LayerSpec::output_dim).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(LayerSpec::parameter_count).sum()
    }

    /// Evaluates one input vector.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NetworkError> {
        let batch = ArrayView2::from_shape((1, input.len()), input).expect("row vector");
        Ok(self.forward_batch(batch)?.into_raw_vec_and_offset().0)
    }

    /// Evaluates a batch, one input per row.
    pub fn forward_batch(&self, inputs: ArrayView2<'_, f64>) -> Result<Array2<f64>, NetworkError> {
        if inputs.ncols() != self.input_dim {
            return Err(NetworkError::InputDim { expected: self.input_dim, found: inputs.ncols() });
        }
        let mut current = inputs.to_owned();
        for layer in &self.layers {
            let mut z = current.dot(&layer.weights.t());
            z += &layer.bias.view().insert_axis(Axis(0));
            layer.activation.apply(&mut z);
            current = z;
        }
        Ok(current)
    }
}
