use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::unrolled::carrier;
use super::CompileError;
use crate::automata::Dfa;
use crate::encodings::code_width;
use crate::network::{Activation, Construction, NetworkMetadata, NetworkSpec};

/// Draws allowed before [`build_compressed_embedding`] gives up.
pub const MAX_PROJECTION_ATTEMPTS: usize = 100;

/// State-class embedding `f(x) = V · state(x)` for strings of length at most `length`.
///
/// Inputs are `length` blocks of `k`; shorter strings are right-padded with
/// all-zero blocks (see [`crate::encodings::encode_zero_padded`]), which the
/// carrier treats as "no symbol". `embedding` is `d x n` and must have
/// pairwise distinct columns, so distinct states get distinct vectors.
pub fn build_embedding_head(
    dfa: &Dfa,
    embedding: &Array2<f64>,
    length: usize,
) -> Result<NetworkSpec, CompileError> {
    let n = dfa.state_count();
    if embedding.ncols() != n {
        return Err(CompileError::EmbeddingShape { expected: n, found: embedding.ncols() });
    }
    for first in 0..n {
        for second in first + 1..n {
            if embedding.column(first) == embedding.column(second) {
                return Err(CompileError::DuplicateColumns { first, second });
            }
        }
    }

    let carrier = carrier(dfa, length, true)?;
    let head = carrier.head(embedding, Activation::Identity);
    let mut layers = carrier.layers;
    layers.push(head);
    let mut metadata = NetworkMetadata::new(Construction::EmbeddingHead);
    metadata.source_dfa = Some(dfa.digest());
    metadata.length = Some(length);
    Ok(NetworkSpec::new(length * dfa.alphabet_size(), layers, metadata)?)
}

/// A random projection of one-hot states that keeps every pair more than `epsilon` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedEmbedding {
    /// `d x n` with `d = ceil(log2 n) + 1`.
    pub projection: Array2<f64>,
    /// Smallest `‖P e_i − P e_j‖₂` over state pairs.
    pub min_distance: f64,
    /// Draws consumed, including the accepted one.
    pub attempts: usize,
    pub seed: u64,
}

impl CompressedEmbedding {
    pub fn dim(&self) -> usize {
        self.projection.nrows()
    }

    /// Embedding network over strings of length at most `length` using this projection.
    pub fn network(&self, dfa: &Dfa, length: usize) -> Result<NetworkSpec, CompileError> {
        let mut net = build_embedding_head(dfa, &self.projection, length)?;
        net.metadata.construction = Construction::CompressedEmbedding;
        net.metadata.seed = Some(self.seed);
        Ok(net)
    }
}

/// Gaussian projection of the `n` one-hot states into `ceil(log2 n) + 1` dimensions.
///
/// Entries are i.i.d. `N(0, 1) / sqrt(d)` from a ChaCha8 stream seeded with
/// `seed`; draws are rejected until the minimum pairwise distance exceeds
/// `epsilon`, at most [`MAX_PROJECTION_ATTEMPTS`] times.
pub fn build_compressed_embedding(
    dfa: &Dfa,
    epsilon: f64,
    seed: u64,
) -> Result<CompressedEmbedding, CompileError> {
    let n = dfa.state_count();
    if n < 2 {
        return Err(CompileError::TooFewStates(n));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CompileError::InvalidMargin(epsilon));
    }
    let d = code_width(n) + 1;
    let scale = 1.0 / (d as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best = f64::NEG_INFINITY;
    for attempt in 1..=MAX_PROJECTION_ATTEMPTS {
        let projection = Array2::from_shape_simple_fn((d, n), || {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        });
        let min_distance = min_column_distance(&projection);
        if min_distance > epsilon {
            return Ok(CompressedEmbedding { projection, min_distance, attempts: attempt, seed });
        }
        best = best.max(min_distance);
    }
    Err(CompileError::SeparationNotReached { epsilon, best, attempts: MAX_PROJECTION_ATTEMPTS })
}

/// Smallest Euclidean distance between two distinct columns.
pub fn min_column_distance(matrix: &Array2<f64>) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..matrix.ncols() {
        for j in i + 1..matrix.ncols() {
            let diff = &matrix.column(i) - &matrix.column(j);
            best = best.min(diff.dot(&diff).sqrt());
        }
    }
    best
}
