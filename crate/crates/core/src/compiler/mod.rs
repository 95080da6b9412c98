//! Deterministic compilation of a [`Dfa`] into explicit network weights.
//!
//! Every pass here is exact by construction: for valid one-hot or binary
//! inputs the compiled network only ever carries the values 0 and 1, so the
//! verifier can demand bit-for-bit agreement with the automaton.

mod embedding;
mod threshold;
mod transition;
mod unrolled;
mod verify;

use thiserror::Error;

use crate::automata::{AutomataError, Dfa};
use crate::network::NetworkError;

pub use embedding::{
    build_compressed_embedding, build_embedding_head, min_column_distance, CompressedEmbedding,
    MAX_PROJECTION_ATTEMPTS,
};
pub use threshold::build_binary_threshold_network;
pub use transition::build_transition_layer;
pub use unrolled::build_unrolled_acceptor;
pub use verify::{
    verify_exact, verify_sampled, Mismatch, VerificationReport, VerifyError, DEFAULT_ENUMERATION_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("embedding matrix has {found} columns, automaton has {expected} states")]
    EmbeddingShape { expected: usize, found: usize },
    #[error("embedding columns {first} and {second} are identical")]
    DuplicateColumns { first: usize, second: usize },
    #[error("state compression needs at least two states, got {0}")]
    TooFewStates(usize),
    #[error("separation margin must be positive and finite, got {0}")]
    InvalidMargin(f64),
    #[error("no projection separated all states by more than {epsilon} after {attempts} draws (best {best})")]
    SeparationNotReached { epsilon: f64, best: f64, attempts: usize },
}

/// Index of the hidden unit that recognises the pair `(state, symbol)`.
#[inline]
pub(crate) fn pair_unit(dfa: &Dfa, state: usize, symbol: usize) -> usize {
    state * dfa.alphabet_size() + symbol
}
