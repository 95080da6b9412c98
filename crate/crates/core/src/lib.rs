//! Compile deterministic finite automata into exact feedforward networks,
//! verify them exhaustively, and train neural counterparts for comparison.
//!
//! * [`automata`]: the DFA model, minimization and Myhill-Nerode classes.
//! * [`encodings`]: one-hot and binary vector encodings.
//! * [`compiler`]: constructive passes from a [`Dfa`] to a [`NetworkSpec`] and the exact verifier.
//! * [`nn`]: network evaluation plus a small Adam trainer.
//! * [`experiments`]: dataset generators and the seed-swept training protocols.
//! * [`format`]: text formats for automata and networks.

pub mod automata;
pub mod compiler;
pub mod encodings;
pub mod experiments;
pub mod format;
pub mod network;
pub mod nn;
pub mod stats;

pub use automata::Dfa;
pub use network::NetworkSpec;
