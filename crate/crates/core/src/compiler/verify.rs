use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::automata::{strings_of_length, Dfa};
use crate::network::NetworkSpec;

/// Largest number of strings [`verify_exact`] enumerates by default (2^24).
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

const CHUNK: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("network takes {found} inputs but strings of length {length} over {alphabet} symbols need {expected}")]
    InputDim { expected: usize, found: usize, length: usize, alphabet: usize },
    #[error("acceptor must have a single output, network has {0}")]
    OutputDim(usize),
    #[error("{strings} strings exceed the enumeration budget of {budget}; use sampled verification")]
    BudgetExceeded { strings: u128, budget: u128 },
    #[error("sampled verification needs at least one sample")]
    NoSamples,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mismatch {
    pub string: Vec<usize>,
    pub expected: bool,
    pub actual: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub total_strings: u64,
    /// Sorted lexicographically by string.
    pub mismatches: Vec<Mismatch>,
    pub exhaustive: bool,
}

impl VerificationReport {
    pub fn exact(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn matched(&self) -> u64 {
        self.total_strings - self.mismatches.len() as u64
    }

    pub fn first_witness(&self) -> Option<&Mismatch> {
        self.mismatches.first()
    }
}

fn check_shape(net: &NetworkSpec, dfa: &Dfa, length: usize) -> Result<(), VerifyError> {
    let k = dfa.alphabet_size();
    if net.input_dim() != length * k {
        return Err(VerifyError::InputDim {
            expected: length * k,
            found: net.input_dim(),
            length,
            alphabet: k,
        });
    }
    if net.output_dim() != 1 {
        return Err(VerifyError::OutputDim(net.output_dim()));
    }
    Ok(())
}

/// Network verdicts use the same 0.5 cut as a sigmoid acceptor.
fn check_chunk(net: &NetworkSpec, dfa: &Dfa, strings: &[Vec<usize>]) -> Vec<Mismatch> {
    let k = dfa.alphabet_size();
    let width = strings.first().map_or(0, Vec::len) * k;
    let mut batch = Array2::zeros((strings.len(), width));
    for (row, x) in strings.iter().enumerate() {
        for (t, &s) in x.iter().enumerate() {
            batch[[row, t * k + s]] = 1.0;
        }
    }
    let out = net.forward_batch(batch.view()).expect("shape checked by caller");
    strings
        .iter()
        .zip(out.column(0))
        .filter_map(|(x, &y)| {
            let expected = dfa.accepts(x).expect("enumerated strings are valid");
            let actual = y >= 0.5;
            (expected != actual).then(|| Mismatch { string: x.clone(), expected, actual })
        })
        .collect()
}

fn check_all(net: &NetworkSpec, dfa: &Dfa, strings: Vec<Vec<usize>>) -> Vec<Mismatch> {
    let mut mismatches: Vec<Mismatch> =
        strings.par_chunks(CHUNK).flat_map_iter(|chunk| check_chunk(net, dfa, chunk)).collect();
    mismatches.sort();
    mismatches
}

/// Compares the network with the automaton on every string of `Σ^length`.
pub fn verify_exact(
    net: &NetworkSpec,
    dfa: &Dfa,
    length: usize,
    budget: u128,
) -> Result<VerificationReport, VerifyError> {
    check_shape(net, dfa, length)?;
    let strings_total = (dfa.alphabet_size() as u128).checked_pow(length as u32).unwrap_or(u128::MAX);
    if strings_total > budget {
        return Err(VerifyError::BudgetExceeded { strings: strings_total, budget });
    }
    let strings: Vec<Vec<usize>> = strings_of_length(dfa.alphabet_size(), length).collect();
    let mismatches = check_all(net, dfa, strings);
    Ok(VerificationReport { total_strings: strings_total as u64, mismatches, exhaustive: true })
}

/// Compares on `samples` strings drawn uniformly (with replacement) from `Σ^length`.
pub fn verify_sampled(
    net: &NetworkSpec,
    dfa: &Dfa,
    length: usize,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    check_shape(net, dfa, length)?;
    if samples == 0 {
        return Err(VerifyError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = dfa.alphabet_size();
    let strings: Vec<Vec<usize>> =
        (0..samples).map(|_| (0..length).map(|_| rng.gen_range(0..k)).collect()).collect();
    let mut mismatches = check_all(net, dfa, strings);
    mismatches.dedup_by(|a, b| a.string == b.string);
    Ok(VerificationReport { total_strings: samples as u64, mismatches, exhaustive: false })
}
