use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automata::Dfa;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("dataset size must be positive")]
    Empty,
    #[error("balanced dataset needs an even size, got {0}")]
    OddSize(usize),
    #[error("range [{lo}, {hi}] is invalid: need 1 <= lo < hi and 2 * hi <= {max_len}")]
    Range { lo: usize, hi: usize, max_len: usize },
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    Fraction(String),
    #[error("{inputs} input rows but {labels} label rows")]
    RowMismatch { inputs: usize, labels: usize },
}

/// Where a dataset came from; equal provenance means identical contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub generator: String,
    pub dfa: Option<String>,
    pub seed: u64,
    pub size: usize,
}

/// Encoded strings (one per row) with label rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    strings: Vec<Vec<usize>>,
    inputs: Array2<f64>,
    labels: Array2<f64>,
    pub provenance: Provenance,
}

impl Dataset {
    /// Wraps already encoded rows; [`Dataset::strings`] is then empty.
    pub fn from_arrays(
        inputs: Array2<f64>,
        labels: Array2<f64>,
        generator: &str,
        dfa: Option<String>,
        seed: u64,
    ) -> Result<Self, DatasetError> {
        if inputs.nrows() != labels.nrows() {
            return Err(DatasetError::RowMismatch { inputs: inputs.nrows(), labels: labels.nrows() });
        }
        if inputs.nrows() == 0 {
            return Err(DatasetError::Empty);
        }
        let size = inputs.nrows();
        Ok(Self {
            strings: Vec::new(),
            inputs,
            labels,
            provenance: Provenance { generator: generator.into(), dfa, seed, size },
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Symbol strings before encoding (padding symbols included); empty for
    /// datasets built with [`Dataset::from_arrays`].
    pub fn strings(&self) -> &[Vec<usize>] {
        &self.strings
    }

    pub fn inputs(&self) -> ArrayView2<'_, f64> {
        self.inputs.view()
    }

    pub fn labels(&self) -> ArrayView2<'_, f64> {
        self.labels.view()
    }

    fn subset(&self, rows: &[usize], tag: &str) -> Dataset {
        let pick = |m: &Array2<f64>| m.select(ndarray::Axis(0), rows);
        Dataset {
            strings: rows.iter().filter_map(|&r| self.strings.get(r).cloned()).collect(),
            inputs: pick(&self.inputs),
            labels: pick(&self.labels),
            provenance: Provenance {
                generator: format!("{}/{tag}", self.provenance.generator),
                size: rows.len(),
                ..self.provenance.clone()
            },
        }
    }

    /// Uniform random split; `train_fraction` of the rows (rounded) go to the first part.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), DatasetError> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(DatasetError::Fraction(train_fraction.to_string()));
        }
        let mut rows: Vec<usize> = (0..self.len()).collect();
        rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let cut = ((self.len() as f64) * train_fraction).round() as usize;
        Ok((self.subset(&rows[..cut], "train"), self.subset(&rows[cut..], "test")))
    }

    /// Concatenates rows of two datasets with matching widths.
    pub fn concat(&self, other: &Dataset) -> Dataset {
        let stack = |a: &Array2<f64>, b: &Array2<f64>| {
            ndarray::concatenate(ndarray::Axis(0), &[a.view(), b.view()]).expect("matching widths")
        };
        let mut strings = self.strings.clone();
        strings.extend(other.strings.iter().cloned());
        Dataset {
            strings,
            inputs: stack(&self.inputs, &other.inputs),
            labels: stack(&self.labels, &other.labels),
            provenance: Provenance {
                generator: format!("{}+{}", self.provenance.generator, other.provenance.generator),
                size: self.len() + other.len(),
                ..self.provenance.clone()
            },
        }
    }
}

fn one_hot_rows(strings: &[Vec<usize>], blocks: usize, width: usize, skip: Option<usize>) -> Array2<f64> {
    let mut inputs = Array2::zeros((strings.len(), blocks * width));
    for (row, x) in strings.iter().enumerate() {
        for (t, &s) in x.iter().enumerate() {
            if Some(s) != skip {
                inputs[[row, t * width + s]] = 1.0;
            }
        }
    }
    inputs
}

fn sample_strings(dfa: &Dfa, length: usize, count: usize, seed: u64) -> Result<Vec<Vec<usize>>, DatasetError> {
    if count == 0 {
        return Err(DatasetError::Empty);
    }
    let k = dfa.alphabet_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| (0..length).map(|_| rng.gen_range(0..k)).collect()).collect())
}

/// `count` strings drawn i.i.d. uniformly from `Σ^length`, labelled `[accepts(x)]`.
pub fn gen_dfa_dataset(dfa: &Dfa, length: usize, count: usize, seed: u64) -> Result<Dataset, DatasetError> {
    let strings = sample_strings(dfa, length, count, seed)?;
    let labels = Array2::from_shape_fn((count, 1), |(row, _)| {
        if dfa.accepts(&strings[row]).expect("sampled from the alphabet") { 1.0 } else { 0.0 }
    });
    Ok(Dataset {
        inputs: one_hot_rows(&strings, length, dfa.alphabet_size(), None),
        strings,
        labels,
        provenance: Provenance { generator: "dfa-acceptance".into(), dfa: Some(dfa.digest()), seed, size: count },
    })
}

/// Same strings as [`gen_dfa_dataset`] for equal arguments, labelled with the one-hot reached state.
pub fn gen_state_dataset(dfa: &Dfa, length: usize, count: usize, seed: u64) -> Result<Dataset, DatasetError> {
    let strings = sample_strings(dfa, length, count, seed)?;
    let mut labels = Array2::zeros((count, dfa.state_count()));
    for (row, x) in strings.iter().enumerate() {
        labels[[row, dfa.run(x).expect("sampled from the alphabet")]] = 1.0;
    }
    Ok(Dataset {
        inputs: one_hot_rows(&strings, length, dfa.alphabet_size(), None),
        strings,
        labels,
        provenance: Provenance { generator: "dfa-state".into(), dfa: Some(dfa.digest()), seed, size: count },
    })
}

/// Symbols of the `a^n b^m` task.
pub const SYMBOL_A: usize = 0;
pub const SYMBOL_B: usize = 1;
pub const SYMBOL_PAD: usize = 2;

/// How positions past the end of an `a^n b^m` string are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadEncoding {
    /// A third one-hot symbol (blocks of 3).
    #[default]
    Symbol,
    /// All-zero blocks of width 2.
    Zero,
}

/// Balanced `a^n b^n` (label 1) versus `a^n b^m`, `m != n` (label 0).
///
/// `n` is uniform on `[lo, hi]`; for negatives `m` is uniform on the same
/// range minus `n`. Strings are padded to `max_len`.
pub fn gen_anbn_dataset(
    lo: usize,
    hi: usize,
    max_len: usize,
    count: usize,
    seed: u64,
    padding: PadEncoding,
) -> Result<Dataset, DatasetError> {
    if lo == 0 || lo >= hi || 2 * hi > max_len {
        return Err(DatasetError::Range { lo, hi, max_len });
    }
    if count == 0 {
        return Err(DatasetError::Empty);
    }
    if count % 2 == 1 {
        return Err(DatasetError::OddSize(count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strings = Vec::with_capacity(count);
    let mut labels = Array2::zeros((count, 1));
    for row in 0..count {
        let n = rng.gen_range(lo..=hi);
        let m = if row % 2 == 0 {
            labels[[row, 0]] = 1.0;
            n
        } else {
            let pick = rng.gen_range(lo..hi);
            if pick >= n { pick + 1 } else { pick }
        };
        let mut x = vec![SYMBOL_A; n];
        x.extend(std::iter::repeat_n(SYMBOL_B, m));
        x.resize(max_len, SYMBOL_PAD);
        strings.push(x);
    }
    let inputs = match padding {
        PadEncoding::Symbol => one_hot_rows(&strings, max_len, 3, None),
        PadEncoding::Zero => one_hot_rows(&strings, max_len, 2, Some(SYMBOL_PAD)),
    };
    Ok(Dataset {
        strings,
        inputs,
        labels,
        provenance: Provenance {
            generator: format!("anbn[{lo},{hi}]/{max_len}/{padding:?}"),
            dfa: None,
            seed,
            size: count,
        },
    })
}

/// `a^n b^m` membership; padding symbols are ignored.
pub fn is_anbn(x: &[usize]) -> bool {
    let body: Vec<usize> = x.iter().copied().filter(|&s| s != SYMBOL_PAD).collect();
    let a = body.iter().take_while(|&&s| s == SYMBOL_A).count();
    let b = body.len() - a;
    a >= 1 && a == b && body[a..].iter().all(|&s| s == SYMBOL_B)
}
