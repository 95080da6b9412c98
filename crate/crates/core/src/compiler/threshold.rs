use ndarray::{Array1, Array2};

use super::{pair_unit, CompileError};
use crate::automata::Dfa;
use crate::encodings::{binary_code, code_width};
use crate::network::{Activation, Construction, LayerSpec, NetworkMetadata, NetworkSpec};

/// Depth-2 threshold circuit over binary state codes.
///
/// Input is `[b_i; u_j]` with `b_i` the little-endian code of state `i`
/// (`d = ceil(log2 n)` bits, at least one). Hidden layer: one minterm per
/// transition pair, weights `+1`/`-1` on the pattern's ones/zeros and
/// threshold equal to the number of ones, so it fires on its own pattern
/// only. Output bit `l` ORs the minterms whose target code has bit `l` set.
pub fn build_binary_threshold_network(dfa: &Dfa) -> Result<NetworkSpec, CompileError> {
    let n = dfa.state_count();
    let k = dfa.alphabet_size();
    let d = code_width(n);
    let code = |q: usize| binary_code(q, d).expect("state index fits its code width");

    let mut minterms = Array2::zeros((n * k, d + k));
    let mut thresholds = vec![0.0; n * k];
    let mut or_gates = Array2::zeros((d, n * k));
    for i in 0..n {
        let source = code(i);
        for j in 0..k {
            let unit = pair_unit(dfa, i, j);
            let mut pattern = source.clone();
            pattern.extend((0..k).map(|s| if s == j { 1.0 } else { 0.0 }));
            for (c, &bit) in pattern.iter().enumerate() {
                minterms[[unit, c]] = if bit == 1.0 { 1.0 } else { -1.0 };
            }
            thresholds[unit] = pattern.iter().sum();

            for (bit, &value) in code(dfa.step(i, j)?).iter().enumerate() {
                if value == 1.0 {
                    or_gates[[bit, unit]] = 1.0;
                }
            }
        }
    }

    let layers = vec![
        LayerSpec::new(minterms, Array1::zeros(n * k), Activation::StepAtLeast(thresholds)),
        LayerSpec::new(or_gates, Array1::zeros(d), Activation::StepAtLeast(vec![1.0; d])),
    ];
    let mut metadata = NetworkMetadata::new(Construction::BinaryThreshold);
    metadata.source_dfa = Some(dfa.digest());
    Ok(NetworkSpec::new(d + k, layers, metadata)?)
}
