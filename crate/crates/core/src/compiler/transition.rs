use ndarray::{Array1, Array2};

use super::{pair_unit, CompileError};
use crate::automata::Dfa;
use crate::network::{Activation, Construction, LayerSpec, NetworkMetadata, NetworkSpec};

/// One-hidden-layer ReLU lookup table for the transition function.
///
/// Input is `[e_i; u_j]` (`n + k` wide). Hidden unit `(i, j)` computes
/// `relu(x_i + x_{n+j} - 1)`, which is 1 exactly on the pair it owns and 0 on
/// every other valid input. The output layer routes that unit to
/// `e_{delta(i, j)}`.
pub fn build_transition_layer(dfa: &Dfa) -> Result<NetworkSpec, CompileError> {
    let n = dfa.state_count();
    let k = dfa.alphabet_size();

    let mut hidden = Array2::zeros((n * k, n + k));
    let mut route = Array2::zeros((n, n * k));
    for i in 0..n {
        for j in 0..k {
            let unit = pair_unit(dfa, i, j);
            hidden[[unit, i]] = 1.0;
            hidden[[unit, n + j]] = 1.0;
            route[[dfa.step(i, j)?, unit]] = 1.0;
        }
    }

    let layers = vec![
        LayerSpec::new(hidden, Array1::from_elem(n * k, -1.0), Activation::Relu),
        LayerSpec::new(route, Array1::zeros(n), Activation::Identity),
    ];
    let mut metadata = NetworkMetadata::new(Construction::TransitionLookup);
    metadata.source_dfa = Some(dfa.digest());
    Ok(NetworkSpec::new(n + k, layers, metadata)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::one_hot;

    fn input(n: usize, k: usize, i: usize, j: usize) -> Vec<f64> {
        let mut x = one_hot(i, n).unwrap();
        x.extend(one_hot(j, k).unwrap());
        x
    }

    #[test]
    fn parity_lookup() {
        let net = build_transition_layer(&Dfa::parity()).unwrap();
        assert_eq!(net.widths(), vec![4, 2]);
        assert_eq!(net.forward(&input(2, 2, 0, 1)).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn counter_lookup_is_exhaustively_exact() {
        let dfa = Dfa::mod_counter(4).unwrap();
        let net = build_transition_layer(&dfa).unwrap();
        assert_eq!(net.widths()[0], 8);
        assert_eq!(net.forward(&input(4, 2, 3, 1)).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        for i in 0..4 {
            for j in 0..2 {
                let expected = one_hot(dfa.step(i, j).unwrap(), 4).unwrap();
                assert_eq!(net.forward(&input(4, 2, i, j)).unwrap(), expected);
            }
        }
    }
}
