use ndarray::{Array1, Array2};

use super::{pair_unit, CompileError};
use crate::automata::Dfa;
use crate::network::{Activation, Construction, LayerSpec, NetworkMetadata, NetworkSpec};

/// The stack of transition layers shared by the acceptor and embedding heads.
///
/// After step `t` the network carries `z_t`, the one-hot indicator of the
/// pair `(state before t, symbol t)` that fired, followed by the untouched
/// input blocks `t+1..T`. The next state is a fixed linear function of `z_t`
/// (see [`Carrier::decode`]), so the output matrix of one lookup is folded
/// into the AND gadgets of the next and each time step costs one layer.
///
/// With `padded`, an all-zero input block leaves the state unchanged through
/// `n` extra "stay" units, so strings shorter than `T` can be right-padded.
pub(crate) struct Carrier {
    pub layers: Vec<LayerSpec>,
    /// `n x width` matrix taking the final carried vector to the one-hot state.
    /// For `T = 0` the width is zero and [`Carrier::constant_state`] applies.
    pub decode: Array2<f64>,
    pub constant_state: Option<usize>,
}

pub(crate) fn carrier(dfa: &Dfa, length: usize, padded: bool) -> Result<Carrier, CompileError> {
    let n = dfa.state_count();
    let k = dfa.alphabet_size();
    let pairs = n * k;
    let state_width = if padded { pairs + n } else { pairs };

    // decode[q, c] = 1 when carried coordinate c means "now in state q"
    let mut decode = Array2::zeros((n, state_width));
    for i in 0..n {
        for j in 0..k {
            decode[[dfa.step(i, j)?, pair_unit(dfa, i, j)]] = 1.0;
        }
        if padded {
            decode[[i, pairs + i]] = 1.0;
        }
    }

    let mut layers = Vec::with_capacity(length);
    for t in 0..length {
        let remaining = length - t - 1;
        // input layout: [carried state (absent at t = 0); block t; blocks t+1..]
        let carried = if t == 0 { 0 } else { state_width };
        let symbol_at = carried;
        let rest_at = carried + k;
        let in_dim = carried + k + remaining * k;
        let out_dim = state_width + remaining * k;

        let mut w = Array2::zeros((out_dim, in_dim));
        let mut b = Array1::zeros(out_dim);
        for i in 0..n {
            let initial = if i == dfa.start() { 1.0 } else { 0.0 };
            for j in 0..k {
                let unit = pair_unit(dfa, i, j);
                w[[unit, symbol_at + j]] = 1.0;
                if t == 0 {
                    b[unit] = initial - 1.0;
                } else {
                    b[unit] = -1.0;
                    for c in 0..state_width {
                        w[[unit, c]] = decode[[i, c]];
                    }
                }
            }
            if padded {
                let unit = pairs + i;
                for j in 0..k {
                    w[[unit, symbol_at + j]] = -1.0;
                }
                if t == 0 {
                    b[unit] = initial;
                } else {
                    for c in 0..state_width {
                        w[[unit, c]] = decode[[i, c]];
                    }
                }
            }
        }
        for r in 0..remaining * k {
            w[[state_width + r, rest_at + r]] = 1.0;
        }
        layers.push(LayerSpec::new(w, b, Activation::Relu));
    }

    let (decode, constant_state) = if length == 0 {
        (Array2::zeros((n, 0)), Some(dfa.start()))
    } else {
        (decode, None)
    };
    Ok(Carrier { layers, decode, constant_state })
}

impl Carrier {
    /// Final affine layer computing `readout · state`.
    pub fn head(&self, readout: &Array2<f64>, activation: Activation) -> LayerSpec {
        match self.constant_state {
            Some(q) => LayerSpec::new(
                Array2::zeros((readout.nrows(), 0)),
                readout.column(q).to_owned(),
                activation,
            ),
            None => LayerSpec::new(readout.dot(&self.decode), Array1::zeros(readout.nrows()), activation),
        }
    }
}

/// Exact acceptor for `Σ^T`: `T` transition layers and a step readout.
///
/// The readout is `1[v · h_T > 0.5]` with `v` the indicator of accepting
/// states. The start state enters through the first layer's bias, so for
/// `T = 0` the network has no inputs and the readout alone answers whether
/// the empty string is accepted.
pub fn build_unrolled_acceptor(dfa: &Dfa, length: usize) -> Result<NetworkSpec, CompileError> {
    let n = dfa.state_count();
    let carrier = carrier(dfa, length, false)?;
    let accepting = Array2::from_shape_fn((1, n), |(_, q)| if dfa.is_accepting(q) { 1.0 } else { 0.0 });
    let readout = carrier.head(&accepting, Activation::StepAbove(vec![0.5]));

    let mut layers = carrier.layers;
    layers.push(readout);
    let mut metadata = NetworkMetadata::new(Construction::UnrolledAcceptor);
    metadata.source_dfa = Some(dfa.digest());
    metadata.length = Some(length);
    Ok(NetworkSpec::new(length * dfa.alphabet_size(), layers, metadata)?)
}
