use std::fmt;

use ndarray::{Array2, ArrayView2, Axis};

use super::dense::Act;
use super::NnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// Binary cross-entropy on sigmoid outputs, computed from the logits.
    Bce,
    Mse,
    /// Softmax cross-entropy on identity outputs; labels are class distributions.
    SoftmaxCrossEntropy,
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Loss::Bce => "bce",
            Loss::Mse => "mse",
            Loss::SoftmaxCrossEntropy => "softmax-ce",
        })
    }
}

/// Mean loss and its gradient with respect to the last layer's pre-activation.
///
/// Bce and Mse average over every output element; softmax cross-entropy
/// averages over rows.
pub(crate) fn output_delta(
    loss: Loss,
    act: Act,
    z: &Array2<f64>,
    output: &Array2<f64>,
    labels: &Array2<f64>,
) -> Result<(f64, Array2<f64>), NnError> {
    if z.dim() != labels.dim() {
        return Err(NnError::LabelShape { outputs: z.dim(), labels: labels.dim() });
    }
    let rows = z.nrows() as f64;
    let elements = z.len() as f64;
    match (loss, act) {
        (Loss::Bce, Act::Sigmoid) => {
            let mut total = 0.0;
            for (&logit, &y) in z.iter().zip(labels) {
                // log(1 + e^z) - y z without overflow
                total += logit.max(0.0) - logit * y + (-logit.abs()).exp().ln_1p();
            }
            let delta = (output - labels) / elements;
            Ok((total / elements, delta))
        }
        (Loss::Mse, _) => {
            let diff = output - labels;
            let total = diff.iter().map(|d| d * d).sum::<f64>();
            let d_output = diff * (2.0 / elements);
            Ok((total / elements, act.backprop(z, output, d_output)))
        }
        (Loss::SoftmaxCrossEntropy, Act::Identity) => {
            let mut total = 0.0;
            let mut delta = Array2::zeros(z.raw_dim());
            for ((row, labels), mut d) in z.outer_iter().zip(labels.outer_iter()).zip(delta.outer_iter_mut()) {
                let peak = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
                let norm = row.iter().map(|&v| (v - peak).exp()).sum::<f64>();
                let log_norm = peak + norm.ln();
                for ((&logit, &y), g) in row.iter().zip(labels).zip(d.iter_mut()) {
                    total += y * (log_norm - logit);
                    *g = ((logit - log_norm).exp() - y) / rows;
                }
            }
            Ok((total / rows, delta))
        }
        (loss, act) => Err(NnError::LossActivation { loss, act }),
    }
}

/// Row-wise argmax; ties resolve to the lowest index.
pub fn argmax_rows(values: ArrayView2<'_, f64>) -> Vec<usize> {
    values
        .axis_iter(Axis(0))
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
                .0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn bce_at_zero_logit_is_ln2() {
        let z = array![[0.0]];
        let a = array![[0.5]];
        let (loss, delta) = output_delta(Loss::Bce, Act::Sigmoid, &z, &a, &array![[1.0]]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(delta, array![[-0.5]]);
    }

    #[test]
    fn bce_extreme_logits_stay_finite() {
        let z = array![[800.0, -800.0]];
        let a = z.mapv(crate::network::sigmoid);
        let (loss, _) = output_delta(Loss::Bce, Act::Sigmoid, &z, &a, &array![[0.0, 1.0]]).unwrap();
        assert!((loss - 800.0).abs() < 1e-9);
    }

    #[test]
    fn mse_perfect_fit() {
        let z = array![[0.3, -1.0]];
        let (loss, delta) = output_delta(Loss::Mse, Act::Identity, &z, &z, &z).unwrap();
        assert_eq!(loss, 0.0);
        assert!(delta.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn softmax_uniform() {
        let z = array![[0.0, 0.0, 0.0, 0.0]];
        let (loss, _) =
            output_delta(Loss::SoftmaxCrossEntropy, Act::Identity, &z, &z, &array![[0.0, 1.0, 0.0, 0.0]])
                .unwrap();
        assert!((loss - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_pairs_are_rejected() {
        let z = array![[0.0]];
        assert!(matches!(
            output_delta(Loss::Bce, Act::Relu, &z, &z, &z),
            Err(NnError::LossActivation { .. })
        ));
        assert!(matches!(
            output_delta(Loss::Mse, Act::Relu, &z, &z, &array![[0.0, 1.0]]),
            Err(NnError::LabelShape { .. })
        ));
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax_rows(array![[0.1, 0.9], [0.5, 0.5]].view()), vec![1, 0]);
    }
}
