mod common;

use dfanet::automata::{strings_of_length, strings_up_to};
use dfanet::compiler::{
    build_binary_threshold_network, build_embedding_head, build_transition_layer, build_unrolled_acceptor,
    verify_exact,
};
use dfanet::encodings::{binary_code, code_width, encode_string, encode_zero_padded, one_hot};
use dfanet::nn::{init_mlp, train, Act, AdamConfig, AdamState, Gradient, Loss, Model, TrainConfig};
use dfanet::Dfa;
use ndarray::{array, Array2};
use proptest::prelude::*;

fn arb_dfa(max_states: usize, max_symbols: usize) -> impl Strategy<Value = Dfa> {
    (1..=max_states, 1..=max_symbols).prop_flat_map(|(n, k)| {
        (prop::collection::vec(0..n, n * k), prop::collection::vec(any::<bool>(), n)).prop_map(
            move |(table, accept)| Dfa::new(n, k, table, 0, (0..n).filter(|&q| accept[q])).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn string_encoding_round_trips(k in 1usize..4, x in prop::collection::vec(0usize..4, 0..8)) {
        let x: Vec<usize> = x.into_iter().map(|s| s % k).collect();
        let encoded = encode_string(&x, k).unwrap();
        prop_assert_eq!(encoded.data().len(), x.len() * k);
        let decoded: Vec<usize> = encoded.decode().into_iter().map(Option::unwrap).collect();
        prop_assert_eq!(decoded, x);
    }

    #[test]
    fn padding_decodes_to_none(k in 1usize..4, x in prop::collection::vec(0usize..4, 0..5), extra in 0usize..4) {
        let x: Vec<usize> = x.into_iter().map(|s| s % k).collect();
        let padded = encode_zero_padded(&x, x.len() + extra, k).unwrap();
        let decoded = padded.decode();
        prop_assert!(decoded[x.len()..].iter().all(Option::is_none));
        let plain = encode_string(&x, k).unwrap();
        prop_assert_eq!(&padded.data()[..x.len() * k], plain.data());
    }

    #[test]
    fn unrolled_acceptor_is_exact(dfa in arb_dfa(6, 3), length in 0usize..6) {
        let net = build_unrolled_acceptor(&dfa, length).unwrap();
        prop_assert_eq!(net.depth(), length + 1);
        let report = verify_exact(&net, &dfa, length, 1 << 20).unwrap();
        prop_assert!(report.exact(), "{:?}", report.first_witness());
    }

    #[test]
    fn transition_layer_is_exact(dfa in arb_dfa(12, 3)) {
        let (n, k) = (dfa.state_count(), dfa.alphabet_size());
        let net = build_transition_layer(&dfa).unwrap();
        prop_assert_eq!(net.widths()[0], n * k);
        for q in 0..n {
            for s in 0..k {
                let mut x = one_hot(q, n).unwrap();
                x.extend(one_hot(s, k).unwrap());
                prop_assert_eq!(net.forward(&x).unwrap(), one_hot(dfa.step(q, s).unwrap(), n).unwrap());
            }
        }
    }

    #[test]
    fn threshold_circuit_is_exact(dfa in arb_dfa(12, 3)) {
        let (n, k) = (dfa.state_count(), dfa.alphabet_size());
        let d = code_width(n);
        let net = build_binary_threshold_network(&dfa).unwrap();
        for q in 0..n {
            for s in 0..k {
                let mut x = binary_code(q, d).unwrap();
                x.extend(one_hot(s, k).unwrap());
                prop_assert_eq!(net.forward(&x).unwrap(), binary_code(dfa.step(q, s).unwrap(), d).unwrap());
            }
        }
    }

    #[test]
    fn embeddings_equal_iff_states_equal(dfa in arb_dfa(5, 2)) {
        let (n, k) = (dfa.state_count(), dfa.alphabet_size());
        let length = 5;
        let embedding = Array2::from_shape_fn((2, n), |(r, c)| if r == 0 { c as f64 } else { (c * c) as f64 * 0.5 });
        let net = build_embedding_head(&dfa, &embedding, length).unwrap();
        let strings: Vec<Vec<usize>> = strings_up_to(k, length).collect();
        let outputs: Vec<Vec<f64>> = strings
            .iter()
            .map(|x| net.forward(encode_zero_padded(x, length, k).unwrap().data()).unwrap())
            .collect();
        let states: Vec<usize> = strings.iter().map(|x| dfa.run(x).unwrap()).collect();
        for i in 0..strings.len() {
            prop_assert_eq!(&outputs[i], &embedding.column(states[i]).to_vec());
            for j in i + 1..strings.len() {
                prop_assert_eq!(outputs[i] == outputs[j], states[i] == states[j]);
            }
        }
    }
}

#[test]
fn string_encoding_is_injective() {
    for k in 1..=3 {
        for length in 0..=4 {
            let mut seen: Vec<Vec<f64>> =
                strings_of_length(k, length).map(|x| encode_string(&x, k).unwrap().into_data()).collect();
            let total = seen.len();
            seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
            seen.dedup();
            assert_eq!(seen.len(), total);
        }
    }
}

#[test]
fn binary_codes_are_injective() {
    for bits in 1..=8 {
        let mut codes: Vec<Vec<u8>> = (0..1usize << bits)
            .map(|i| binary_code(i, bits).unwrap().iter().map(|&b| b as u8).collect())
            .collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), 1 << bits);
    }
}

#[test]
fn gradients_match_central_differences() {
    let worst = (0..100).map(common::gradient_case).fold(0.0f64, f64::max);
    assert!(worst < 1e-4, "worst relative error {worst}");
}

#[test]
fn zero_gradient_adam_step_is_a_no_op() {
    let mut mlp = init_mlp(&[3, 4, 2], &[Act::Relu, Act::Sigmoid], 9).unwrap();
    let before = mlp.clone();
    let grads: Vec<Gradient> = mlp.layers().iter().map(Gradient::zeros_like).collect();
    let mut adam = AdamState::new(AdamConfig::default(), mlp.layers());
    for _ in 0..3 {
        adam.step(mlp.layers_mut(), &grads);
    }
    assert_eq!(mlp, before);
}

#[test]
fn training_is_reproducible() {
    let inputs = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
    let labels = array![[0.0], [1.0], [1.0], [0.0]];
    let fit = || {
        let mut mlp = init_mlp(&[2, 6, 1], &[Act::Relu, Act::Sigmoid], 4).unwrap();
        train(&mut mlp, inputs.view(), labels.view(), &TrainConfig::new(Loss::Bce).with_epochs(50), None).unwrap();
        mlp
    };
    let (a, b) = (fit(), fit());
    let bits = |m: &dfanet::nn::TrainableMlp| {
        m.layers().iter().flat_map(|l| l.weights.iter().map(|w| w.to_bits()).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn compiled_readouts_are_binary() {
    for dfa in [Dfa::parity(), Dfa::mod_counter(5).unwrap()] {
        let net = build_unrolled_acceptor(&dfa, 6).unwrap();
        for x in strings_of_length(dfa.alphabet_size(), 6) {
            let y = net.forward(encode_string(&x, dfa.alphabet_size()).unwrap().data()).unwrap();
            assert!(y.iter().all(|&v| v == 0.0 || v == 1.0), "{y:?}");
        }
    }
}

#[test]
fn projections_separate_states() {
    for n in 2..=64 {
        for seed in 0..3 {
            common::projection_case(n, seed, 1e-3).unwrap();
        }
    }
    // A margin no projection can reach is reported, not returned.
    assert_eq!(common::projection_case(8, 0, 100.0), Ok(false));
}

#[test]
fn compiled_networks_round_trip() {
    for index in 0..20 {
        common::round_trip_case(index).unwrap();
    }
}
