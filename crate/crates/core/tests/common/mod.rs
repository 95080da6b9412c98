//! Independent oracles shared by the property suites and the acceptance run.
#![allow(dead_code)]

use dfanet::automata::strings_up_to;
use dfanet::compiler::{
    build_binary_threshold_network, build_compressed_embedding, build_embedding_head, build_transition_layer,
    build_unrolled_acceptor, min_column_distance, CompileError,
};
use dfanet::encodings::code_width;
use dfanet::experiments::random_dfa;
use dfanet::format::{parse_network, write_network};
use dfanet::nn::{init_mlp, Act, Loss, Model, UnrolledConfig, UnrolledNet};
use dfanet::{Dfa, NetworkSpec};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimal state count by pairwise table filling over the reachable states.
pub fn table_filling_state_count(dfa: &Dfa) -> usize {
    let n = dfa.state_count();
    let k = dfa.alphabet_size();
    let mut reachable = vec![false; n];
    let mut stack = vec![dfa.start()];
    reachable[dfa.start()] = true;
    while let Some(q) = stack.pop() {
        for s in 0..k {
            let t = dfa.step(q, s).unwrap();
            if !reachable[t] {
                reachable[t] = true;
                stack.push(t);
            }
        }
    }
    let states: Vec<usize> = (0..n).filter(|&q| reachable[q]).collect();
    let mut distinct = vec![vec![false; n]; n];
    for &p in &states {
        for &q in &states {
            distinct[p][q] = dfa.is_accepting(p) != dfa.is_accepting(q);
        }
    }
    loop {
        let mut changed = false;
        for &p in &states {
            for &q in &states {
                if distinct[p][q] {
                    continue;
                }
                let split = (0..k).any(|s| distinct[dfa.step(p, s).unwrap()][dfa.step(q, s).unwrap()]);
                if split {
                    distinct[p][q] = true;
                    distinct[q][p] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut representatives: Vec<usize> = Vec::new();
    for &q in &states {
        if representatives.iter().all(|&r| distinct[r][q]) {
            representatives.push(q);
        }
    }
    representatives.len()
}

pub fn same_language_up_to(a: &Dfa, b: &Dfa, max_length: usize) -> bool {
    a.alphabet_size() == b.alphabet_size()
        && strings_up_to(a.alphabet_size(), max_length).all(|x| a.accepts(&x).unwrap() == b.accepts(&x).unwrap())
}

/// A seeded random automaton with `n <= max_states`, `k <= max_symbols`.
pub fn seeded_dfa(seed: u64, max_states: usize, max_symbols: usize) -> Dfa {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_symbols);
    random_dfa(n, k, rng.gen()).unwrap()
}

/// Hopcroft output matches the table-filling count and the input language.
pub fn minimization_case(seed: u64) -> Result<(), String> {
    let dfa = seeded_dfa(seed, 10, 3);
    let minimal = dfa.minimize();
    let oracle = table_filling_state_count(&dfa);
    if minimal.state_count() != oracle {
        return Err(format!("seed {seed}: {} states, oracle {oracle}", minimal.state_count()));
    }
    if !same_language_up_to(&dfa, &minimal, 8) {
        return Err(format!("seed {seed}: languages differ"));
    }
    Ok(())
}

fn flat(model: &impl Model) -> Vec<f64> {
    model.layers().iter().flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied().collect::<Vec<_>>()).collect()
}

fn set_flat(model: &mut impl Model, values: &[f64]) {
    let mut it = values.iter();
    for layer in model.layers_mut() {
        for w in layer.weights.iter_mut().chain(layer.bias.iter_mut()) {
            *w = *it.next().unwrap();
        }
    }
}

fn relative_error(model: &mut impl Model, inputs: &Array2<f64>, labels: &Array2<f64>, loss: Loss) -> f64 {
    let (_, grads) = model.loss_and_gradients(inputs.view(), labels.view(), loss).unwrap();
    let analytic: Vec<f64> =
        grads.iter().flat_map(|g| g.weights.iter().chain(g.bias.iter()).copied().collect::<Vec<_>>()).collect();
    let base = flat(model);
    let h = 1e-5;
    let mut numeric = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        let mut probe = base.clone();
        probe[i] = base[i] + h;
        set_flat(model, &probe);
        let up = model.loss_and_gradients(inputs.view(), labels.view(), loss).unwrap().0;
        probe[i] = base[i] - h;
        set_flat(model, &probe);
        let down = model.loss_and_gradients(inputs.view(), labels.view(), loss).unwrap().0;
        numeric.push((up - down) / (2.0 * h));
    }
    set_flat(model, &base);
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
    let scale = norm(&analytic) + norm(&numeric);
    if scale < 1e-12 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

fn random_acts(rng: &mut ChaCha8Rng, count: usize) -> Vec<Act> {
    (0..count).map(|_| [Act::Identity, Act::Relu, Act::Sigmoid][rng.gen_range(0..3)]).collect()
}

/// Relative gradient error `‖g − g_fd‖ / (‖g‖ + ‖g_fd‖)` for one seeded model.
///
/// Even seeds check a plain MLP with dims at most `[6, 8, 4]`; odd seeds an
/// unrolled network with a short input.
pub fn gradient_case(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = rng.gen_range(1..=5);
    let loss = [Loss::Bce, Loss::Mse, Loss::SoftmaxCrossEntropy][rng.gen_range(0..3)];
    let out_act = match loss {
        Loss::Bce => Act::Sigmoid,
        Loss::SoftmaxCrossEntropy => Act::Identity,
        Loss::Mse => random_acts(&mut rng, 1)[0],
    };
    let normal = rand_distr::StandardNormal;
    if seed.is_multiple_of(2) {
        let depth = rng.gen_range(1..=2);
        let mut dims = vec![rng.gen_range(1..=6)];
        if depth == 2 {
            dims.push(rng.gen_range(1..=8));
        }
        dims.push(rng.gen_range(1..=4));
        let mut acts = random_acts(&mut rng, depth - 1);
        acts.push(out_act);
        let mut mlp = init_mlp(&dims, &acts, rng.gen()).unwrap();
        for layer in mlp.layers_mut() {
            layer.bias.mapv_inplace(|_| rng.gen_range(-0.5..0.5));
        }
        let inputs = Array2::from_shape_simple_fn((rows, dims[0]), || rng.sample::<f64, _>(normal));
        let labels = labels(&mut rng, rows, *dims.last().unwrap(), loss);
        relative_error(&mut mlp, &inputs, &labels, loss)
    } else {
        let k = rng.gen_range(1..=3);
        let outputs = rng.gen_range(1..=3);
        let config = UnrolledConfig {
            length: rng.gen_range(0..=3),
            alphabet_size: k,
            state_dim: rng.gen_range(1..=4),
            hidden_width: if rng.gen_bool(0.5) { Some(rng.gen_range(1..=5)) } else { None },
            state_act: random_acts(&mut rng, 1)[0],
            initial_state: 0,
            head: vec![(outputs, out_act)],
        };
        let length = config.length;
        let mut net = UnrolledNet::new(config, rng.gen()).unwrap();
        let inputs = Array2::from_shape_simple_fn((rows, length * k), || rng.sample::<f64, _>(normal));
        let labels = labels(&mut rng, rows, outputs, loss);
        relative_error(&mut net, &inputs, &labels, loss)
    }
}

fn labels(rng: &mut ChaCha8Rng, rows: usize, cols: usize, loss: Loss) -> Array2<f64> {
    match loss {
        Loss::Bce => Array2::from_shape_simple_fn((rows, cols), || if rng.gen_bool(0.5) { 1.0 } else { 0.0 }),
        Loss::Mse => Array2::from_shape_simple_fn((rows, cols), || rng.gen_range(-1.0..1.0)),
        Loss::SoftmaxCrossEntropy => {
            let mut y = Array2::zeros((rows, cols));
            for mut row in y.rows_mut() {
                row[rng.gen_range(0..cols)] = 1.0;
            }
            y
        }
    }
}

/// Checks the separation postcondition of one compressed embedding.
/// `Ok(false)` means the builder declined (separation not reached).
pub fn projection_case(n: usize, seed: u64, epsilon: f64) -> Result<bool, String> {
    let dfa = Dfa::mod_counter(n).unwrap();
    match build_compressed_embedding(&dfa, epsilon, seed) {
        Ok(embedding) => {
            let distance = min_column_distance(&embedding.projection);
            if embedding.dim() != code_width(n) + 1 || embedding.projection.ncols() != n {
                return Err(format!("n={n}: projection shape {:?}", embedding.projection.dim()));
            }
            if distance.partial_cmp(&epsilon) != Some(std::cmp::Ordering::Greater) || distance != embedding.min_distance {
                return Err(format!("n={n} seed={seed}: min distance {distance}, reported {}", embedding.min_distance));
            }
            Ok(true)
        }
        Err(CompileError::SeparationNotReached { .. }) => Ok(false),
        Err(e) => Err(format!("n={n}: {e}")),
    }
}

/// The `index`-th network of a fixed mix of constructions over random automata.
pub fn compiled_network(index: u64) -> NetworkSpec {
    let mut dfa = seeded_dfa(1000 + index, 6, 3);
    if dfa.state_count() < 2 {
        dfa = Dfa::mod_counter(3).unwrap();
    }
    let length = (index % 4) as usize;
    match index % 5 {
        0 => build_unrolled_acceptor(&dfa, length + 1),
        1 => build_transition_layer(&dfa),
        2 => build_binary_threshold_network(&dfa),
        3 => build_embedding_head(&dfa, &Array2::eye(dfa.state_count()), length),
        _ => build_compressed_embedding(&dfa, 1e-3, index).and_then(|e| e.network(&dfa, length)),
    }
    .unwrap()
}

fn bits(net: &NetworkSpec) -> Vec<u64> {
    net.layers().iter().flat_map(|l| l.weights.iter().chain(l.bias.iter()).map(|v| v.to_bits()).collect::<Vec<_>>()).collect()
}

/// Save/load leaves every weight bit and every output unchanged.
pub fn round_trip_case(index: u64) -> Result<(), String> {
    let net = compiled_network(index);
    let text = write_network(&net);
    let back = parse_network(&text).map_err(|e| format!("network {index}: {e}"))?;
    if bits(&back) != bits(&net) || back != net {
        return Err(format!("network {index}: weights changed"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(index);
    for _ in 0..16 {
        let x: Vec<f64> = (0..net.input_dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (a, b) = (net.forward(&x).unwrap(), back.forward(&x).unwrap());
        if a.iter().map(|v| v.to_bits()).ne(b.iter().map(|v| v.to_bits())) {
            return Err(format!("network {index}: outputs differ"));
        }
    }
    if write_network(&back) != text {
        return Err(format!("network {index}: text not stable"));
    }
    Ok(())
}
