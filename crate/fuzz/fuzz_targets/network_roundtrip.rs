#![no_main]

use dfanet::format::{parse_network, write_network};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(net) = parse_network(text) else { return };
    let written = write_network(&net);
    let again = parse_network(&written).expect("written network parses");
    assert_eq!(write_network(&again), written);
    for (a, b) in again.layers().iter().zip(net.layers()) {
        let bits = |l: &dfanet::network::LayerSpec| {
            l.weights.iter().chain(l.bias.iter()).map(|v| v.to_bits()).collect::<Vec<_>>()
        };
        assert_eq!(bits(a), bits(b));
    }
});
