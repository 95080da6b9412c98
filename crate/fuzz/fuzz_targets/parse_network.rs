#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = dfanet::format::parse_network(text) {
        // evaluation must not panic on anything the parser accepts
        let _ = net.forward(&vec![0.0; net.input_dim()]);
    }
});
