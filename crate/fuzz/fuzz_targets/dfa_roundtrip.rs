#![no_main]

use dfanet::format::{parse_dfa, DfaDocument};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_dfa(text) else { return };
    let canonical = doc.to_text();
    let again: DfaDocument = parse_dfa(&canonical).expect("canonical text parses");
    assert_eq!(again, doc);
    assert_eq!(again.to_text(), canonical);
    let minimal = doc.dfa.minimize();
    assert!(minimal.state_count() <= doc.dfa.state_count());
});
