use std::fs;
use std::path::{Path, PathBuf};

use dfanet::compiler::{build_unrolled_acceptor, verify_exact};
use dfanet::format::{parse_dfa, parse_network, to_dot, write_network, DfaDocument};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    out
}

#[test]
fn shipped_automata_parse_and_compile() {
    let mut seen = 0;
    for path in files(&root().join("data")) {
        let doc = parse_dfa(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(parse_dfa(&doc.to_text()).unwrap(), doc);
        let net = build_unrolled_acceptor(&doc.dfa, 6).unwrap();
        assert!(verify_exact(&net, &doc.dfa, 6, 1 << 20).unwrap().exact());
        seen += 1;
    }
    assert!(seen >= 3);
}

#[test]
fn dot_export_counts() {
    let parity = parse_dfa(&fs::read_to_string(root().join("data/parity.dfa")).unwrap()).unwrap();
    let dot = to_dot(&parity);
    assert_eq!(dot.matches("doublecircle").count(), 1);
    assert_eq!(dot.lines().filter(|l| l.contains("->") && !l.contains("__start")).count(), 4);
    let counter = DfaDocument::from_dfa(dfanet::Dfa::mod_counter(4).unwrap());
    assert_eq!(to_dot(&counter).lines().filter(|l| l.contains("->") && !l.contains("__start")).count(), 8);
}

#[test]
fn dfa_seeds_never_panic() {
    for path in files(&root().join("fuzz/corpus/parse_dfa")) {
        let text = String::from_utf8_lossy(&fs::read(&path).unwrap()).into_owned();
        if let Ok(doc) = parse_dfa(&text) {
            assert_eq!(parse_dfa(&doc.to_text()).unwrap().dfa, doc.dfa);
        }
    }
}

#[test]
fn network_seeds_round_trip() {
    let mut parsed = 0;
    for path in files(&root().join("fuzz/corpus/parse_network")) {
        let text = String::from_utf8_lossy(&fs::read(&path).unwrap()).into_owned();
        if let Ok(net) = parse_network(&text) {
            assert_eq!(parse_network(&write_network(&net)).unwrap(), net);
            parsed += 1;
        }
    }
    assert!(parsed >= 5);
}
