use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn dfanet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfanet")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn compile(dir: &Path, dfa: &str, target: &str, length: Option<usize>) -> PathBuf {
    let out = dir.join(format!("{target}.net"));
    let dfa = data(dfa);
    let mut args = vec!["compile", dfa.to_str().unwrap(), "--target", target, "--out", out.to_str().unwrap()];
    let length = length.map(|t| t.to_string());
    if let Some(t) = &length {
        args.extend(["-T", t]);
    }
    let result = dfanet(&args);
    assert!(result.status.success(), "{}", stderr(&result));
    out
}

#[test]
fn unrolled_parity_has_one_layer_per_symbol_plus_readout() {
    let dir = tempfile::tempdir().unwrap();
    let path = compile(dir.path(), "parity.dfa", "unrolled", Some(4));
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("layer ")).count(), 5);
    assert!(text.starts_with("dfanet-network 1"));
}

#[test]
fn summary_reports_depth() {
    let out = dfanet(&["compile", data("parity.dfa").to_str().unwrap(), "--target", "unrolled", "-T", "4"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("depth 5"), "{}", stderr(&out));
    assert!(stdout(&out).ends_with("end\n"));
}

#[test]
fn transition_layer_hidden_width_is_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let path = compile(dir.path(), "parity.dfa", "transition", None);
    let text = fs::read_to_string(path).unwrap();
    let first = text.lines().find(|l| l.starts_with("layer ")).unwrap();
    assert_eq!(first.split_whitespace().nth(2), Some("4"), "{first}");
}

#[test]
fn malformed_dfa_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dfa");
    fs::write(&path, "dfa 1\nstates a b\nsymbols 0\nstart a\naccept a\na 0 -> c\nb 0 -> a\n").unwrap();
    let out = dfanet(&["compile", path.to_str().unwrap(), "--target", "transition"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 6, column"), "{}", stderr(&out));
}

#[test]
fn verify_parity_seven_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let net = compile(dir.path(), "parity.dfa", "unrolled", Some(7));
    let out = dfanet(&["verify", net.to_str().unwrap(), data("parity.dfa").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "128/128 exact");
}

#[test]
fn corrupted_network_yields_witness() {
    let dir = tempfile::tempdir().unwrap();
    let net = compile(dir.path(), "parity.dfa", "unrolled", Some(3));
    let text = fs::read_to_string(&net).unwrap();
    // Flip the readout bias so every verdict inverts.
    let lines: Vec<String> = text.lines().map(String::from).collect();
    let last_bias = lines.iter().rposition(|l| l.starts_with("b ")).unwrap();
    let mut corrupted = lines.clone();
    corrupted[last_bias] = "b 100".into();
    fs::write(&net, corrupted.join("\n") + "\n").unwrap();
    let out = dfanet(&["verify", net.to_str().unwrap(), data("parity.dfa").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let report = stdout(&out);
    assert!(report.contains("first mismatch: "), "{report}");
    assert!(report.contains("dfa rejects, network accepts"), "{report}");
}

#[test]
fn enumeration_budget_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let net = compile(dir.path(), "parity.dfa", "unrolled", Some(30));
    let parity = data("parity.dfa");
    let out = dfanet(&["verify", net.to_str().unwrap(), parity.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("budget"), "{}", stderr(&out));
    let sampled = dfanet(&["verify", net.to_str().unwrap(), parity.to_str().unwrap(), "--sampled", "500"]);
    assert_eq!(sampled.status.code(), Some(0), "{}", stderr(&sampled));
}

#[test]
fn digest_mismatch_warns() {
    let dir = tempfile::tempdir().unwrap();
    let net = compile(dir.path(), "mod4.dfa", "unrolled", Some(3));
    let out = dfanet(&["verify", net.to_str().unwrap(), data("parity.dfa").to_str().unwrap()]);
    assert!(stderr(&out).contains("warning"), "{}", stderr(&out));
}

fn count_dot(dfa: &str) -> (usize, usize) {
    let out = dfanet(&["export-dot", data(dfa).to_str().unwrap()]);
    assert!(out.status.success());
    let dot = stdout(&out);
    let nodes = dot.lines().filter(|l| l.contains("shape=") && !l.contains("__start")).count();
    let edges = dot.lines().filter(|l| l.contains("->") && !l.contains("__start")).count();
    (nodes, edges)
}

#[test]
fn export_dot_counts() {
    assert_eq!(count_dot("parity.dfa"), (2, 4));
    assert_eq!(count_dot("mod4.dfa"), (4, 8));
    let first = dfanet(&["export-dot", data("abc-suffix.dfa").to_str().unwrap()]);
    let second = dfanet(&["export-dot", data("abc-suffix.dfa").to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let out = dfanet(&["experiment", "thm9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_writes_sorted_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("thm3.csv");
    let out = dfanet(&["experiment", "thm3", "--seeds", "2", "--epochs", "5", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("seeds"));
    let text = fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "config,seed,metric,value");
    assert!(lines[1].contains(",0,"));
    assert_eq!(lines.len(), 1 + 2 * 2);
}
