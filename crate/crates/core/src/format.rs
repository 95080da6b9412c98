//! Text formats for automata and compiled networks.
//!
//! # Automaton documents
//!
//! ```text
//! # even number of ones
//! dfa 1
//! states even odd
//! symbols 0 1
//! start even
//! accept even
//! even 0 -> even
//! even 1 -> odd
//! odd 0 -> odd
//! odd 1 -> even
//! ```
//!
//! `#` starts a comment. `states` and `symbols` must precede the
//! transitions, every `(state, symbol)` pair needs exactly one transition,
//! and `accept` may be empty. Names are any whitespace-free tokens except
//! `->` and `#`. [`to_dot`] renders a document for Graphviz.
//!
//! # Network documents
//!
//! ```text
//! dfanet-network 1
//! construction transition-lookup
//! source-dfa 5c1d0e8f6a0b3c2d
//! input 4
//! layers 2
//! layer relu 4 4
//! w 1 0 1 0
//! ...
//! b -1 -1 -1 -1
//! layer identity 2 4
//! ...
//! end
//! ```
//!
//! `layer <activation> <outputs> <inputs>` is followed by one `w` line per
//! output row, a `b` line, and for `step-ge` / `step-gt` a `theta` line.
//! Numbers use Rust's shortest round-trip decimal form, so reading a saved
//! network reproduces every weight bit for bit.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::automata::Dfa;
use crate::network::{Activation, LayerSpec, NetworkMetadata, NetworkSpec};

pub const DFA_FORMAT_VERSION: u32 = 1;
pub const NETWORK_FORMAT_VERSION: u32 = 1;

/// A parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }
}

/// Non-empty lines split into tokens, comments removed.
fn tokenize(text: &str) -> Vec<Vec<Token<'_>>> {
    let mut lines = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut rest = content;
        let mut offset = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let after = &rest[start..];
            let len = after.find(char::is_whitespace).unwrap_or(after.len());
            let column = content[..offset + start].chars().count() + 1;
            tokens.push(Token { text: &after[..len], line: index + 1, column });
            offset += start + len;
            rest = &after[len..];
        }
        if !tokens.is_empty() {
            lines.push(tokens);
        }
    }
    lines
}

fn end_of_input(text: &str) -> (usize, usize) {
    (text.lines().count().max(1), 1)
}

fn expect_header(line: Option<&Vec<Token<'_>>>, keyword: &str, version: u32, text: &str) -> Result<(), ParseError> {
    let Some(line) = line else {
        let (line, column) = end_of_input(text);
        return Err(ParseError { line, column, message: format!("empty document, expected `{keyword} {version}`") });
    };
    if line[0].text != keyword {
        return Err(line[0].error(format!("expected `{keyword} {version}` header")));
    }
    match line.get(1) {
        Some(v) if v.text == version.to_string() && line.len() == 2 => Ok(()),
        Some(v) => Err(v.error(format!("unsupported version `{}`, expected {version}", v.text))),
        None => Err(line[0].error("missing format version")),
    }
}

/// An automaton plus the names its states and symbols carry in the text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfaDocument {
    pub states: Vec<String>,
    pub symbols: Vec<String>,
    pub dfa: Dfa,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name != "->" && !name.contains('#') && !name.contains(char::is_whitespace)
}

fn declare<'a>(tokens: &[Token<'a>], what: &str) -> Result<(Vec<String>, HashMap<&'a str, usize>), ParseError> {
    let mut names = Vec::new();
    let mut index = HashMap::new();
    for token in tokens {
        if token.text == "->" {
            return Err(token.error(format!("`->` is not a valid {what} name")));
        }
        if index.insert(token.text, names.len()).is_some() {
            return Err(token.error(format!("duplicate {what} `{}`", token.text)));
        }
        names.push(token.text.to_string());
    }
    Ok((names, index))
}

impl DfaDocument {
    /// Default names: `q0..` for states and `0..` for symbols.
    pub fn from_dfa(dfa: Dfa) -> Self {
        Self {
            states: (0..dfa.state_count()).map(|q| format!("q{q}")).collect(),
            symbols: (0..dfa.alphabet_size()).map(|s| s.to_string()).collect(),
            dfa,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let lines = tokenize(text);
        let mut lines_iter = lines.iter();
        expect_header(lines_iter.next(), "dfa", DFA_FORMAT_VERSION, text)?;

        let mut states: Option<(Vec<String>, HashMap<&str, usize>, Token<'_>)> = None;
        let mut symbols: Option<(Vec<String>, HashMap<&str, usize>)> = None;
        let mut start: Option<Token<'_>> = None;
        let mut accept: Option<Vec<Token<'_>>> = None;
        // keyed by (state, symbol) so memory follows the document, not n * k
        let mut table: HashMap<(usize, usize), usize> = HashMap::new();

        for line in lines_iter {
            let head = line[0];
            let args = &line[1..];
            let once = |seen: bool| {
                if seen {
                    Err(head.error(format!("`{}` given twice", head.text)))
                } else {
                    Ok(())
                }
            };
            let is_transition = line.len() == 4 && line[2].text == "->";
            match head.text {
                "states" if !is_transition => {
                    once(states.is_some())?;
                    if args.is_empty() {
                        return Err(head.error("at least one state is required"));
                    }
                    let (names, index) = declare(args, "state")?;
                    states = Some((names, index, head));
                }
                "symbols" if !is_transition => {
                    once(symbols.is_some())?;
                    if args.is_empty() {
                        return Err(head.error("at least one symbol is required"));
                    }
                    let (names, index) = declare(args, "symbol")?;
                    symbols = Some((names, index));
                }
                "start" if !is_transition => {
                    once(start.is_some())?;
                    match args {
                        [name] => start = Some(*name),
                        [] => return Err(head.error("`start` needs a state name")),
                        [_, extra, ..] => return Err(extra.error("`start` takes a single state")),
                    }
                }
                "accept" if !is_transition => {
                    once(accept.is_some())?;
                    accept = Some(args.to_vec());
                }
                _ => {
                    let (Some((_, state_index, _)), Some((_, symbol_index))) =
                        (&states, &symbols)
                    else {
                        return Err(head.error(format!(
                            "unknown directive `{}` (transitions must follow `states` and `symbols`)",
                            head.text
                        )));
                    };
                    let [from, symbol, arrow, to] = line.as_slice() else {
                        let at = line.get(4).unwrap_or(&line[line.len() - 1]);
                        return Err(at.error("expected `<state> <symbol> -> <state>`"));
                    };
                    if arrow.text != "->" {
                        return Err(arrow.error("expected `->`"));
                    }
                    let lookup = |t: &Token<'_>, map: &HashMap<&str, usize>, what: &str| {
                        map.get(t.text).copied().ok_or_else(|| t.error(format!("unknown {what} `{}`", t.text)))
                    };
                    let q = lookup(from, state_index, "state")?;
                    let s = lookup(symbol, symbol_index, "symbol")?;
                    let target = lookup(to, state_index, "state")?;
                    if table.insert((q, s), target).is_some() {
                        return Err(from.error(format!(
                            "duplicate transition for ({}, {})",
                            from.text, symbol.text
                        )));
                    }
                }
            }
        }

        let (line, column) = end_of_input(text);
        let missing = |what: &str| ParseError { line, column, message: format!("missing `{what}` directive") };
        let (state_names, state_index, states_at) = states.ok_or_else(|| missing("states"))?;
        let (symbol_names, _) = symbols.ok_or_else(|| missing("symbols"))?;
        let start_token = start.ok_or_else(|| missing("start"))?;
        let accept_tokens = accept.ok_or_else(|| missing("accept"))?;

        let resolve = |t: &Token<'_>| {
            state_index.get(t.text).copied().ok_or_else(|| t.error(format!("unknown state `{}`", t.text)))
        };
        let start_state = resolve(&start_token)?;
        let mut accepting = Vec::new();
        for t in &accept_tokens {
            let q = resolve(t)?;
            if accepting.contains(&q) {
                return Err(t.error(format!("state `{}` listed twice", t.text)));
            }
            accepting.push(q);
        }

        let k = symbol_names.len();
        let mut full = Vec::with_capacity(table.len());
        for slot in 0..state_names.len() * k {
            match table.get(&(slot / k, slot % k)) {
                Some(&target) => full.push(target),
                None => {
                    return Err(ParseError {
                        line,
                        column,
                        message: format!(
                            "missing transition for ({}, {}); states declared at line {}",
                            state_names[slot / k],
                            symbol_names[slot % k],
                            states_at.line
                        ),
                    })
                }
            }
        }
        let dfa = Dfa::new(state_names.len(), k, full, start_state, accepting)
            .map_err(|e| ParseError { line, column, message: e.to_string() })?;
        Ok(Self { states: state_names, symbols: symbol_names, dfa })
    }

    /// Canonical text: directives in fixed order, transitions state-major.
    pub fn to_text(&self) -> String {
        let mut out = format!("dfa {DFA_FORMAT_VERSION}\n");
        let _ = writeln!(out, "states {}", self.states.join(" "));
        let _ = writeln!(out, "symbols {}", self.symbols.join(" "));
        let _ = writeln!(out, "start {}", self.states[self.dfa.start()]);
        let accepting: Vec<&str> = self.dfa.accepting_states().iter().map(|&q| self.states[q].as_str()).collect();
        if accepting.is_empty() {
            out.push_str("accept\n");
        } else {
            let _ = writeln!(out, "accept {}", accepting.join(" "));
        }
        for q in 0..self.dfa.state_count() {
            for (s, symbol) in self.symbols.iter().enumerate() {
                let target = self.dfa.step(q, s).expect("in range");
                let _ = writeln!(out, "{} {} -> {}", self.states[q], symbol, self.states[target]);
            }
        }
        out
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    /// Symbol names joined; single-character alphabets are written without separators.
    pub fn render_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let compact = self.symbols.iter().all(|s| s.chars().count() == 1);
        let names = word.iter().map(|&s| self.symbols.get(s).map_or("?", String::as_str));
        if compact {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(" ")
        }
    }

    /// Checks that every name is usable in the text form.
    pub fn names_are_valid(&self) -> bool {
        let unique = |names: &[String]| {
            let mut sorted: Vec<&String> = names.iter().collect();
            sorted.sort();
            sorted.windows(2).all(|w| w[0] != w[1])
        };
        self.states.iter().chain(&self.symbols).all(|n| valid_name(n))
            && unique(&self.states)
            && unique(&self.symbols)
            && self.states.len() == self.dfa.state_count()
            && self.symbols.len() == self.dfa.alphabet_size()
    }
}

impl fmt::Display for DfaDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn parse_dfa(text: &str) -> Result<DfaDocument, ParseError> {
    DfaDocument::parse(text)
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering: one node per state (accepting states double-circled),
/// one edge per transition, in state-major order.
pub fn to_dot(doc: &DfaDocument) -> String {
    let mut out = String::from("digraph dfa {\n    rankdir=LR;\n    __start [shape=point];\n");
    for (q, name) in doc.states.iter().enumerate() {
        let shape = if doc.dfa.is_accepting(q) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "    {} [shape={shape}];", dot_id(name));
    }
    let _ = writeln!(out, "    __start -> {};", dot_id(&doc.states[doc.dfa.start()]));
    for q in 0..doc.dfa.state_count() {
        for (s, symbol) in doc.symbols.iter().enumerate() {
            let target = doc.dfa.step(q, s).expect("in range");
            let _ = writeln!(
                out,
                "    {} -> {} [label={}];",
                dot_id(&doc.states[q]),
                dot_id(&doc.states[target]),
                dot_id(symbol)
            );
        }
    }
    out.push_str("}\n");
    out
}

fn write_numbers<'a>(out: &mut String, prefix: &str, values: impl Iterator<Item = &'a f64>) {
    out.push_str(prefix);
    for v in values {
        // Display drops the sign of NaN
        if v.is_nan() && v.is_sign_negative() {
            out.push_str(" -NaN");
        } else {
            let _ = write!(out, " {v}");
        }
    }
    out.push('\n');
}

/// Serializes a network; see the module docs for the layout.
pub fn write_network(net: &NetworkSpec) -> String {
    let mut out = format!("dfanet-network {NETWORK_FORMAT_VERSION}\n");
    let meta = &net.metadata;
    let _ = writeln!(out, "construction {}", meta.construction);
    if let Some(digest) = &meta.source_dfa {
        let _ = writeln!(out, "source-dfa {digest}");
    }
    if let Some(length) = meta.length {
        let _ = writeln!(out, "length {length}");
    }
    if let Some(seed) = meta.seed {
        let _ = writeln!(out, "seed {seed}");
    }
    let _ = writeln!(out, "input {}", net.input_dim());
    let _ = writeln!(out, "layers {}", net.depth());
    for layer in net.layers() {
        let _ = writeln!(out, "layer {} {} {}", layer.activation.tag(), layer.output_dim(), layer.input_dim());
        for row in layer.weights.rows() {
            write_numbers(&mut out, "w", row.iter());
        }
        write_numbers(&mut out, "b", layer.bias.iter());
        if let Some(theta) = layer.activation.thresholds() {
            write_numbers(&mut out, "theta", theta.iter());
        }
    }
    out.push_str("end\n");
    out
}

struct Lines<'t, 'a> {
    lines: std::slice::Iter<'t, Vec<Token<'a>>>,
    text: &'a str,
}

impl<'t, 'a> Lines<'t, 'a> {
    fn next(&mut self, expected: &str) -> Result<&'t [Token<'a>], ParseError> {
        self.lines.next().map(Vec::as_slice).ok_or_else(|| {
            let (line, column) = end_of_input(self.text);
            ParseError { line, column, message: format!("unexpected end of document, expected `{expected}`") }
        })
    }

    fn keyed(&mut self, key: &str) -> Result<(Token<'a>, &'t [Token<'a>]), ParseError> {
        let line = self.next(key)?;
        if line[0].text != key {
            return Err(line[0].error(format!("expected `{key}`, found `{}`", line[0].text)));
        }
        Ok((line[0], &line[1..]))
    }
}

fn count(token: &Token<'_>) -> Result<usize, ParseError> {
    token.text.parse().map_err(|_| token.error(format!("`{}` is not a count", token.text)))
}

fn parse_count(head: Token<'_>, args: &[Token<'_>]) -> Result<usize, ParseError> {
    match args {
        [value] => count(value),
        _ => Err(head.error(format!("`{}` takes one count", head.text))),
    }
}

fn parse_row(head: Token<'_>, args: &[Token<'_>], width: usize) -> Result<Vec<f64>, ParseError> {
    if args.len() != width {
        return Err(head.error(format!("expected {width} values, found {}", args.len())));
    }
    args.iter()
        .map(|t| t.text.parse::<f64>().map_err(|_| t.error(format!("`{}` is not a number", t.text))))
        .collect()
}

/// Reads a document written by [`write_network`].
pub fn parse_network(text: &str) -> Result<NetworkSpec, ParseError> {
    let tokens = tokenize(text);
    let mut lines = Lines { lines: tokens.iter(), text };
    expect_header(lines.lines.next(), "dfanet-network", NETWORK_FORMAT_VERSION, text)?;

    let mut metadata = NetworkMetadata::default();
    let input_dim = loop {
        let line = lines.next("input")?;
        let (head, args) = (line[0], &line[1..]);
        let single = || match args {
            [value] => Ok(*value),
            _ => Err(head.error(format!("`{}` takes one value", head.text))),
        };
        match head.text {
            "construction" => {
                let value = single()?;
                metadata.construction = value.text.parse().map_err(|e: String| value.error(e))?;
            }
            "source-dfa" => metadata.source_dfa = Some(single()?.text.to_string()),
            "length" => metadata.length = Some(parse_count(head, args)?),
            "seed" => {
                let value = single()?;
                metadata.seed =
                    Some(value.text.parse().map_err(|_| value.error(format!("`{}` is not a seed", value.text)))?);
            }
            "input" => break parse_count(head, args)?,
            other => return Err(head.error(format!("unknown metadata key `{other}`"))),
        }
    };

    let (head, args) = lines.keyed("layers")?;
    let depth = parse_count(head, args)?;
    let mut layers = Vec::new();
    let mut width = input_dim;
    for _ in 0..depth {
        let (head, args) = lines.keyed("layer")?;
        let [tag, outputs, inputs] = args else {
            return Err(head.error("expected `layer <activation> <outputs> <inputs>`"));
        };
        let outputs = count(outputs)?;
        let declared_inputs = count(inputs)?;
        if declared_inputs != width {
            return Err(inputs.error(format!("layer takes {declared_inputs} inputs but receives {width}")));
        }
        // rows are read one by one so memory follows the document, not the declared shape
        let mut weights = Vec::new();
        for _ in 0..outputs {
            let (w, values) = lines.keyed("w")?;
            weights.extend(parse_row(w, values, declared_inputs)?);
        }
        let (b, values) = lines.keyed("b")?;
        let bias = parse_row(b, values, outputs)?;
        let activation = match tag.text {
            "identity" => Activation::Identity,
            "relu" => Activation::Relu,
            "sigmoid" => Activation::Sigmoid,
            "step-ge" | "step-gt" => {
                let (theta, values) = lines.keyed("theta")?;
                let thresholds = parse_row(theta, values, outputs)?;
                if tag.text == "step-ge" {
                    Activation::StepAtLeast(thresholds)
                } else {
                    Activation::StepAbove(thresholds)
                }
            }
            other => return Err(tag.error(format!("unknown activation `{other}`"))),
        };
        let weights = Array2::from_shape_vec((outputs, declared_inputs), weights).expect("rows checked");
        layers.push(LayerSpec::new(weights, Array1::from(bias), activation));
        width = outputs;
    }
    let (end, rest) = lines.keyed("end")?;
    if let Some(extra) = rest.first() {
        return Err(extra.error("unexpected token after `end`"));
    }
    if let Some(extra) = lines.lines.next() {
        return Err(extra[0].error("content after `end`"));
    }
    NetworkSpec::new(input_dim, layers, metadata).map_err(|e| end.error(e.to_string()))
}
