use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use dfanet::compiler::{
    build_binary_threshold_network, build_compressed_embedding, build_embedding_head, build_transition_layer,
    build_unrolled_acceptor, verify_exact, verify_sampled, VerificationReport, DEFAULT_ENUMERATION_BUDGET,
};
use dfanet::experiments::{run_named, ExperimentConfig, PadEncoding, EXPERIMENT_NAMES};
use dfanet::format::{parse_dfa, parse_network, to_dot, write_network, DfaDocument};
use dfanet::NetworkSpec;

#[derive(Parser)]
#[command(name = "dfanet", version, about = "Compile finite automata into exact feedforward networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a DFA document into a network document.
    Compile {
        dfa: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        /// String length for `unrolled`, `embedding` and `compressed`.
        #[arg(long, short = 'T')]
        length: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Minimum pairwise distance for `compressed`.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Write here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a compiled acceptor against a DFA on every string of one length.
    Verify {
        network: PathBuf,
        dfa: PathBuf,
        /// Defaults to the length recorded in the network document.
        #[arg(long, short = 'T')]
        length: Option<usize>,
        /// Check this many uniformly drawn strings instead of enumerating.
        #[arg(long)]
        sampled: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of strings to enumerate.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u128,
    },
    /// Run a training experiment and print its summary table.
    Experiment {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXPERIMENT_NAMES))]
        name: String,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Write per-seed metrics as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print one line per training epoch to stderr.
        #[arg(long)]
        progress: bool,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        /// Encoding of positions past the end of a^n b^m strings.
        #[arg(long, value_enum, default_value_t = Pad::Symbol)]
        pad: Pad,
    },
    /// Print a Graphviz rendering of a DFA document.
    ExportDot { dfa: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Unrolled,
    Transition,
    Binary,
    Embedding,
    Compressed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pad {
    Symbol,
    Zero,
}

/// Message and exit code of a failed command.
struct Failure(String, u8);

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure(message.to_string(), 2)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_dfa(path: &Path) -> Result<DfaDocument, Failure> {
    parse_dfa(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<NetworkSpec, Failure> {
    parse_network(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn need_length(length: Option<usize>, target: &str) -> Result<usize, Failure> {
    length.ok_or_else(|| usage(format!("--length is required for target {target}")))
}

fn compile(
    dfa: &Path,
    target: Target,
    length: Option<usize>,
    seed: u64,
    epsilon: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let doc = load_dfa(dfa)?;
    let dfa = &doc.dfa;
    let net = match target {
        Target::Unrolled => build_unrolled_acceptor(dfa, need_length(length, "unrolled")?),
        Target::Transition => build_transition_layer(dfa),
        Target::Binary => build_binary_threshold_network(dfa),
        Target::Embedding => {
            let n = dfa.state_count();
            build_embedding_head(dfa, &ndarray::Array2::eye(n), need_length(length, "embedding")?)
        }
        Target::Compressed => {
            let length = need_length(length, "compressed")?;
            build_compressed_embedding(dfa, epsilon, seed).and_then(|e| e.network(dfa, length))
        }
    }
    .map_err(usage)?;
    let summary = format!(
        "depth {}, widths {:?}, parameters {}",
        net.depth(),
        net.widths(),
        net.parameter_count()
    );
    let text = write_network(&net);
    match out {
        Some(path) => {
            write(path, &text)?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn describe(report: &VerificationReport, doc: &DfaDocument) -> Result<(), Failure> {
    let kind = if report.exhaustive { "" } else { " sampled" };
    match report.first_witness() {
        None if report.exhaustive => {
            println!("{}/{} exact", report.matched(), report.total_strings);
            Ok(())
        }
        None => {
            println!("{}/{}{kind} strings matched, no mismatch found", report.matched(), report.total_strings);
            Ok(())
        }
        Some(witness) => {
            println!(
                "{}/{}{kind} strings matched, {} mismatches",
                report.matched(),
                report.total_strings,
                report.mismatches.len()
            );
            println!(
                "first mismatch: {} (dfa {}, network {})",
                doc.render_word(&witness.string),
                if witness.expected { "accepts" } else { "rejects" },
                if witness.actual { "accepts" } else { "rejects" }
            );
            Err(Failure(String::new(), 1))
        }
    }
}

fn verify(
    network: &Path,
    dfa: &Path,
    length: Option<usize>,
    sampled: Option<usize>,
    seed: u64,
    budget: u128,
) -> Result<(), Failure> {
    let net = load_network(network)?;
    let doc = load_dfa(dfa)?;
    let length = length
        .or(net.metadata.length)
        .ok_or_else(|| usage("--length is required: the network does not record one"))?;
    if let Some(source) = &net.metadata.source_dfa {
        if *source != doc.dfa.digest() {
            eprintln!("warning: network was compiled from a different automaton ({source})");
        }
    }
    let report = match sampled {
        Some(samples) => verify_sampled(&net, &doc.dfa, length, samples, seed),
        None => verify_exact(&net, &doc.dfa, length, budget),
    }
    .map_err(usage)?;
    describe(&report, &doc)
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    name: &str,
    seeds: u64,
    out: Option<&Path>,
    progress: bool,
    jobs: usize,
    epochs: usize,
    pad: Pad,
) -> Result<(), Failure> {
    let config = ExperimentConfig {
        seeds: (0..seeds).collect(),
        epochs,
        jobs,
        padding: match pad {
            Pad::Symbol => PadEncoding::Symbol,
            Pad::Zero => PadEncoding::Zero,
        },
        progress: progress.then(|| Arc::new(|line: &str| eprintln!("{line}")) as _),
        ..ExperimentConfig::default()
    };
    let report = run_named(name, &config)
        .ok_or_else(|| usage(format!("unknown experiment {name}")))?
        .map_err(|e| Failure(e.to_string(), 2))?;
    print!("{}", report.render_table());
    if let Some(path) = out {
        write(path, &report.to_csv())?;
    }
    match report.verdict {
        Some(false) => Err(Failure(String::new(), 1)),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile { dfa, target, length, seed, epsilon, out } => {
            compile(&dfa, target, length, seed, epsilon, out.as_deref())
        }
        Command::Verify { network, dfa, length, sampled, seed, budget } => {
            verify(&network, &dfa, length, sampled, seed, budget)
        }
        Command::Experiment { name, seeds, out, progress, jobs, epochs, pad } => {
            experiment(&name, seeds, out.as_deref(), progress, jobs, epochs, pad)
        }
        Command::ExportDot { dfa } => {
            print!("{}", to_dot(&load_dfa(&dfa)?));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(message, code)) => {
            if !message.is_empty() {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}
