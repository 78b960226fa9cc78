//! `scc-preserve`: generate graph families, build and verify fault-tolerant connectivity
//! preservers, and inspect the structures the constructions rely on.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error, 3 capability limit.

mod commands;
mod input;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "scc-preserve", version, about = "Fault-tolerant strong-connectivity preservers")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Add `wall_time_ms` to JSON output. Off by default so output is reproducible byte for byte.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated graph in the text format, plus a `.meta.json` sidecar for families.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Build a preserver and report its kept edges.
    Build(BuildArgs),
    /// Check a preserver against its graph; exits 1 with a counterexample when it fails.
    Verify(VerifyArgs),
    /// Build the expander hierarchy and print its levels and certificates.
    Hierarchy(HierarchyArgs),
    /// Split the vertices into unbreakable parts.
    Decompose(DecomposeArgs),
    /// Important-cut container between two vertex sets.
    Impcut(ImpcutArgs),
    /// Critical edges of a graph, or the criticality witness of one edge.
    Critical(CriticalArgs),
    /// Run every construction on a fixed corpus and print a size table.
    Bench(BenchArgs),
}

#[derive(Subcommand, Debug)]
enum GenFamily {
    /// Out-tree with 2^k leaves, all leaf-to-sink edges, sinks back to the root.
    Baswana {
        #[arg(short)]
        k: usize,
        #[arg(short, long, default_value_t = 1)]
        y: usize,
        #[arg(short, long)]
        output: std::path::PathBuf,
    },
    /// Layered s-t instance whose cross edges all need to be kept.
    StLower {
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(short, default_value_t = 2)]
        k: usize,
        #[arg(short, long)]
        output: std::path::PathBuf,
    },
    /// Tree instance with one witness per cross edge under bounded-degree faults.
    BoundedDegree {
        #[arg(short, long)]
        x: usize,
        #[arg(short, long, default_value_t = 1)]
        y: usize,
        #[arg(short, long)]
        output: std::path::PathBuf,
    },
    /// Colored tree instance where failing color i leaves only leaf i reachable.
    Color {
        #[arg(short, long)]
        x: usize,
        #[arg(short, long, default_value_t = 1)]
        y: usize,
        #[arg(short, long)]
        output: std::path::PathBuf,
    },
    /// Seeded random multigraph.
    Random {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lay down a random Hamiltonian cycle before the random edges.
        #[arg(long)]
        strongly_connected: bool,
        #[arg(short, long)]
        output: std::path::PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VariantArg {
    AllPairs,
    SingleSource,
    St,
    Global,
    Sourcewise,
    Kconn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algo {
    Greedy,
    Hierarchy,
    Fpt,
    /// Single-source, global and s-t preservers assembled by the standard reductions.
    Reduction,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DirectionArg {
    Out,
    In,
}

/// Graph file plus the pair selection of a variant.
#[derive(Args, Debug)]
struct Target {
    /// Graph in the text format.
    #[arg(value_name = "GRAPH")]
    graph_pos: Option<std::path::PathBuf>,
    #[arg(long, conflicts_with = "graph_pos")]
    graph: Option<std::path::PathBuf>,
    #[arg(long)]
    source: Option<usize>,
    #[arg(short, long)]
    s: Option<usize>,
    #[arg(short, long)]
    t: Option<usize>,
    /// Comma-separated source vertices for the sourcewise variant.
    #[arg(long, value_delimiter = ',')]
    sources: Vec<usize>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_enum, default_value = "all-pairs")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "greedy")]
    algo: Algo,
    #[arg(short)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop the randomized construction once this many edges remain.
    #[arg(long)]
    stop_threshold: Option<usize>,
    /// Check only demand pairs during k-connectivity removals.
    #[arg(long)]
    demand_pairs: bool,
    /// Write the JSON report here as well.
    #[arg(short, long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    target: Target,
    /// JSON with a `kept_edges` array, as written by `build`.
    #[arg(long)]
    preserver: std::path::PathBuf,
    /// Defaults to the variant recorded in the preserver file.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Defaults to the `k` recorded in the preserver file.
    #[arg(short)]
    k: Option<usize>,
    /// Decide via minimal symmetric cuts instead of fault enumeration.
    #[arg(long)]
    by_cuts: bool,
    #[arg(long, default_value_t = 1)]
    shards: usize,
}

#[derive(Args, Debug)]
struct HierarchyArgs {
    #[command(flatten)]
    target: Target,
    #[arg(short, default_value_t = 1)]
    k: usize,
    /// Defaults to `2k`.
    #[arg(short)]
    q: Option<usize>,
    #[arg(long, default_value = "1/2")]
    phi: String,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    target: Target,
    #[arg(short, default_value_t = 1)]
    k: usize,
    /// Defaults to `⌈√(nk)⌉`.
    #[arg(short)]
    q: Option<usize>,
}

#[derive(Args, Debug)]
struct ImpcutArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    y: Vec<usize>,
    #[arg(short)]
    k: usize,
    #[arg(long, value_enum, default_value = "out")]
    direction: DirectionArg,
    /// Also list every important cut by exhaustive search.
    #[arg(long)]
    enumerate: bool,
}

#[derive(Args, Debug)]
struct CriticalArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_enum, default_value = "all-pairs")]
    variant: VariantArg,
    #[arg(short)]
    k: usize,
    /// Report the witness for this edge id only.
    #[arg(long)]
    edge: Option<usize>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(short, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random graphs added to the fixed families.
    #[arg(long, default_value_t = 4)]
    random: usize,
    /// Check every output with its oracle.
    #[arg(long)]
    verify: bool,
}

/// How a command finished when it did not fail with an error.
pub enum Outcome {
    Success,
    VerificationFailed,
}

pub struct Report {
    pub json: Value,
    pub summary: String,
    pub outcome: Outcome,
}

impl Report {
    pub fn ok(json: Value, summary: impl Into<String>) -> Self {
        Self { json, summary: summary.into(), outcome: Outcome::Success }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<scc_preserve::Error>() {
        Some(scc_preserve::Error::Capability(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.command {
        Command::Gen { family } => commands::gen(family),
        Command::Build(a) => commands::build(a),
        Command::Verify(a) => commands::verify(a),
        Command::Hierarchy(a) => commands::hierarchy(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Impcut(a) => commands::impcut(a),
        Command::Critical(a) => commands::critical(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(mut report) => {
            eprintln!("{}", report.summary);
            if cli.json {
                if cli.timing {
                    if let Value::Object(map) = &mut report.json {
                        map.insert("wall_time_ms".into(), Value::from(started.elapsed().as_millis() as u64));
                    }
                }
                println!("{}", serde_json::to_string_pretty(&report.json).expect("JSON values serialise"));
            }
            match report.outcome {
                Outcome::Success => ExitCode::SUCCESS,
                Outcome::VerificationFailed => ExitCode::from(1),
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
