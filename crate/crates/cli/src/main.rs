use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(
    name = "bnchaos",
    version,
    about = "Chaotic asynchronous iterations of Boolean networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chaoticity, double stochasticity and mixing time of a map.
    Analyze(AnalyzeArgs),
    /// Check the sufficient conditions for chaos on an interaction graph.
    CheckConditions(GraphArgs),
    /// Generate chaotic maps by random arc removal from Gamma(neg).
    Search(SearchArgs),
    /// Enumerate maps whose interaction graph fits a target.
    Enumerate(EnumerateArgs),
    /// Mixing time of the Markov chain induced by a map.
    MixingTime(MixingArgs),
    /// Generate pseudorandom bits with the chaotic generator.
    Gen(GenArgs),
    /// Run the statistical battery on a bit file or a fresh stream.
    Test(TestArgs),
    /// Export the iteration or interaction graph in Graphviz DOT.
    ExportDot(DotArgs),
    /// Print the transition matrix as exact fractions.
    ExportMatrix(FunctionArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormArg {
    L1,
    L2,
    Linf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StartArg {
    /// Start at e_j and compare against pi.
    Basis,
    /// Start at e_j / n and compare against pi / n.
    Scaled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BitFormat {
    /// ASCII '0'/'1' characters, no separators.
    Ascii01,
    /// Packed bytes, first bit in the most significant position.
    Binary,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DotKind {
    Iteration,
    Interaction,
}

#[derive(Args)]
struct FunctionArgs {
    /// Truth-table file or builtin (F1..F16, g, h, neg<n>, id<n>).
    #[arg(long)]
    function: String,
    /// Expected component count; checked against the truth table.
    #[arg(long)]
    n: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MixingFlags {
    /// Mixing tolerance.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = NormArg::L2)]
    norm: NormArg,
    #[arg(long, value_enum, default_value_t = StartArg::Basis)]
    start: StartArg,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    mixing: MixingFlags,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct GraphArgs {
    /// Interaction graph file: `j s i` lines, optional `n <count>` line.
    #[arg(long, conflicts_with = "function")]
    graph: Option<PathBuf>,
    /// Use the interaction graph of this map instead.
    #[arg(long)]
    function: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    /// Target fraction of removed arcs, in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Consecutive failed removals before giving up.
    #[arg(long, default_value_t = 1000)]
    max_attempts: usize,
    /// Number of maps; run k uses seed + k.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    target: GraphArgs,
    /// Accept maps whose graph is a subgraph of the target.
    #[arg(long)]
    subgraph: bool,
    /// Keep only chaotic maps.
    #[arg(long)]
    chaotic: bool,
    /// Keep only maps with a doubly stochastic Markov matrix.
    #[arg(long)]
    double_stochastic: bool,
    /// Quotient by component relabelings preserving the target graph.
    #[arg(long)]
    reduce: bool,
    /// Stop after this many maps.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct MixingArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    mixing: MixingFlags,
    /// Also print the mixing time of every start state.
    #[arg(long)]
    per_start: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct StreamArgs {
    /// Truth-table file or builtin.
    #[arg(long)]
    function: Option<String>,
    /// Iteration count parameter; each output takes b+1..=2b+1 updates.
    #[arg(long, default_value_t = 48)]
    b: u32,
    #[arg(long, default_value_t = 123456789)]
    seed: u32,
    /// Initial configuration as a bit string (default: all zeros).
    #[arg(long)]
    x0: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    nbits: usize,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, value_enum, default_value_t = BitFormat::Ascii01)]
    format: BitFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    /// ASCII 0/1 file to test; otherwise a stream is generated.
    #[arg(long, conflicts_with = "function")]
    input: Option<PathBuf>,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Block length of the block frequency test.
    #[arg(long, default_value_t = 128)]
    block_len: usize,
    /// Pattern length of the serial test.
    #[arg(long, default_value_t = 2)]
    serial_m: usize,
    /// Pattern length of the approximate entropy test.
    #[arg(long, default_value_t = 2)]
    entropy_m: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DotArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long, value_enum, default_value_t = DotKind::Iteration)]
    kind: DotKind,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(bnchaos::Error),
}

impl From<bnchaos::Error> for Failure {
    fn from(e: bnchaos::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

type CliResult<T> = Result<T, Failure>;

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::CheckConditions(a) => commands::check_conditions(a),
        Command::Search(a) => commands::search(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::MixingTime(a) => commands::mixing_time(a),
        Command::Gen(a) => commands::gen(a),
        Command::Test(a) => commands::test(a),
        Command::ExportDot(a) => commands::export_dot(a),
        Command::ExportMatrix(a) => commands::export_matrix(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
