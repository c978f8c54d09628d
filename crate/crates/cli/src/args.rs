//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leafpower::mso::Predicate;
use leafpower::treedecomp::Strategy;

#[derive(Debug, Parser)]
#[command(name = "leafpower", version, about = "Recognize k-leaf powers and distance-range labeled leaf powers")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for independent components.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a graph is a k-leaf power.
    Recognize {
        #[arg(short = 'k')]
        k: usize,
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Decide whether a labeled graph is a labeled K-leaf power.
    RecognizeLabeled {
        #[arg(short = 'K', long = "cap")]
        cap: usize,
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a witness tree against a graph.
    Verify {
        #[arg(short = 'k')]
        k: usize,
        graph: PathBuf,
        witness: PathBuf,
    },
    /// Answer with a reference method instead of the dynamic program.
    Oracle {
        #[arg(short = 'k')]
        k: usize,
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleMethod::Auto)]
        method: OracleMethod,
        /// Largest tree size searched by the brute-force method.
        #[arg(long, default_value_t = 16)]
        budget: usize,
        /// Treat the input as labeled with cap k.
        #[arg(long)]
        labeled: bool,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Generate a leaf power together with its leaf root.
    Generate {
        #[arg(short = 'k')]
        k: usize,
        #[arg(long, value_enum, default_value_t = Family::Random)]
        family: Family,
        /// Leaf count (random family) or spine length (caterpillar family).
        #[arg(short = 'n', long, default_value_t = 6)]
        n: usize,
        /// Emit exact-distance labels.
        #[arg(long)]
        labeled: bool,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Write the strong product of a graph with the cycle C_k.
    Product {
        #[arg(short = 'k')]
        k: usize,
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Write a tree decomposition of a graph.
    Decompose {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::MinFill)]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value_t = DecompositionKind::Plain)]
        kind: DecompositionKind,
        /// Cycle length for the mixed decomposition.
        #[arg(short = 'k')]
        k: Option<usize>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Write the MSO formula for k-leaf powers or labeled K-leaf powers.
    EmitMso {
        #[arg(short = 'k')]
        k: usize,
        #[arg(long)]
        labeled: bool,
        #[arg(long, value_enum, default_value_t = StyleArg::Sexpr)]
        style: StyleArg,
        /// Emit one named predicate instead (k parameterizes haspath,
        /// isroot, nonedge and the lower end of edge).
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Predicate::NAMES))]
        predicate: Option<String>,
        /// Upper range end for the edge predicate.
        #[arg(long)]
        k2: Option<usize>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Time recognition on the caterpillar family and print a TSV table.
    Bench {
        #[arg(short = 'k', default_value_t = 4)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [100, 200, 400, 800, 1600])]
        sizes: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::MinFill)]
    pub strategy: StrategyArg,
    /// Abort when a bag holds more pictures than this.
    #[arg(long)]
    pub max_pictures: Option<usize>,
    /// Abort after this many seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Write the witness tree as a parent array.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// Write the witness tree in Newick form.
    #[arg(long)]
    pub newick: Option<PathBuf>,
    /// Write a per-bag TSV trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    MinFill,
    Exact,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::MinFill => Strategy::MinFill,
            StrategyArg::Exact => Strategy::ExactSmall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMethod {
    /// Closed form for k <= 3, brute force otherwise.
    Auto,
    Brute,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Random,
    Caterpillar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DecompositionKind {
    Plain,
    Nice,
    ExtraNice,
    Mixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StyleArg {
    Sexpr,
    Pretty,
}
