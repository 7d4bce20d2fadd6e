use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::sbox_file::Format;

#[derive(Debug, Parser)]
#[command(name = "sbox-forge", version, about = "Analyze S-boxes and build bijective ones from power maps over GF(2^n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Differential uniformity, nonlinearity and friends of an S-box file
    Analyze(AnalyzeArgs),
    /// (DU, NL) of every power map x^d, one row per cyclotomic coset
    Survey(SurveyArgs),
    /// Sizes of the classes of n-variable functions, transformations and permutations
    Count(CountArgs),
    /// Repair one binomial alpha*x^d + beta*x^(2^i) into a permutation
    Construct(ConstructArgs),
    /// Repair every binomial alpha*x^d + beta*x^(2^i) and rank the results
    Search(SearchArgs),
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// field polynomial, hex (0x11b) or decimal; fixes n
    #[arg(long)]
    pub poly: Option<String>,
    /// field dimension when --poly is not given [default: 8]
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub path: PathBuf,
    /// field polynomial recorded in the report; the metrics do not depend on it
    #[arg(long)]
    pub poly: Option<String>,
    /// output width in bits [default: n]
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    /// include the difference distribution table
    #[arg(long)]
    pub ddt: bool,
    /// include the Walsh spectrum
    #[arg(long)]
    pub walsh: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    pub n: u32,
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long)]
    pub du_max: Option<u32>,
    #[arg(long)]
    pub nl_min: Option<u32>,
    #[arg(long, conflicts_with = "non_bijective_only")]
    pub bijective_only: bool,
    #[arg(long)]
    pub non_bijective_only: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    pub n: u32,
    /// output width for the function class [default: n]
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RepairArgs {
    #[arg(long, default_value_t = 3)]
    pub d: u64,
    #[arg(long, default_value_t = 2)]
    pub i: u32,
    /// greedy or anneal
    #[arg(long, default_value = "anneal")]
    pub strategy: String,
    /// anneal proposal budget [default: 10000]
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub repair: RepairArgs,
    /// hex (0x32) or decimal
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
    /// where to write the S-box
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub repair: RepairArgs,
    /// number of ranked outcomes to list
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// (du, nl) bar to report on, as DU,NL
    #[arg(long, default_value = "8,102")]
    pub target: String,
    /// report the rank and metrics of this ALPHA,BETA pair; repeatable
    #[arg(long)]
    pub watch: Vec<String>,
    /// write the best S-box here
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    #[arg(long)]
    pub json: bool,
}
