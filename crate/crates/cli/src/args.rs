use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mergelab",
    version,
    about = "One-shot multiparty state merging: entropies, simulations and cost regions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies of a state: marginals, and conditional quantities for `--partition A|B`.
    Entropy(Common),
    /// Asymptotic and one-shot cost regions, split regions with `--partition T|Tbar`.
    Region(Common),
    /// Random-measurement merging Monte Carlo.
    Simulate(Common),
    /// Split-transfer Monte Carlo with `--partition T|Tbar`.
    Split(Common),
    /// Embezzling-state cost tables.
    Embezzle(Common),
    /// Built-in property checks.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Random,
    Ghz,
    Embezzle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Common {
    /// State JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub generator: Option<Generator>,
    /// Sender (or helper) dimensions.
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<usize>,
    #[arg(long = "dR")]
    pub d_r: Option<usize>,
    #[arg(long = "dB")]
    pub d_b: Option<usize>,
    #[arg(long = "K", value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long = "L", value_delimiter = ',')]
    pub l: Vec<usize>,
    #[arg(long = "M", value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Vec<usize>,
    /// `X|Y`: conditioning split for `entropy`, helper split `T|Tbar` for `region` and `split`.
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Embezzling dimension(s).
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Pairwise overlap of the embezzling family (default 1/d).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Point to test for region membership.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Vec<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct SelftestArgs {
    /// Only the fast closed-form examples.
    #[arg(long)]
    pub quick: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
