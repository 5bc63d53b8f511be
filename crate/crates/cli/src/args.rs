use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Clone)]
#[command(name = "nbcrit", version, about = "Nyman–Beurling approximation experiments")]
pub struct Cli {
    /// Worker threads for panel and grid parallelism.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Möbius table size; defaults to $NBCRIT_TABLE_LIMIT, else to what the
    /// command needs.
    #[arg(long, global = true)]
    pub table_limit: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// μ(n) and the Mertens function M(n) for n ≤ limit.
    Sieve(SieveArgs),
    /// ζ(s) or log Γ(s) with error bounds.
    Zeta(ZetaArgs),
    /// Pointwise values of an approximant on an x grid.
    Eval(EvalArgs),
    /// L2 distance of an approximant (or a sweep of them) to −χ.
    Distance(DistanceArgs),
    /// Mellin transform samples along the critical line.
    Mellin(MellinArgs),
    /// Bound sweeps for the partial-sum and ζ-ratio estimates.
    Lemma(LemmaArgs),
    /// Canned experiments writing CSV, summary JSON and plot data.
    Report(ReportArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sieve(_) => "sieve",
            Command::Zeta(_) => "zeta",
            Command::Eval(_) => "eval",
            Command::Distance(_) => "distance",
            Command::Mellin(_) => "mellin",
            Command::Lemma(_) => "lemma",
            Command::Report(_) => "report",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutArgs {
    /// Output file; a run manifest is written next to it. Default: stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SieveArgs {
    #[arg(long)]
    pub limit: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialFunction {
    Zeta,
    LogGamma,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ZetaArgs {
    /// Real parts, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub sigma: Vec<f64>,
    /// Imaginary parts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
    pub tau: Vec<f64>,
    /// Requested truncation error.
    #[arg(long = "error", default_value_t = 1e-12)]
    pub target: f64,
    #[arg(long, value_enum, default_value = "zeta")]
    pub function: SpecialFunction,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpecArgs {
    /// natural | selberg | regularized | regularized_limit
    #[arg(long, default_value = "natural")]
    pub kind: String,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailArg {
    Exact,
    Numeric,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QuadArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub x_min: f64,
    /// Gauss–Legendre nodes per panel.
    #[arg(long, default_value_t = 16)]
    pub order: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub tail_mode: TailArg,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_panels: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// start:stop:count with an optional :log suffix.
    #[arg(long)]
    pub x_grid: String,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DistanceArgs {
    #[arg(long, default_value = "natural")]
    pub kind: String,
    /// One order, or a comma-separated ascending sweep.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub n: Vec<usize>,
    /// One ε, or a comma-separated descending sweep.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub eps: Vec<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MellinMode {
    Numeric,
    Closed,
    Both,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MellinArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Exponent w of the weight x^{-w}.
    #[arg(long, default_value_t = 0.0)]
    pub weight_eps: f64,
    /// start:stop:count with an optional :log suffix.
    #[arg(long, default_value = "0:10:11", allow_hyphen_values = true)]
    pub tau_grid: String,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: MellinMode,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaWhich {
    Zratio,
    Bs,
    Cauchy,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps_exponent: f64,
    #[arg(long, default_value_t = 0.2)]
    pub eps0: f64,
    /// ε values; ascending for zratio, any order for cauchy.
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "0.75,1")]
    pub sigma_grid: Vec<f64>,
    /// start:stop:count(:log); τ = 0 is prepended when `--with-zero` is set.
    #[arg(long, default_value = "1:1000:61:log")]
    pub tau_grid: String,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub with_zero: bool,
    /// Orders (bs, cauchy, n-cauchy, slow-bound).
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LemmaArgs {
    #[arg(long, value_enum)]
    pub which: LemmaWhich,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EpsSweep,
    NCauchy,
    SlowBound,
    Plancherel,
    Zratio,
    Bs,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::EpsSweep => "eps-sweep",
            Experiment::NCauchy => "n-cauchy",
            Experiment::SlowBound => "slow-bound",
            Experiment::Plancherel => "plancherel",
            Experiment::Zratio => "zratio",
            Experiment::Bs => "bs",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReportArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// ε grid (eps-sweep, n-cauchy, zratio).
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Approximant order (plancherel).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Weight exponent (plancherel).
    #[arg(long, default_value_t = 0.25)]
    pub weight_eps: f64,
    /// Largest τ of the K-norm window (plancherel).
    #[arg(long, default_value_t = 200.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tau_step: f64,
    /// Number of times the τ window is doubled (plancherel).
    #[arg(long, default_value_t = 1)]
    pub doublings: usize,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Directory for the experiment files; default: CSV on stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where the replayed outputs go; default: a fresh temporary directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
