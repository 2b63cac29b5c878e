use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "tdiam", version, about = "Leja sequences, transfinite diameters and Markov factors on point clouds")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the first multi-indices of the graded-lex order.
    Enumerate(EnumerateArgs),
    /// Greedy Leja points on a cloud.
    Leja(LejaArgs),
    /// δ_d curve from a Leja sequence.
    Diameter(DiameterArgs),
    /// Discrete Markov factors and a Bernstein-constant estimate.
    Markov(MarkovArgs),
    /// Random-trial check of the derivative bound for monic polynomials.
    VerifyLemma(VerifyLemmaArgs),
    /// Check the transfinite-diameter lower bound at every degree.
    VerifyTheorem(VerifyTheoremArgs),
    /// Exhaustive maximal-Vandermonde search over k-subsets.
    FeketeOracle(FeketeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    General,
    Product,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Artifact format; inferred from the --out extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    pub fn resolved_format(&self) -> Format {
        match (self.format, &self.out) {
            (Some(f), _) => f,
            (None, Some(p)) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Set selection: `circle`, `segment`, `product:circle,segment,…`,
/// `union:circle,…` or `file:PATH`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SetArgs {
    #[arg(long = "set", default_value = "circle")]
    pub spec: String,
    /// Circle radius.
    #[arg(long = "R", default_value_t = 1.0)]
    pub radius: f64,
    /// Circle center as `re,im`.
    #[arg(long, default_value = "0,0")]
    pub center: String,
    /// Points per circle or segment (defaults: 512 and 1000).
    #[arg(long)]
    pub points: Option<usize>,
    /// Segment left endpoint.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub a: f64,
    /// Segment right endpoint.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Expected dimension; checked against the set.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub count: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LejaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    /// Number of Leja points to select.
    #[arg(long, alias = "steps")]
    pub count: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiameterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    #[arg(long)]
    pub dmax: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MarkovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    /// Degrees `lo..hi` (inclusive); overrides --dmax.
    #[arg(long)]
    pub drange: Option<String>,
    /// Degrees 1..=dmax.
    #[arg(long, default_value_t = 6)]
    pub dmax: usize,
    /// 1-based coordinate; all coordinates when omitted.
    #[arg(long)]
    pub coord: Option<usize>,
    /// Growth exponent used for the estimate.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 64)]
    pub phases: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyLemmaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    /// `1` for general sets, `3` for product sets.
    #[arg(long, default_value_t = 1, value_parser = clap::builder::PossibleValuesParser::new(["1", "3"]).map(|s| s.parse::<u8>().unwrap()))]
    pub lemma: u8,
    #[arg(long = "M", default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Indices are drawn below h_{degree-cap}.
    #[arg(long, default_value_t = 6)]
    pub degree_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyTheoremArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    #[arg(long = "M", default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, value_enum, default_value_t = Flavor::General)]
    pub flavor: Flavor,
    #[arg(long)]
    pub dmax: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FeketeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    #[arg(long)]
    pub k: usize,
    /// Maximum number of determinant evaluations.
    #[arg(long, default_value_t = tdiam::vandermonde::DEFAULT_FEKETE_BUDGET)]
    pub budget: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}
