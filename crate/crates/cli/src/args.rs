use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "xhack", version, about = "Search defensible pipelines for convenient explanations, and audit the results")]
pub struct Cli {
    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the collinear simulation dataset.
    Simulate(SimulateArgs),
    /// Evaluate the baseline and a sample of pipelines, then cherry-pick or rank them.
    Search(SearchArgs),
    /// Turn a search result into plot data (and optionally SVG).
    Report(ReportArgs),
    /// Locate a reported metric value in a search's distribution.
    Detect(DetectArgs),
    /// Re-run a command from its run_config.json.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation spec JSON; flags below override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub n_rows: Option<usize>,
    /// Noise on both f1 and f2.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub sigma1: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Draw f1 from its own parent instead of f0.
    #[arg(long)]
    pub independent_f1: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Cherry,
    Directed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExplainerArg {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregateArg {
    Slope,
    MeanSignedShap,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Defaults to schema.json next to the data file.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Search space JSON; defaults to the built-in defensible space.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Number of sampled configs; overrides the space file.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum, default_value = "cherry")]
    pub mode: ModeArg,
    /// Directed-search parameters JSON.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Target feature (name or column index). Directed mode: the feature to
    /// flip. Cherry mode: the feature to topple or flip; all features if omitted.
    #[arg(long)]
    pub feature: Option<String>,
    #[arg(long, default_value_t = xhack::summary::DEFAULT_TOP_K)]
    pub top_k: usize,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, value_enum)]
    pub aggregate: Option<AggregateArg>,
    #[arg(long, default_value_t = xhack::DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 50)]
    pub background: usize,
    #[arg(long = "eval", default_value_t = 100)]
    pub eval_rows: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub explainer: ExplainerArg,
    /// Coalition budget for the sampled explainer.
    #[arg(long, default_value_t = 2048)]
    pub coalitions: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    ImportanceChange,
    Slopes,
    Pareto,
    Histogram,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Search result directory.
    #[arg(long)]
    pub result: PathBuf,
    #[arg(long, value_enum)]
    pub kind: ReportKind,
    #[arg(long)]
    pub feature: Option<String>,
    /// Histogram metric such as slope:f1; defaults to the slope of --feature.
    #[arg(long)]
    pub metric: Option<String>,
    /// Accuracy filter for histograms and Pareto ranges; defaults to the baseline's accuracy.
    #[arg(long)]
    pub min_accuracy: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Also render static SVG.
    #[arg(long)]
    pub svg: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub result: PathBuf,
    /// slope:<feature>, share:<feature>, rank:<feature> or mean-shap:<feature>.
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_negative_numbers = true)]
    pub reported: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Defaults to the baseline's accuracy.
    #[arg(long)]
    pub min_accuracy: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A run_config.json written by an earlier command.
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}
