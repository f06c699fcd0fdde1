use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "advrobust",
    version,
    about = "Adversarial and random-noise robustness of binary classifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Robustness of the reference classifiers on the line-image example.
    RunningExample(RunningExampleArgs),
    /// Train or load a classifier on CSV data and report robustness.
    Analyze(AnalyzeArgs),
    /// Monte-Carlo spherical cap probabilities against their bounds.
    Concentration(ConcentrationArgs),
    /// Volume-matching coefficient between l-infinity and l2 balls.
    Volume(VolumeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Master seed; every random draw derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads, 0 for all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    /// Tolerated flip probability of random noise.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Sphere samples per point.
    #[arg(long = "samples-j", default_value_t = 500)]
    pub samples_j: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunningExampleArgs {
    /// Image dimensions (perfect squares), comma separated.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub dims: Vec<usize>,
    /// Pixel bias; defaults to 0.1/sqrt(d) for each d.
    #[arg(long)]
    pub a: Option<f64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdvMethodArg {
    /// Exact for linear and quadratic classifiers, the attack otherwise.
    Auto,
    Exact,
    Empirical,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Training data.
    #[arg(long)]
    pub csv: PathBuf,
    /// Held-out data; robustness is measured on it when given.
    #[arg(long)]
    pub test_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub label_col: usize,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub pos_label: String,
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub neg_label: String,
    /// Rescale every point to unit norm.
    #[arg(long)]
    pub normalize: bool,
    /// linear | quadratic-ref | linear-svm | poly-svm:<q> | rbf-svm:<sigma2>
    #[arg(long, required_unless_present = "model_file")]
    pub model: Option<String>,
    /// Load a saved classifier instead of training.
    #[arg(long, conflicts_with = "model")]
    pub model_file: Option<PathBuf>,
    /// SVM regularization; chosen by cross-validation when absent.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, value_enum, default_value_t = AdvMethodArg::Auto)]
    pub adv_method: AdvMethodArg,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConcentrationArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub dims: Vec<usize>,
    /// Cap heights, each in [0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.3,0.5")]
    pub taus: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,3,5,10,20,50,100,1000,10000,100000,1000000"
    )]
    pub dims: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}
