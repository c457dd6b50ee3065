//! Command-line surface: subcommands, flags, defaults.

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use loanboost::booster::{BoostMode, BoosterParams, ImportanceKind};

#[derive(Debug, Parser)]
#[command(
    name = "loanboost",
    version,
    about = "Gradient-boosted decision trees for loan-default prediction",
    propagate_version = true
)]
pub struct Cli {
    /// Cap the worker-thread count. Outputs are byte-identical for any
    /// value.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the three synthetic loan tables as CSV files
    Synth(SynthArgs),
    /// Join and feature-engineer the raw tables into a prepared dataset
    Prep(PrepArgs),
    /// Train a boosted-tree model on a prepared dataset
    Train(TrainArgs),
    /// Write per-row predicted probabilities for a prepared dataset
    Predict(PredictArgs),
    /// Evaluate a model: confusion matrix, scalar metrics, and AUC
    Evaluate(EvaluateArgs),
    /// Stratified k-fold cross-validation
    Cv(CvArgs),
    /// Exhaustive grid search over booster parameters
    Gridsearch(GridsearchArgs),
    /// Ranked feature importance of a trained model
    Importance(ImportanceArgs),
    /// ROC curve export: points CSV and an SVG plot
    Roc(RocArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Friedman,
    Newton,
}

impl From<ModeArg> for BoostMode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::Friedman => BoostMode::Friedman,
            ModeArg::Newton => BoostMode::Newton,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PositiveLabelArg {
    /// The default / label-0 class
    Bad,
    /// The non-default / label-1 class
    Good,
}

impl PositiveLabelArg {
    pub fn label(self) -> u8 {
        match self {
            PositiveLabelArg::Bad => 0,
            PositiveLabelArg::Good => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PositiveLabelArg::Bad => "bad",
            PositiveLabelArg::Good => "good",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Gain,
    SplitCount,
}

impl From<KindArg> for ImportanceKind {
    fn from(value: KindArg) -> Self {
        match value {
            KindArg::Gain => ImportanceKind::Gain,
            KindArg::SplitCount => ImportanceKind::SplitCount,
        }
    }
}

/// Booster hyperparameter flags, shared by train/cv/gridsearch.
#[derive(Debug, Args)]
pub struct BoosterFlags {
    #[arg(long, default_value_t = 1000)]
    pub n_estimators: usize,
    #[arg(long, default_value_t = 0.01)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.8)]
    pub subsample: f64,
    #[arg(long, default_value_t = 1.0)]
    pub reg_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub reg_lambda: f64,
    #[arg(long, default_value_t = 6)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 0.0)]
    pub min_gain: f64,
    #[arg(long, default_value_t = 256)]
    pub max_bins: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Newton)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1.0)]
    pub positive_class_weight: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl BoosterFlags {
    pub fn to_params(&self) -> BoosterParams {
        BoosterParams {
            n_estimators: self.n_estimators,
            learning_rate: self.learning_rate,
            subsample: self.subsample,
            reg_alpha: self.reg_alpha,
            reg_lambda: self.reg_lambda,
            max_depth: self.max_depth,
            min_gain: self.min_gain,
            max_bins: self.max_bins,
            mode: self.mode.into(),
            positive_class_weight: self.positive_class_weight,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Directory for demographic.csv, performance.csv, previous.csv
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 4346)]
    pub n_demographic: usize,
    #[arg(long, default_value_t = 4368)]
    pub n_performance: usize,
    #[arg(long, default_value_t = 18183)]
    pub n_previous: usize,
    #[arg(long, default_value_t = 0.22)]
    pub bad_rate: f64,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    #[arg(long)]
    pub demographic: PathBuf,
    #[arg(long)]
    pub performance: PathBuf,
    #[arg(long)]
    pub previous: PathBuf,
    /// Date ages are computed against (YYYY-MM-DD)
    #[arg(long)]
    pub reference_date: NaiveDate,
    /// Output path of the prepared CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Sidecar JSON path (default: output path with .meta.json)
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Cap on explicit categorical levels per column
    #[arg(long, default_value_t = 32)]
    pub max_levels: usize,
    /// Reuse the categorical code maps of an existing sidecar
    #[arg(long)]
    pub encodings: Option<PathBuf>,
}

impl PrepArgs {
    pub fn sidecar_path(&self) -> PathBuf {
        self.sidecar
            .clone()
            .unwrap_or_else(|| self.out.with_extension("meta.json"))
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Prepared CSV to train on
    #[arg(long)]
    pub data: PathBuf,
    /// Output path of the model JSON
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub booster: BoosterFlags,
    /// Print one line of training loss per boosting round
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV with one probability per row
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output metrics JSON
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = PositiveLabelArg::Bad)]
    pub positive_label: PositiveLabelArg,
    /// Probability threshold on the good class for label metrics
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[command(flatten)]
    pub booster: BoosterFlags,
    #[arg(long, value_enum, default_value_t = PositiveLabelArg::Bad)]
    pub positive_label: PositiveLabelArg,
    /// Per-fold metrics CSV
    #[arg(long)]
    pub out_csv: PathBuf,
    /// Report summary JSON
    #[arg(long)]
    pub out_json: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridsearchArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Base values for parameters not listed in any --grid flag
    #[command(flatten)]
    pub booster: BoosterFlags,
    #[arg(long, value_enum, default_value_t = PositiveLabelArg::Bad)]
    pub positive_label: PositiveLabelArg,
    /// Grid axis, e.g. --grid n-estimators=100,500 (repeatable; axes:
    /// n-estimators, learning-rate, subsample, reg-alpha, reg-lambda,
    /// max-depth)
    #[arg(long = "grid", value_name = "PARAM=V1,V2,...")]
    pub grid: Vec<String>,
    /// Winning parameter set JSON
    #[arg(long)]
    pub out_best: PathBuf,
    /// Per-fold metrics CSV over all combinations
    #[arg(long)]
    pub out_csv: PathBuf,
    /// All reports JSON
    #[arg(long)]
    pub out_json: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Gain)]
    pub kind: KindArg,
    /// Output CSV (feature,score,kind)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RocArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// ROC points CSV (fpr,tpr)
    #[arg(long)]
    pub out_csv: PathBuf,
    /// Standalone SVG plot
    #[arg(long)]
    pub out_svg: PathBuf,
    #[arg(long, value_enum, default_value_t = PositiveLabelArg::Bad)]
    pub positive_label: PositiveLabelArg,
}
