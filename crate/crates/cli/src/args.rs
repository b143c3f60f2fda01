use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revisp::losses::PointLoss;
use revisp::tta::TtaMode;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "revisp", version, about = "Reverse-ISP benchmark: synthesize data, fit, predict, evaluate, report")]
pub struct Cli {
    /// Seed for synthesis, patch sampling and fitting.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Dataset manifest (JSON).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// TOML file with defaults; command-line flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic RAW/sRGB dataset with metadata and a manifest.
    Synth(SynthArgs),
    /// Fit a metadata-free reverse model on the manifest's pairs.
    Fit(FitArgs),
    /// Write one raw16 prediction per manifest entry.
    Predict(PredictArgs),
    /// Score predictions against the manifest's ground truth.
    Eval(EvalArgs),
    /// Render evaluation reports as a table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Train,
    Test,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    /// Packed-RAW height; the sRGB image is twice as large.
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, value_enum, default_value = "test")]
    pub split: SplitArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    GammaMixture,
    GlobalMatrix,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Candidate gammas, comma separated (gamma-mixture only).
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    /// Pointwise fitting loss: l1, mse, gar2net or hardlog.
    #[arg(long)]
    pub loss: Option<PointLoss>,
    /// Packed-RAW crop size; whole images when absent.
    #[arg(long)]
    pub crop: Option<usize>,
    /// Crop stride; defaults to the crop size.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Keep this many crops, stratified by brightness.
    #[arg(long)]
    pub patches: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `fit`.
    #[arg(long, conflicts_with_all = ["metadata", "manifest_metadata"])]
    pub model: Option<PathBuf>,
    /// One metadata file applied to every image.
    #[arg(long, conflicts_with = "manifest_metadata")]
    pub metadata: Option<PathBuf>,
    /// Use each entry's own metadata file.
    #[arg(long)]
    pub manifest_metadata: bool,
    /// Output directory for `<id>.raw16` files.
    #[arg(long)]
    pub out: PathBuf,
    /// none, flip2 or dihedral8.
    #[arg(long)]
    pub tta: Option<TtaMode>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory holding `<id>.raw16` predictions.
    #[arg(long)]
    pub pred: PathBuf,
    /// Report file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Method name for the report; defaults to the one recorded by `predict`.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum TableFormat {
    Csv,
    #[default]
    Markdown,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// One or more report files, one table row each.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: TableFormat,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
