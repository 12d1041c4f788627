use std::path::PathBuf;

use actscan::ScoreKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Serializes to the configuration that is hashed into the run manifest:
/// output paths, `--jobs` and input paths are skipped (inputs enter the
/// hash by content).
#[derive(Debug, Parser, Serialize)]
#[command(name = "actscan", version, about = "Locate labeled concepts in per-layer activation matrices")]
pub struct Cli {
    /// Worker threads (falls back to ACTSCAN_JOBS, then the number of cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,

    /// Master seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// PCA separation metrics of matching vs non-matching rows, per layer.
    Layers(LayersArgs),
    /// Subset scan of one test matrix against one background matrix.
    Scan(ScanArgs),
    /// Repeated level-0/1/2 scans with precision, recall and consensus positions.
    Localize(LocalizeArgs),
    /// Overlap of consensus position sets from `localize` reports.
    Overlap(OverlapArgs),
    /// Detection power on synthetic data with a planted signal.
    SynthPower(SynthPowerArgs),
    /// CSV tables for plotting.
    PlotData(PlotDataArgs),
    /// Re-execute the command recorded in a run manifest.
    Rerun(RerunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Layers(_) => "layers",
            Command::Scan(_) => "scan",
            Command::Localize(_) => "localize",
            Command::Overlap(_) => "overlap",
            Command::SynthPower(_) => "synth-power",
            Command::PlotData(_) => "plot-data",
            Command::Rerun(_) => "rerun",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Score {
    Bj,
    Hc,
}

impl From<Score> for ScoreKind {
    fn from(s: Score) -> ScoreKind {
        match s {
            Score::Bj => ScoreKind::BerkJones,
            Score::Hc => ScoreKind::HigherCriticism,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanOpts {
    #[arg(long, value_enum, default_value_t = Score::Bj)]
    pub score: Score,
    #[arg(long, default_value_t = 0.5)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 20)]
    pub max_iters: usize,
    /// Probability that a position starts in the subset of a restart.
    #[arg(long, default_value_t = 0.5)]
    pub init_fraction: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct LayersArgs {
    #[arg(long)]
    #[serde(skip)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub persona: String,
    /// Comma-separated layer indices; all layers when absent.
    #[arg(long, value_delimiter = ',')]
    pub layers: Option<Vec<usize>>,
    /// Principal components kept.
    #[arg(long, default_value_t = 3)]
    pub pcs: usize,
    /// Rows sampled per direction.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Sampling repetitions (seeds `seed .. seed + seeds`).
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// z-score columns before PCA.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    /// ACTV background (null) matrix.
    #[arg(long)]
    #[serde(skip)]
    pub background: PathBuf,
    /// ACTV test matrix.
    #[arg(long)]
    #[serde(skip)]
    pub test: PathBuf,
    #[command(flatten)]
    pub scan: ScanOpts,
    /// Count ties as not exceeding (`>` instead of `>=`).
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub two_sided: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Consensus {
    Frequency,
    Union,
    Intersection,
}

#[derive(Debug, Args, Serialize)]
pub struct LocalizeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub manifest: PathBuf,
    /// 0 = topic, 1 = persona within topic, 2 = matching vs non-matching.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub level: u8,
    /// Topic name for level 0, persona id otherwise.
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub layer: usize,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long, default_value_t = 200)]
    pub test_size: usize,
    #[arg(long, default_value_t = 0.5)]
    pub h1_fraction: f64,
    /// Share of the H0 pool used as background.
    #[arg(long, default_value_t = actscan::localization::DEFAULT_BACKGROUND_FRACTION)]
    pub background_fraction: f64,
    #[arg(long, value_enum, default_value_t = Consensus::Frequency)]
    pub consensus: Consensus,
    /// Selection-frequency threshold for `--consensus frequency`.
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Also cluster each test draw with 2-means.
    #[arg(long)]
    pub kmeans_baseline: bool,
    #[command(flatten)]
    pub scan: ScanOpts,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct OverlapArgs {
    /// Position sets: `localize` reports (consensus is used) or JSON index
    /// arrays. Named after the file stem.
    #[arg(long, num_args = 1.., conflicts_with_all = ["level0", "level2"])]
    #[serde(skip)]
    pub sets: Vec<PathBuf>,
    /// Number of positions; taken from the reports when absent.
    #[arg(long)]
    pub universe: Option<usize>,
    /// Level-0 set for a cross-level comparison.
    #[arg(long, requires = "level2")]
    #[serde(skip)]
    pub level0: Option<PathBuf>,
    /// Level-2 set for a cross-level comparison.
    #[arg(long, requires = "level0")]
    #[serde(skip)]
    pub level2: Option<PathBuf>,
    /// `.csv` writes the region table, anything else the JSON report.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthPowerArgs {
    #[arg(long, default_value_t = 2.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 512)]
    pub dim: usize,
    /// Signal goes on positions `0 .. planted`.
    #[arg(long, default_value_t = 40)]
    pub planted: usize,
    #[arg(long, default_value_t = 300)]
    pub n_background: usize,
    #[arg(long, default_value_t = 100)]
    pub n_signal: usize,
    #[arg(long, default_value_t = 100)]
    pub n_null: usize,
    /// Independent instances (seeds `seed .. seed + seeds`).
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    #[command(flatten)]
    pub scan: ScanOpts,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    LayerCurves,
    Upset,
    Venn,
    Sankey,
    PcaScatter,
}

#[derive(Debug, Args, Serialize)]
pub struct PlotDataArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// Report(s) to tabulate; the dataset manifest for `pca-scatter`.
    #[arg(long, num_args = 1.., required = true)]
    #[serde(skip)]
    pub input: Vec<PathBuf>,
    /// `pca-scatter` only.
    #[arg(long)]
    pub persona: Option<String>,
    /// `pca-scatter` only.
    #[arg(long)]
    pub layer: Option<usize>,
    /// Rows per direction for `pca-scatter`.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RerunArgs {
    /// A `run_manifest.json` written by an earlier command.
    pub run_manifest: PathBuf,
    /// Write here instead of the recorded output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
