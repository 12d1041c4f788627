//! Localize where a labeled concept is encoded in per-layer activation
//! matrices.
//!
//! The crate covers the whole analysis path:
//!
//! - [`store`]: the ACTV binary matrix format, the dataset manifest, and
//!   filtered/sampled views over it.
//! - [`divergence`]: PCA over matching/non-matching embeddings, the four
//!   separation metrics, and the per-layer sweep.
//! - [`scan`]: empirical p-values, Berk-Jones / Higher-Criticism scoring,
//!   the linear-time subset scan and the iterative ascent.
//! - [`localization`]: three-level scan tasks, repeated scans with
//!   precision/recall, consensus sets and the k-means baseline.
//! - [`overlap`]: exact upset regions, Jaccard and cross-level overlap.
//! - [`synth`]: planted-signal generator and detection-power harness.
//! - [`plot`]: CSV tables behind the usual figures.
//!
//! Numeric code in [`divergence`] and the score functions is generic over
//! [`Real`]; the aliases below fix the scalar to `f64`, which is what the
//! pipeline uses.

pub mod divergence;
pub mod error;
pub mod localization;
pub mod overlap;
pub mod plot;
pub mod rng;
pub mod scalar;
pub mod scan;
pub mod store;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Real;

pub use divergence::{
    fit_pca, hull_centroid_distance, layer_sweep, project, separation_metrics, LayerDivergenceReport,
    PcaModel, SeparationMetrics, SweepConfig,
};
pub use localization::{
    baseline_kmeans, build_level_task, precision_recall, run_localization, Level,
    LocalizationConfig, LocalizationReport, ScanTask,
};
pub use overlap::{cross_level_overlap, intersection_counts, jaccard_matrix, NamedSetFamily, UpsetData};
pub use scan::{
    brute_force_scan, empirical_pvalues, ltss_optimize, npss_score, scan, PValueMatrix, ScanAxis,
    ScanConfig, ScanResult, ScoreKind, TailMode,
};
pub use store::{load_matrix, write_matrix, ActivationMatrix, DatasetManifest, Direction, SentenceRecord};
pub use synth::{detection_power, generate_synthetic, PowerReport, SynthConfig, SynthTruth, SyntheticDataset};

/// PCA model over `f64`.
pub type Pca = PcaModel<f64>;
/// Separation metrics over `f64`.
pub type Separation = SeparationMetrics<f64>;
/// PCA model over `f32`.
pub type PcaF32 = PcaModel<f32>;
/// Separation metrics over `f32`.
pub type SeparationF32 = SeparationMetrics<f32>;
