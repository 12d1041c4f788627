//! Scan tasks at three granularities, repeated-scan validation and the
//! k-means baseline.
//!
//! | level | H1 (localized)                  | H0 (background)                              |
//! |-------|---------------------------------|----------------------------------------------|
//! | 2     | persona, matching               | same persona, not matching                   |
//! | 1     | persona, matching               | other personas of the topic, matching        |
//! | 0     | every persona of topic, matching| every persona of the other topics, matching  |

mod kmeans;
mod run;
mod task;

pub use kmeans::{baseline_kmeans, kmeans2, KMeansFit};
pub use run::{consensus_set, precision_recall, run_kmeans_baseline, run_localization, BaselineReport, ConsensusMode, LocalizationConfig, LocalizationReport, PrecisionRecall, RunRecord};
pub use task::{build_level_task, build_level_task_with, Level, ScanTask, DEFAULT_BACKGROUND_FRACTION};
