//! Layer-level separation between matching and non-matching embeddings.

pub mod hull;
pub mod linalg;
pub mod metrics;
pub mod pca;
pub mod sweep;

pub use hull::{hull_centroid, hull_centroid_distance, hull_vertices};
pub use metrics::{calinski_harabasz, cluster_scores, davies_bouldin, separation_metrics, silhouette, ClusterScores, SeparationMetrics};
pub use pca::{fit_pca, project, reconstruct, standardize_columns, PcaModel};
pub use sweep::{layer_sweep, project_pair, LayerDivergenceReport, LayerSummary, SweepConfig, Stat};
