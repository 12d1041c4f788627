use ndarray::{concatenate, s, Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{cluster_scores, ClusterScores};
use super::pca::{fit_pca, project, standardize_columns};
use super::hull::hull_centroid_distance;
use crate::error::{Error, Result};
use crate::rng;
use crate::store::{sample_with, DatasetManifest, Direction, Selection};

const SAMPLE_TAG: u32 = 0x5a4d;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Layers to analyze; `None` means every layer in the manifest.
    pub layers: Option<Vec<usize>>,
    pub k: usize,
    pub n: usize,
    pub seeds: Vec<u64>,
    /// Z-score columns before PCA.
    pub standardize: bool,
    /// Compute silhouette/CH/DB on the raw activations instead of PC space.
    pub raw_space_metrics: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { layers: None, k: 3, n: 100, seeds: (0..5).collect(), standardize: false, raw_space_metrics: false }
    }
}

/// Mean and population standard deviation over runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        if values.is_empty() {
            return Stat { mean: f64::NAN, std: f64::NAN };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        if values.len() == 1 {
            return Stat { mean, std: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Stat { mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub layer: usize,
    pub silhouette: Stat,
    /// Mean over runs with finite scores; see `ch_infinite_runs`.
    pub calinski_harabasz: Stat,
    pub davies_bouldin: Stat,
    pub centroid_distance: Stat,
    /// Sum of the k explained-variance ratios.
    pub explained_variance: Stat,
    pub ch_infinite_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerDivergenceReport {
    pub persona: String,
    pub model_id: String,
    pub k: usize,
    pub n: usize,
    pub seeds: Vec<u64>,
    pub layers: Vec<LayerSummary>,
}

impl LayerDivergenceReport {
    /// Layer with the largest mean centroid distance.
    pub fn strongest_layer(&self) -> Option<usize> {
        self.layers
            .iter()
            .max_by(|a, b| a.centroid_distance.mean.total_cmp(&b.centroid_distance.mean).then(b.layer.cmp(&a.layer)))
            .map(|l| l.layer)
    }
}

/// One run's outcome at one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub scores: ClusterScores<f64>,
    pub centroid_distance: f64,
    pub explained_variance: f64,
}

/// Matching and non-matching rows projected on PCs fit to their union.
pub struct ProjectedPair {
    pub plus: Array2<f64>,
    pub minus: Array2<f64>,
    pub raw_plus: Array2<f64>,
    pub raw_minus: Array2<f64>,
    pub explained_variance: f64,
    pub plus_ids: Vec<String>,
    pub minus_ids: Vec<String>,
}

/// Sample `n` rows per direction, fit PCA on the union and project.
pub fn project_pair(
    plus: &crate::store::ActivationMatrix,
    minus: &crate::store::ActivationMatrix,
    k: usize,
    n: usize,
    seed: u64,
    standardize: bool,
) -> Result<ProjectedPair> {
    let sp = sample_with(plus, n, &mut rng::stream2(seed, SAMPLE_TAG, 0))?;
    let sm = sample_with(minus, n, &mut rng::stream2(seed, SAMPLE_TAG, 1))?;
    let raw = concatenate(Axis(0), &[sp.to_f64().view(), sm.to_f64().view()]).map_err(|e| Error::Dimension(e.to_string()))?;
    let data = if standardize { standardize_columns(raw.view()) } else { raw };
    let model = fit_pca(data.view(), k)?;
    let q = project(&model, data.view())?;
    Ok(ProjectedPair {
        plus: q.slice(s![..n, ..]).to_owned(),
        minus: q.slice(s![n.., ..]).to_owned(),
        raw_plus: data.slice(s![..n, ..]).to_owned(),
        raw_minus: data.slice(s![n.., ..]).to_owned(),
        explained_variance: model.explained_variance_ratio.sum(),
        plus_ids: sp.sentence_ids,
        minus_ids: sm.sentence_ids,
    })
}

fn run_once(
    plus: &crate::store::ActivationMatrix,
    minus: &crate::store::ActivationMatrix,
    cfg: &SweepConfig,
    seed: u64,
) -> Result<RunMetrics> {
    let pair = project_pair(plus, minus, cfg.k, cfg.n, seed, cfg.standardize)?;
    let scores = if cfg.raw_space_metrics {
        cluster_scores(pair.raw_plus.view(), pair.raw_minus.view())?
    } else {
        cluster_scores(pair.plus.view(), pair.minus.view())?
    };
    // the hull lives in at most three PCs
    let d = cfg.k.min(3);
    let centroid_distance = hull_centroid_distance(pair.plus.slice(s![.., ..d]), pair.minus.slice(s![.., ..d]))?;
    Ok(RunMetrics { scores, centroid_distance, explained_variance: pair.explained_variance })
}

/// Separation metrics per layer, averaged over seeded runs.
pub fn layer_sweep(manifest: &DatasetManifest, persona: &str, cfg: &SweepConfig) -> Result<LayerDivergenceReport> {
    if cfg.seeds.is_empty() {
        return Err(Error::param("at least one seed is required"));
    }
    let layers = cfg.layers.clone().unwrap_or_else(|| manifest.layers());
    if layers.is_empty() {
        return Err(Error::param("no layers to sweep"));
    }
    let pairs = layers
        .par_iter()
        .map(|&layer| {
            for d in [Direction::Matching, Direction::Notmatching] {
                if manifest.entry(persona, d, layer).is_none() {
                    return Err(Error::Unknown { kind: "matrix", name: format!("{persona}/{d}/layer {layer}") });
                }
            }
            let plus = manifest.select(&Selection::one(persona, Direction::Matching, layer))?;
            let minus = manifest.select(&Selection::one(persona, Direction::Notmatching, layer))?;
            Ok((plus, minus))
        })
        .collect::<Result<Vec<_>>>()?;

    let grid: Vec<(usize, u64)> = (0..layers.len()).flat_map(|li| cfg.seeds.iter().map(move |&s| (li, s))).collect();
    let runs = grid
        .par_iter()
        .map(|&(li, seed)| run_once(&pairs[li].0, &pairs[li].1, cfg, seed))
        .collect::<Result<Vec<_>>>()?;

    let per_layer = runs.chunks(cfg.seeds.len());
    let summaries = layers.iter().zip(per_layer).map(|(&layer, r)| summarize(layer, r)).collect();
    Ok(LayerDivergenceReport {
        persona: persona.to_string(),
        model_id: manifest.model_id.clone(),
        k: cfg.k,
        n: cfg.n,
        seeds: cfg.seeds.clone(),
        layers: summaries,
    })
}

pub fn summarize(layer: usize, runs: &[RunMetrics]) -> LayerSummary {
    let col = |f: &dyn Fn(&RunMetrics) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    let ch: Vec<f64> = runs.iter().filter(|r| !r.scores.ch_infinite).map(|r| r.scores.calinski_harabasz).collect();
    LayerSummary {
        layer,
        silhouette: Stat::of(&col(&|r| r.scores.silhouette)),
        calinski_harabasz: Stat::of(&ch),
        davies_bouldin: Stat::of(&col(&|r| r.scores.davies_bouldin)),
        centroid_distance: Stat::of(&col(&|r| r.centroid_distance)),
        explained_variance: Stat::of(&col(&|r| r.explained_variance)),
        ch_infinite_runs: runs.len() - ch.len(),
    }
}
