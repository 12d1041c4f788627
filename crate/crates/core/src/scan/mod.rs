//! Subset scanning over (sentence × position) p-value matrices.
//!
//! A subset `S = X_S × O_S` is scored by how far the share of its p-values
//! at or below some threshold `alpha` exceeds `alpha` ([`npss_score`]).
//! [`ltss_optimize`] maximizes exactly over one axis while the other is
//! held fixed; [`scan`] alternates the two from random starts.
//! [`brute_force_scan`] enumerates every subset pair on tiny instances.

mod ascent;
mod brute;
mod ltss;
mod pvalue;
mod score;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ascent::scan;
pub use brute::brute_force_scan;
pub use ltss::{alpha_grid, ltss_optimize, subset_score, LtssResult};
pub use pvalue::{empirical_pvalues, empirical_pvalues_with, PValueMatrix, PValueOptions, TailMode};
pub use score::{npss_score, ScoreKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanAxis {
    Sentences,
    Positions,
}

impl ScanAxis {
    pub fn other(self) -> ScanAxis {
        match self {
            ScanAxis::Sentences => ScanAxis::Positions,
            ScanAxis::Positions => ScanAxis::Sentences,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub score_kind: ScoreKind,
    pub alpha_max: f64,
    pub restarts: usize,
    pub max_iters: usize,
    pub init_fraction: f64,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            score_kind: ScoreKind::BerkJones,
            alpha_max: 0.5,
            restarts: 10,
            max_iters: 20,
            init_fraction: 0.5,
            seed: 0,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_max > 0.0 && self.alpha_max <= 1.0) {
            return Err(Error::param(format!("alpha_max = {} outside (0, 1]", self.alpha_max)));
        }
        if !(self.init_fraction > 0.0 && self.init_fraction <= 1.0) {
            return Err(Error::param(format!("init_fraction = {} outside (0, 1]", self.init_fraction)));
        }
        if self.restarts == 0 {
            return Err(Error::param("restarts must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// The highest-scoring subset found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub score: f64,
    pub alpha_star: f64,
    /// Row indices of the p-value matrix, ascending.
    pub sentences: Vec<usize>,
    /// Column indices, ascending.
    pub positions: Vec<usize>,
    pub restart_scores: Vec<f64>,
    pub iterations_used: usize,
    pub config: ScanConfig,
}

impl ScanResult {
    /// Re-derive the score from the subsets and `alpha_star`.
    pub fn recompute_score(&self, p: &PValueMatrix) -> f64 {
        subset_score(p, &self.sentences, &self.positions, self.alpha_star, self.config.score_kind)
    }
}
