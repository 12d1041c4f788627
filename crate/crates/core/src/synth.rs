//! Planted-signal activations with known ground truth, and a harness that
//! measures how well the scan recovers it.
//!
//! Noise is i.i.d. standard normal. The scan only sees ranks against the
//! background, so any exchangeable noise law behaves the same way.

use std::collections::HashSet;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::Stat;
use crate::error::{Error, Result};
use crate::rng;
use crate::scan::{empirical_pvalues, scan, ScanConfig};
use crate::store::ActivationMatrix;

const BACKGROUND_STREAM: u32 = 0;
const TEST_STREAM: u32 = 1;
const SYNTH_TAG_SHUFFLE: u32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Planted {
    /// Positions `0..n`.
    Count(usize),
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_background: usize,
    pub n_signal: usize,
    /// Null rows in the test set; `None` means `n_background / 2`.
    #[serde(default)]
    pub n_null_test: Option<usize>,
    pub dim: usize,
    pub planted: Planted,
    pub mu: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_background: 300,
            n_signal: 100,
            n_null_test: Some(100),
            dim: 512,
            planted: Planted::Count(40),
            mu: 2.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn planted_positions(&self) -> Vec<usize> {
        let mut v = match &self.planted {
            Planted::Count(n) => (0..*n).collect(),
            Planted::Explicit(v) => v.clone(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn null_test_rows(&self) -> usize {
        self.n_null_test.unwrap_or(self.n_background / 2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_background < 2 {
            return Err(Error::param("n_background must be at least 2"));
        }
        if self.dim == 0 {
            return Err(Error::param("dim must be at least 1"));
        }
        if let Some(&m) = self.planted_positions().last() {
            if m >= self.dim {
                return Err(Error::param(format!("planted position {m} >= dim {}", self.dim)));
            }
        }
        if !self.mu.is_finite() {
            return Err(Error::param("mu must be finite"));
        }
        if self.n_signal + self.null_test_rows() == 0 {
            return Err(Error::param("test set would be empty"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub signal_row_ids: Vec<String>,
    pub planted_position_ids: Vec<usize>,
}

fn normal_matrix(rows: usize, cols: usize, rng: &mut rng::StreamRng) -> Array2<f32> {
    Array2::from_shape_simple_fn((rows, cols), || {
        let z: f64 = StandardNormal.sample(rng);
        z as f32
    })
}

/// Background and test matrices; test rows are shuffled so signal rows sit
/// at random indices.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<(ActivationMatrix, ActivationMatrix, SynthTruth)> {
    cfg.validate()?;
    let planted = cfg.planted_positions();
    let bg_values = normal_matrix(cfg.n_background, cfg.dim, &mut rng::stream2(cfg.seed, BACKGROUND_STREAM, 0));
    let bg_ids = (0..cfg.n_background).map(|i| format!("bg-{i}")).collect();
    let background = ActivationMatrix::new("synthetic", 0, bg_ids, bg_values)?;

    let n_null = cfg.null_test_rows();
    let mut test_rng = rng::stream2(cfg.seed, TEST_STREAM, 0);
    let mut values = normal_matrix(n_null + cfg.n_signal, cfg.dim, &mut test_rng);
    let shift = cfg.mu as f32;
    for r in n_null..n_null + cfg.n_signal {
        for &j in &planted {
            values[[r, j]] += shift;
        }
    }
    let ids: Vec<String> = (0..n_null)
        .map(|i| format!("null-{i}"))
        .chain((0..cfg.n_signal).map(|i| format!("signal-{i}")))
        .collect();
    let unshuffled = ActivationMatrix::new("synthetic", 0, ids, values)?;
    let mut order: Vec<usize> = (0..unshuffled.n_rows()).collect();
    order.shuffle(&mut rng::stream2(cfg.seed, SYNTH_TAG_SHUFFLE, 0));
    let test = unshuffled.take_rows(&order);

    let truth = SynthTruth {
        signal_row_ids: (0..cfg.n_signal).map(|i| format!("signal-{i}")).collect(),
        planted_position_ids: planted,
    };
    Ok((background, test, truth))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPower {
    pub seed: u64,
    pub sentence_precision: f64,
    pub sentence_recall: f64,
    pub position_precision: f64,
    pub position_recall: f64,
    pub score: f64,
    pub n_sentences: usize,
    pub n_positions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMetrics {
    pub sentence_precision: Stat,
    pub sentence_recall: Stat,
    pub position_precision: Stat,
    pub position_recall: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub config: SynthConfig,
    pub scan_config: ScanConfig,
    pub n_seeds: usize,
    pub per_metric: PowerMetrics,
    pub per_seed: Vec<SeedPower>,
}

/// Precision/recall with empty-set conventions: an empty detection has
/// precision 1, an empty truth has recall 1.
fn pr<T: Eq + std::hash::Hash>(found: &HashSet<T>, truth: &HashSet<T>) -> (f64, f64) {
    let hits = found.intersection(truth).count() as f64;
    let p = if found.is_empty() { 1.0 } else { hits / found.len() as f64 };
    let r = if truth.is_empty() { 1.0 } else { hits / truth.len() as f64 };
    (p, r)
}

fn one_seed(synth: &SynthConfig, scan_cfg: &ScanConfig, seed: u64) -> Result<SeedPower> {
    let cfg = SynthConfig { seed, ..synth.clone() };
    let (background, test, truth) = generate_synthetic(&cfg)?;
    let p = empirical_pvalues(&background, &test)?;
    let scan_seed = rng::stream2(scan_cfg.seed, 0x9e37, seed as u32).next_u64();
    let result = scan(&p, &ScanConfig { seed: scan_seed, ..scan_cfg.clone() })?;

    let found_rows: HashSet<&str> = result.sentences.iter().map(|&i| test.sentence_ids[i].as_str()).collect();
    let true_rows: HashSet<&str> = truth.signal_row_ids.iter().map(String::as_str).collect();
    let found_pos: HashSet<usize> = result.positions.iter().copied().collect();
    let true_pos: HashSet<usize> = truth.planted_position_ids.iter().copied().collect();
    let (sp, sr) = pr(&found_rows, &true_rows);
    let (pp, prc) = pr(&found_pos, &true_pos);
    Ok(SeedPower {
        seed,
        sentence_precision: sp,
        sentence_recall: sr,
        position_precision: pp,
        position_recall: prc,
        score: result.score,
        n_sentences: result.sentences.len(),
        n_positions: result.positions.len(),
    })
}

/// Generate, scan and score `n_seeds` independent instances
/// (seeds `synth.seed .. synth.seed + n_seeds`).
pub fn detection_power(synth: &SynthConfig, scan_cfg: &ScanConfig, n_seeds: usize) -> Result<PowerReport> {
    synth.validate()?;
    scan_cfg.validate()?;
    if n_seeds == 0 {
        return Err(Error::param("n_seeds must be at least 1"));
    }
    let per_seed = (0..n_seeds as u64)
        .into_par_iter()
        .map(|s| one_seed(synth, scan_cfg, synth.seed.wrapping_add(s)))
        .collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&SeedPower) -> f64| per_seed.iter().map(f).collect::<Vec<_>>();
    Ok(PowerReport {
        config: synth.clone(),
        scan_config: scan_cfg.clone(),
        n_seeds,
        per_metric: PowerMetrics {
            sentence_precision: Stat::of(&col(|s| s.sentence_precision)),
            sentence_recall: Stat::of(&col(|s| s.sentence_recall)),
            position_precision: Stat::of(&col(|s| s.position_precision)),
            position_recall: Stat::of(&col(|s| s.position_recall)),
        },
        per_seed,
    })
}

/// Layout of a synthetic persona dataset on disk.
///
/// Every persona gets `per_direction` matching and non-matching records.
/// At layer `l`, matching rows are shifted by `layer_shift[l]` on the
/// persona's own block of `planted_per_persona` positions and on its
/// topic's block; non-matching rows are pure noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDataset {
    pub personas: Vec<(String, crate::store::Topic)>,
    pub per_direction: usize,
    pub dim: usize,
    pub layer_shift: Vec<f64>,
    pub planted_per_persona: usize,
    pub model_id: String,
    pub seed: u64,
}

impl SyntheticDataset {
    /// The fourteen catalog personas.
    pub fn catalog(per_direction: usize, dim: usize, layer_shift: Vec<f64>, seed: u64) -> Self {
        SyntheticDataset {
            personas: crate::store::PERSONA_CATALOG.iter().map(|(p, t)| (p.to_string(), *t)).collect(),
            per_direction,
            dim,
            layer_shift,
            planted_per_persona: 4,
            model_id: "synthetic".into(),
            seed,
        }
    }

    fn topic_index(t: crate::store::Topic) -> usize {
        t as usize
    }

    /// Positions shifted for `persona_index` (its own block, then its topic block).
    pub fn planted_for(&self, persona_index: usize) -> (Vec<usize>, Vec<usize>) {
        let k = self.planted_per_persona;
        let own = (0..k).map(|i| (persona_index * k + i) % self.dim).collect();
        let t = Self::topic_index(self.personas[persona_index].1);
        let base = self.personas.len() * k;
        let topic = (0..k).map(|i| (base + t * k + i) % self.dim).collect();
        (own, topic)
    }

    /// Write ACTV files and `manifest.json` under `dir`; returns the manifest.
    pub fn write(&self, dir: &std::path::Path) -> Result<crate::store::DatasetManifest> {
        use crate::store::{actv, DatasetManifest, Direction, MatrixEntry, SentenceRecord};
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut records = Vec::new();
        let mut matrices = Vec::new();
        for (pi, (persona, topic)) in self.personas.iter().enumerate() {
            for (di, dir_kind) in [Direction::Matching, Direction::Notmatching].into_iter().enumerate() {
                for r in 0..self.per_direction {
                    records.push(SentenceRecord {
                        id: format!("{persona}/{dir_kind}/{r}"),
                        text: format!("{persona} {dir_kind} statement {r}"),
                        persona: persona.clone(),
                        topic: *topic,
                        direction: dir_kind,
                        label_confidence: 0.85 + 0.15 * ((r % 7) as f64 / 6.0),
                    });
                }
                let (own, shared) = self.planted_for(pi);
                for (layer, &shift) in self.layer_shift.iter().enumerate() {
                    let stream = ((pi * 2 + di) * self.layer_shift.len() + layer) as u32;
                    let mut values = normal_matrix(self.per_direction, self.dim, &mut rng::stream2(self.seed, 0xda7a, stream));
                    if dir_kind == Direction::Matching {
                        for mut row in values.rows_mut() {
                            for &j in own.iter().chain(&shared) {
                                row[j] += shift as f32;
                            }
                        }
                    }
                    let rel = std::path::PathBuf::from(format!("{persona}_{dir_kind}_L{layer}.actv"));
                    actv::write_values(&values, &dir.join(&rel))?;
                    matrices.push(MatrixEntry { persona: persona.clone(), direction: dir_kind, layer, path: rel, sentence_ids: None });
                }
            }
        }
        let manifest = DatasetManifest {
            records,
            matrices,
            model_id: self.model_id.clone(),
            layer_count: self.layer_shift.len(),
            base_dir: dir.to_path_buf(),
        };
        manifest.save(dir.join("manifest.json"))?;
        Ok(manifest)
    }
}
