use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kmeans::baseline_kmeans;
use super::task::{Level, ScanTask};
use crate::divergence::Stat;
use crate::error::{Error, Result};
use crate::rng;
use crate::scan::{empirical_pvalues, scan, ScanConfig};
use crate::store::ActivationMatrix;

const RUN_TAG: u32 = 0x7e57;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ConsensusMode {
    /// Positions selected in at least `tau` of the runs.
    Frequency { tau: f64 },
    /// Positions selected in any run.
    Union,
    /// Positions selected in every run.
    Intersection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationConfig {
    pub n_runs: usize,
    pub test_size: usize,
    pub h1_fraction: f64,
    pub consensus: ConsensusMode,
    pub seed: u64,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        LocalizationConfig {
            n_runs: 100,
            test_size: 200,
            h1_fraction: 0.5,
            consensus: ConsensusMode::Frequency { tau: 0.5 },
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    /// Nothing was detected; precision is reported as 1.
    pub empty_detection: bool,
}

/// Precision and recall of detected ids against the H1 ids of a test set.
pub fn precision_recall<S: AsRef<str>>(detected: &[S], truth_h1: &[S], test_universe: &[S]) -> Result<PrecisionRecall> {
    let universe: HashSet<&str> = test_universe.iter().map(AsRef::as_ref).collect();
    let truth: HashSet<&str> = truth_h1.iter().map(AsRef::as_ref).collect();
    let found: HashSet<&str> = detected.iter().map(AsRef::as_ref).collect();
    if truth.is_empty() {
        return Err(Error::param("truth set is empty"));
    }
    if let Some(x) = found.iter().chain(truth.iter()).find(|x| !universe.contains(*x)) {
        return Err(Error::param(format!("`{x}` is not in the test universe")));
    }
    let hits = found.intersection(&truth).count() as f64;
    let (precision, empty) = if found.is_empty() { (1.0, true) } else { (hits / found.len() as f64, false) };
    Ok(PrecisionRecall { precision, recall: hits / truth.len() as f64, empty_detection: empty })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub precision: f64,
    pub recall: f64,
    pub score: f64,
    pub alpha_star: f64,
    pub n_sentences: usize,
    pub n_positions: usize,
    pub empty_detection: bool,
    /// The test set held no H1 rows, so every detection is a false positive.
    pub spurious: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub level: Level,
    pub target: String,
    pub layer: usize,
    /// Number of positions (columns) scanned.
    pub dim: usize,
    pub n_runs: usize,
    pub precision: Stat,
    pub recall: Stat,
    pub score: Stat,
    pub consensus: Vec<usize>,
    pub empty_consensus: bool,
    /// ACTV file (1×J) holding `selection_frequency`, when written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection_frequency_path: Option<String>,
    #[serde(skip)]
    pub selection_frequency: Vec<f64>,
    pub runs: Vec<RunRecord>,
    pub scan_config: ScanConfig,
    pub config: LocalizationConfig,
}

impl LocalizationReport {
    /// Consensus under a different rule, from the stored frequencies.
    pub fn consensus_with(&self, mode: ConsensusMode) -> Vec<usize> {
        consensus_set(&self.selection_frequency, mode)
    }
}

pub fn consensus_set(freq: &[f64], mode: ConsensusMode) -> Vec<usize> {
    let keep = |f: f64| match mode {
        ConsensusMode::Frequency { tau } => f >= tau,
        ConsensusMode::Union => f > 0.0,
        ConsensusMode::Intersection => f >= 1.0,
    };
    freq.iter().enumerate().filter(|(_, f)| keep(**f)).map(|(j, _)| j).collect()
}

struct RunOutput {
    record: RunRecord,
    positions: Vec<usize>,
}

struct TestDraw {
    test: ActivationMatrix,
    h1_ids: Vec<String>,
    rng: rng::StreamRng,
}

/// The test set of run `run`: H1 and H0 rows sampled without replacement,
/// then shuffled.
fn draw_test(task: &ScanTask, cfg: &LocalizationConfig, run: usize) -> Result<TestDraw> {
    let mut rng = rng::stream2(cfg.seed, RUN_TAG, run as u32);
    let n1 = ((cfg.test_size as f64) * cfg.h1_fraction).round() as usize;
    let n0 = cfg.test_size - n1;
    let h1_rows = index::sample(&mut rng, task.test_pool_h1.n_rows(), n1).into_vec();
    let h0_rows = index::sample(&mut rng, task.test_pool_h0.n_rows(), n0).into_vec();
    let h1 = task.test_pool_h1.take_rows(&h1_rows);
    let h0 = task.test_pool_h0.take_rows(&h0_rows);
    let joined = ActivationMatrix::concat(&[&h1, &h0])?;
    // shuffle so index tie-breaks in the scan cannot favor either pool
    let mut order: Vec<usize> = (0..joined.n_rows()).collect();
    order.shuffle(&mut rng);
    Ok(TestDraw { test: joined.take_rows(&order), h1_ids: h1.sentence_ids, rng })
}

fn one_run(task: &ScanTask, scan_cfg: &ScanConfig, cfg: &LocalizationConfig, run: usize) -> Result<RunOutput> {
    let TestDraw { test, h1_ids, mut rng } = draw_test(task, cfg, run)?;
    let p = empirical_pvalues(&task.background, &test)?;
    let run_cfg = ScanConfig { seed: rng.next_u64(), ..scan_cfg.clone() };
    let result = scan(&p, &run_cfg)?;

    let detected: Vec<&str> = result.sentences.iter().map(|&i| test.sentence_ids[i].as_str()).collect();
    let truth: Vec<&str> = h1_ids.iter().map(String::as_str).collect();
    let universe: Vec<&str> = test.sentence_ids.iter().map(String::as_str).collect();
    let (pr, spurious) = if truth.is_empty() {
        (PrecisionRecall { precision: 0.0, recall: 0.0, empty_detection: detected.is_empty() }, !detected.is_empty())
    } else {
        (precision_recall(&detected, &truth, &universe)?, false)
    };
    Ok(RunOutput {
        record: RunRecord {
            precision: pr.precision,
            recall: pr.recall,
            score: result.score,
            alpha_star: result.alpha_star,
            n_sentences: result.sentences.len(),
            n_positions: result.positions.len(),
            empty_detection: pr.empty_detection,
            spurious,
        },
        positions: result.positions,
    })
}

fn check_config(task: &ScanTask, cfg: &LocalizationConfig) -> Result<()> {
    if cfg.n_runs == 0 {
        return Err(Error::param("n_runs must be at least 1"));
    }
    if cfg.test_size == 0 {
        return Err(Error::param("test_size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&cfg.h1_fraction) {
        return Err(Error::param(format!("h1_fraction {} outside [0, 1]", cfg.h1_fraction)));
    }
    if let ConsensusMode::Frequency { tau } = cfg.consensus {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::param(format!("tau {tau} outside [0, 1]")));
        }
    }
    let n1 = ((cfg.test_size as f64) * cfg.h1_fraction).round() as usize;
    let n0 = cfg.test_size - n1;
    if n1 > task.test_pool_h1.n_rows() || n0 > task.test_pool_h0.n_rows() {
        return Err(Error::param(format!(
            "test draw of {n1} H1 + {n0} H0 rows exceeds pools of {} and {}",
            task.test_pool_h1.n_rows(),
            task.test_pool_h0.n_rows()
        )));
    }
    Ok(())
}

/// Repeated scans on fresh test draws; aggregates precision/recall of the
/// detected sentences and how often each position is selected.
pub fn run_localization(task: &ScanTask, scan_cfg: &ScanConfig, cfg: &LocalizationConfig) -> Result<LocalizationReport> {
    scan_cfg.validate()?;
    check_config(task, cfg)?;

    let outputs = (0..cfg.n_runs)
        .into_par_iter()
        .map(|r| one_run(task, scan_cfg, cfg, r))
        .collect::<Result<Vec<_>>>()?;

    let j = task.background.n_cols();
    let mut counts = vec![0usize; j];
    for o in &outputs {
        for &p in &o.positions {
            counts[p] += 1;
        }
    }
    let selection_frequency: Vec<f64> = counts.iter().map(|&c| c as f64 / cfg.n_runs as f64).collect();
    let consensus = consensus_set(&selection_frequency, cfg.consensus);
    let runs: Vec<RunRecord> = outputs.into_iter().map(|o| o.record).collect();
    let col = |f: fn(&RunRecord) -> f64| runs.iter().map(f).collect::<Vec<_>>();

    Ok(LocalizationReport {
        level: task.level,
        target: task.target.clone(),
        layer: task.layer,
        dim: j,
        n_runs: cfg.n_runs,
        precision: Stat::of(&col(|r| r.precision)),
        recall: Stat::of(&col(|r| r.recall)),
        score: Stat::of(&col(|r| r.score)),
        empty_consensus: consensus.is_empty(),
        consensus,
        selection_frequency_path: None,
        selection_frequency,
        runs,
        scan_config: scan_cfg.clone(),
        config: cfg.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub precision: Stat,
    pub recall: Stat,
    pub runs: Vec<PrecisionRecall>,
}

/// Two-cluster KMeans on the same test draws `run_localization` scans.
pub fn run_kmeans_baseline(task: &ScanTask, cfg: &LocalizationConfig) -> Result<BaselineReport> {
    check_config(task, cfg)?;
    if cfg.h1_fraction == 0.0 {
        return Err(Error::param("the baseline needs H1 rows in the test set"));
    }
    let runs = (0..cfg.n_runs)
        .into_par_iter()
        .map(|r| {
            let mut draw = draw_test(task, cfg, r)?;
            baseline_kmeans(&draw.test, &draw.h1_ids, draw.rng.next_u64())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaselineReport {
        precision: Stat::of(&runs.iter().map(|r| r.precision).collect::<Vec<_>>()),
        recall: Stat::of(&runs.iter().map(|r| r.recall).collect::<Vec<_>>()),
        runs,
    })
}
