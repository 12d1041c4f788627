use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::store::{ActivationMatrix, DatasetManifest, Direction, Selection, Topic};

pub const DEFAULT_BACKGROUND_FRACTION: f64 = 2.0 / 3.0;
const SPLIT_TAG: u32 = 0x5917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Level {
    /// Topic against the other topics.
    Topic = 0,
    /// Persona against the other personas of its topic.
    Persona = 1,
    /// Matching against non-matching statements of one persona.
    Direction = 2,
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l as u8
    }
}

impl TryFrom<u8> for Level {
    type Error = Error;

    fn try_from(v: u8) -> Result<Level> {
        match v {
            0 => Ok(Level::Topic),
            1 => Ok(Level::Persona),
            2 => Ok(Level::Direction),
            _ => Err(Error::Unknown { kind: "level", name: v.to_string() }),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// H0/H1 pools for one localization.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTask {
    pub level: Level,
    pub target: String,
    pub layer: usize,
    pub background: ActivationMatrix,
    pub test_pool_h0: ActivationMatrix,
    pub test_pool_h1: ActivationMatrix,
}

pub fn build_level_task(manifest: &DatasetManifest, level: Level, target: &str, layer: usize, split_seed: u64) -> Result<ScanTask> {
    build_level_task_with(manifest, level, target, layer, split_seed, DEFAULT_BACKGROUND_FRACTION)
}

/// Assemble the pools for `level` and split H0 (seeded) into a background
/// share and a held-out test share.
pub fn build_level_task_with(
    manifest: &DatasetManifest,
    level: Level,
    target: &str,
    layer: usize,
    split_seed: u64,
    background_fraction: f64,
) -> Result<ScanTask> {
    if !(background_fraction > 0.0 && background_fraction < 1.0) {
        return Err(Error::param(format!("background fraction {background_fraction} outside (0, 1)")));
    }
    let (h0_sel, h1_sel) = match level {
        Level::Direction | Level::Persona => {
            let topic = manifest
                .topic(target)
                .ok_or_else(|| Error::Unknown { kind: "persona", name: target.to_string() })?;
            let h1 = Selection::one(target, Direction::Matching, layer);
            let h0 = if level == Level::Direction {
                Selection::one(target, Direction::Notmatching, layer)
            } else {
                let others: Vec<String> = manifest.personas_in(topic).into_iter().filter(|p| p != target).collect();
                if others.is_empty() {
                    return Err(Error::EmptySelection(format!("no other personas in topic {topic}")));
                }
                Selection { personas: others, directions: vec![Direction::Matching], layer }
            };
            (h0, h1)
        }
        Level::Topic => {
            let topic: Topic = target.parse()?;
            let inside = manifest.personas_in(topic);
            if inside.is_empty() {
                return Err(Error::Unknown { kind: "topic", name: target.to_string() });
            }
            let outside: Vec<String> = manifest.personas().into_iter().filter(|p| manifest.topic(p) != Some(topic)).collect();
            if outside.is_empty() {
                return Err(Error::EmptySelection(format!("no personas outside topic {topic}")));
            }
            (
                Selection { personas: outside, directions: vec![Direction::Matching], layer },
                Selection { personas: inside, directions: vec![Direction::Matching], layer },
            )
        }
    };
    let h1 = manifest.select(&h1_sel)?;
    let h0 = manifest.select(&h0_sel)?;

    let mut seen = HashSet::new();
    if let Some(dup) = h0.sentence_ids.iter().find(|id| !seen.insert(id.as_str())) {
        return Err(Error::Manifest(format!("sentence `{dup}` appears twice in the H0 pool")));
    }

    let n = h0.n_rows();
    let n_bg = ((n as f64) * background_fraction).round() as usize;
    if n_bg == 0 || n_bg >= n {
        return Err(Error::param(format!("H0 pool of {n} rows too small to split")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream2(split_seed, SPLIT_TAG, 0));
    let (bg_idx, test_idx) = order.split_at_mut(n_bg);
    bg_idx.sort_unstable();
    test_idx.sort_unstable();

    Ok(ScanTask {
        level,
        target: target.to_string(),
        layer,
        background: h0.take_rows(bg_idx),
        test_pool_h0: h0.take_rows(test_idx),
        test_pool_h1: h1,
    })
}
