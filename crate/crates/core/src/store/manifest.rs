use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{actv, ActivationMatrix, RowOrigin};
use crate::error::{Error, Result};

/// Records below this label confidence are dropped by the extractor.
pub const MIN_LABEL_CONFIDENCE: f64 = 0.85;
/// Records kept per (persona, direction).
pub const PER_DIRECTION: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Topic {
    Personality,
    Ethics,
    Politics,
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Topic::Personality => "Personality",
            Topic::Ethics => "Ethics",
            Topic::Politics => "Politics",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Topic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "personality" => Ok(Topic::Personality),
            "ethics" => Ok(Topic::Ethics),
            "politics" => Ok(Topic::Politics),
            _ => Err(Error::Unknown { kind: "topic", name: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Matching,
    Notmatching,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Matching => "matching",
            Direction::Notmatching => "notmatching",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matching" | "+" => Ok(Direction::Matching),
            "notmatching" | "-" => Ok(Direction::Notmatching),
            _ => Err(Error::Unknown { kind: "direction", name: s.to_string() }),
        }
    }
}

/// The fourteen persona datasets and their topics.
pub const PERSONA_CATALOG: [(&str, Topic); 14] = [
    ("agreeableness", Topic::Personality),
    ("conscientiousness", Topic::Personality),
    ("openness", Topic::Personality),
    ("extraversion", Topic::Personality),
    ("neuroticism", Topic::Personality),
    ("subscribes-to-virtue-ethics", Topic::Ethics),
    ("subscribes-to-cultural-relativism", Topic::Ethics),
    ("subscribes-to-deontology", Topic::Ethics),
    ("subscribes-to-utilitarianism", Topic::Ethics),
    ("subscribes-to-moral-nihilism", Topic::Ethics),
    ("politically-conservative", Topic::Politics),
    ("politically-liberal", Topic::Politics),
    ("anti-immigration", Topic::Politics),
    ("anti-LGBTQ-rights", Topic::Politics),
];

pub fn topic_of(persona: &str) -> Option<Topic> {
    PERSONA_CATALOG.iter().find(|(p, _)| *p == persona).map(|(_, t)| *t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    pub text: String,
    pub persona: String,
    pub topic: Topic,
    pub direction: Direction,
    pub label_confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub persona: String,
    pub direction: Direction,
    pub layer: usize,
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    /// Row ids; when absent, the records of (persona, direction) in record order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_ids: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub records: Vec<SentenceRecord>,
    pub matrices: Vec<MatrixEntry>,
    pub model_id: String,
    pub layer_count: usize,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Row filter for [`DatasetManifest::select`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub personas: Vec<String>,
    pub directions: Vec<Direction>,
    pub layer: usize,
}

impl Selection {
    pub fn one(persona: impl Into<String>, direction: Direction, layer: usize) -> Self {
        Selection { personas: vec![persona.into()], directions: vec![direction], layer }
    }
}

impl DatasetManifest {
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut m: DatasetManifest = serde_json::from_str(text)?;
        m.base_dir = base_dir.into();
        m.validate_records()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, base)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        actv::write_atomic(path.as_ref(), self.to_json()?.as_bytes())
    }

    /// Record-level invariants: unique ids, one topic per persona, confidence
    /// at or above the filter threshold, matrix entries naming known personas.
    pub fn validate_records(&self) -> Result<()> {
        let mut ids = HashSet::new();
        let mut topics: HashMap<&str, Topic> = HashMap::new();
        for r in &self.records {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::Manifest(format!("duplicate record id `{}`", r.id)));
            }
            if let Some(t) = topics.insert(r.persona.as_str(), r.topic) {
                if t != r.topic {
                    return Err(Error::Manifest(format!("persona `{}` maps to {t} and {}", r.persona, r.topic)));
                }
            }
            if !(r.label_confidence >= MIN_LABEL_CONFIDENCE && r.label_confidence <= 1.0) {
                return Err(Error::Manifest(format!(
                    "record `{}` has label confidence {} (minimum {MIN_LABEL_CONFIDENCE})",
                    r.id, r.label_confidence
                )));
            }
        }
        for e in &self.matrices {
            if !topics.contains_key(e.persona.as_str()) {
                return Err(Error::Manifest(format!("matrix entry for persona `{}` without records", e.persona)));
            }
            if e.layer >= self.layer_count {
                return Err(Error::Manifest(format!("layer {} >= layer_count {}", e.layer, self.layer_count)));
            }
            if let Some(sids) = &e.sentence_ids {
                if let Some(bad) = sids.iter().find(|s| !ids.contains(s.as_str())) {
                    return Err(Error::Manifest(format!("sentence id `{bad}` not in records")));
                }
            }
        }
        Ok(())
    }

    /// Check every (persona, direction) holds exactly `per_direction` records.
    pub fn validate_counts(&self, per_direction: usize) -> Result<()> {
        let mut counts: BTreeMap<(&str, Direction), usize> = BTreeMap::new();
        for r in &self.records {
            *counts.entry((r.persona.as_str(), r.direction)).or_default() += 1;
        }
        for persona in self.personas() {
            for d in [Direction::Matching, Direction::Notmatching] {
                let n = counts.get(&(persona.as_str(), d)).copied().unwrap_or(0);
                if n != per_direction {
                    return Err(Error::Manifest(format!(
                        "{persona}/{d}: {n} records, expected {per_direction}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Load every referenced matrix and check shapes and J consistency.
    pub fn validate_files(&self) -> Result<()> {
        let mut width = None;
        for e in &self.matrices {
            let m = self.load_entry(e)?;
            match width {
                None => width = Some(m.n_cols()),
                Some(j) if j != m.n_cols() => {
                    return Err(Error::Manifest(format!("{}: J = {} but earlier files have {j}", e.path.display(), m.n_cols())))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Personas in first-appearance order.
    pub fn personas(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.records
            .iter()
            .filter(|r| seen.insert(r.persona.as_str()))
            .map(|r| r.persona.clone())
            .collect()
    }

    pub fn topic(&self, persona: &str) -> Option<Topic> {
        self.records.iter().find(|r| r.persona == persona).map(|r| r.topic)
    }

    pub fn personas_in(&self, topic: Topic) -> Vec<String> {
        self.personas().into_iter().filter(|p| self.topic(p) == Some(topic)).collect()
    }

    /// Layers with at least one matrix, ascending.
    pub fn layers(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.matrices.iter().map(|e| e.layer).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn entry(&self, persona: &str, direction: Direction, layer: usize) -> Option<&MatrixEntry> {
        self.matrices
            .iter()
            .find(|e| e.persona == persona && e.direction == direction && e.layer == layer)
    }

    fn entry_ids(&self, e: &MatrixEntry) -> Vec<String> {
        match &e.sentence_ids {
            Some(ids) => ids.clone(),
            None => self
                .records
                .iter()
                .filter(|r| r.persona == e.persona && r.direction == e.direction)
                .map(|r| r.id.clone())
                .collect(),
        }
    }

    /// Load one matrix with its ids, layer and per-row origin attached.
    pub fn load_entry(&self, e: &MatrixEntry) -> Result<ActivationMatrix> {
        let path = self.resolve(&e.path);
        let values = actv::read_values(&path)?;
        let ids = self.entry_ids(e);
        if ids.len() != values.nrows() {
            return Err(Error::Manifest(format!(
                "{}: {} rows but {} sentence ids",
                path.display(),
                values.nrows(),
                ids.len()
            )));
        }
        let origin = RowOrigin { persona: e.persona.clone(), direction: e.direction, layer: e.layer };
        let mut m = ActivationMatrix::new(self.model_id.clone(), e.layer, ids, values)?;
        m.origins = vec![origin; m.n_rows()];
        Ok(m)
    }

    /// Concatenate the matrices matching `filter`, in manifest order.
    pub fn select(&self, filter: &Selection) -> Result<ActivationMatrix> {
        let known = self.personas();
        for p in &filter.personas {
            if !known.contains(p) {
                return Err(Error::Unknown { kind: "persona", name: p.clone() });
            }
        }
        if !self.layers().contains(&filter.layer) {
            return Err(Error::Unknown { kind: "layer", name: filter.layer.to_string() });
        }
        let parts = self
            .matrices
            .iter()
            .filter(|e| e.layer == filter.layer && filter.personas.contains(&e.persona) && filter.directions.contains(&e.direction))
            .map(|e| self.load_entry(e))
            .collect::<Result<Vec<_>>>()?;
        if parts.iter().all(|p| p.n_rows() == 0) {
            return Err(Error::EmptySelection(format!(
                "no rows for personas {:?}, directions {:?}, layer {}",
                filter.personas, filter.directions, filter.layer
            )));
        }
        let refs: Vec<&ActivationMatrix> = parts.iter().collect();
        ActivationMatrix::concat(&refs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, persona: &str, topic: Topic, direction: Direction, conf: f64) -> SentenceRecord {
        SentenceRecord {
            id: id.into(),
            text: format!("statement {id}"),
            persona: persona.into(),
            topic,
            direction,
            label_confidence: conf,
        }
    }

    #[test]
    fn confidence_threshold_is_inclusive() {
        let m = DatasetManifest {
            records: vec![record("a", "p", Topic::Ethics, Direction::Matching, 0.85)],
            matrices: vec![],
            model_id: "m".into(),
            layer_count: 1,
            base_dir: PathBuf::new(),
        };
        m.validate_records().unwrap();
        let mut low = m.clone();
        low.records[0].label_confidence = 0.8499;
        assert!(low.validate_records().is_err());
    }

    #[test]
    fn persona_with_two_topics_rejected() {
        let m = DatasetManifest {
            records: vec![
                record("a", "p", Topic::Ethics, Direction::Matching, 0.9),
                record("b", "p", Topic::Politics, Direction::Notmatching, 0.9),
            ],
            matrices: vec![],
            model_id: "m".into(),
            layer_count: 1,
            base_dir: PathBuf::new(),
        };
        assert!(m.validate_records().is_err());
    }

    #[test]
    fn catalog_has_fourteen_personas() {
        assert_eq!(PERSONA_CATALOG.len(), 14);
        assert_eq!(PERSONA_CATALOG.iter().filter(|(_, t)| *t == Topic::Politics).count(), 4);
        assert_eq!(topic_of("agreeableness"), Some(Topic::Personality));
    }
}
