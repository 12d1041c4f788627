//! Activation storage: the ACTV format, the dataset manifest and the
//! filtered/sampled views consumed by every analysis.

pub mod actv;
mod manifest;

use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub use manifest::{
    topic_of, DatasetManifest, Direction, MatrixEntry, Selection, SentenceRecord, Topic, MIN_LABEL_CONFIDENCE,
    PERSONA_CATALOG, PER_DIRECTION,
};

/// Where a row of a selected matrix came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowOrigin {
    pub persona: String,
    pub direction: Direction,
    pub layer: usize,
}

/// Last-token activations of M sentences at one layer: an M×J f32 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationMatrix {
    pub model_id: String,
    pub layer: usize,
    pub sentence_ids: Vec<String>,
    pub values: Array2<f32>,
    /// Per-row provenance; empty when the matrix was not built by a selection.
    pub origins: Vec<RowOrigin>,
}

impl ActivationMatrix {
    pub fn new(model_id: impl Into<String>, layer: usize, sentence_ids: Vec<String>, values: Array2<f32>) -> Result<Self> {
        let m = ActivationMatrix {
            model_id: model_id.into(),
            layer,
            sentence_ids,
            values,
            origins: Vec::new(),
        };
        m.validate()?;
        Ok(m)
    }

    /// Matrix with placeholder ids `row-0`, `row-1`, ...
    pub fn from_values(values: Array2<f32>) -> Result<Self> {
        let ids = (0..values.nrows()).map(|i| format!("row-{i}")).collect();
        Self::new("", 0, ids, values)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sentence_ids.len() != self.values.nrows() {
            return Err(Error::Dimension(format!(
                "{} sentence ids for {} rows",
                self.sentence_ids.len(),
                self.values.nrows()
            )));
        }
        if !self.origins.is_empty() && self.origins.len() != self.values.nrows() {
            return Err(Error::Dimension(format!(
                "{} row origins for {} rows",
                self.origins.len(),
                self.values.nrows()
            )));
        }
        if let Some(((row, col), _)) = self.values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    /// Rows at `indices`, in that order, with their ids and origins.
    pub fn take_rows(&self, indices: &[usize]) -> ActivationMatrix {
        ActivationMatrix {
            model_id: self.model_id.clone(),
            layer: self.layer,
            sentence_ids: indices.iter().map(|&i| self.sentence_ids[i].clone()).collect(),
            values: self.values.select(Axis(0), indices),
            origins: if self.origins.is_empty() {
                Vec::new()
            } else {
                indices.iter().map(|&i| self.origins[i].clone()).collect()
            },
        }
    }

    /// Row-wise concatenation. All parts must share J.
    pub fn concat(parts: &[&ActivationMatrix]) -> Result<ActivationMatrix> {
        let first = parts.first().ok_or_else(|| Error::EmptySelection("nothing to concatenate".into()))?;
        let cols = first.n_cols();
        if let Some(bad) = parts.iter().find(|p| p.n_cols() != cols) {
            return Err(Error::Dimension(format!("column count {} vs {}", bad.n_cols(), cols)));
        }
        let views: Vec<_> = parts.iter().map(|p| p.values.view()).collect();
        let values = ndarray::concatenate(Axis(0), &views).map_err(|e| Error::Dimension(e.to_string()))?;
        let keep_origins = parts.iter().all(|p| !p.origins.is_empty());
        Ok(ActivationMatrix {
            model_id: first.model_id.clone(),
            layer: first.layer,
            sentence_ids: parts.iter().flat_map(|p| p.sentence_ids.iter().cloned()).collect(),
            values,
            origins: if keep_origins {
                parts.iter().flat_map(|p| p.origins.iter().cloned()).collect()
            } else {
                Vec::new()
            },
        })
    }

    /// Values widened to f64 for the numeric routines.
    pub fn to_f64(&self) -> Array2<f64> {
        self.values.mapv(f64::from)
    }
}

/// Write the matrix values as an ACTV file.
pub fn write_matrix(matrix: &ActivationMatrix, path: impl AsRef<Path>) -> Result<()> {
    matrix.validate()?;
    actv::write_values(&matrix.values, path.as_ref())
}

/// Load an ACTV file. The format carries dimensions only, so the returned
/// matrix has placeholder ids; [`DatasetManifest::load_entry`] attaches the
/// real metadata.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<ActivationMatrix> {
    let values = actv::read_values(path.as_ref())?;
    ActivationMatrix::from_values(values)
}

/// `n` distinct rows drawn uniformly without replacement, in draw order.
pub fn sample(matrix: &ActivationMatrix, n: usize, seed: u64) -> Result<ActivationMatrix> {
    let mut rng = rng::stream(seed, 0);
    sample_with(matrix, n, &mut rng)
}

pub(crate) fn sample_with(matrix: &ActivationMatrix, n: usize, rng: &mut rng::StreamRng) -> Result<ActivationMatrix> {
    let m = matrix.n_rows();
    if n > m {
        return Err(Error::param(format!("cannot sample {n} rows from {m}")));
    }
    let picked = index::sample(rng, m, n).into_vec();
    Ok(matrix.take_rows(&picked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn numbered(m: usize, j: usize) -> ActivationMatrix {
        let values = Array2::from_shape_fn((m, j), |(r, c)| (r * j + c) as f32);
        ActivationMatrix::from_values(values).unwrap()
    }

    #[test]
    fn roundtrip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.actv");
        let m = numbered(4, 5);
        write_matrix(&m, &path).unwrap();
        let back = load_matrix(&path).unwrap();
        assert_eq!(back.values, m.values);
    }

    #[test]
    fn sample_full_is_permutation() {
        let m = numbered(30, 2);
        let s = sample(&m, 30, 3).unwrap();
        let mut ids = s.sentence_ids.clone();
        ids.sort();
        let mut orig = m.sentence_ids.clone();
        orig.sort();
        assert_eq!(ids, orig);
    }

    #[test]
    fn sample_deterministic() {
        let m = numbered(300, 3);
        let a = sample(&m, 100, 7).unwrap();
        let b = sample(&m, 100, 7).unwrap();
        assert_eq!(a, b);
        let mut uniq = a.sentence_ids.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 100);
    }

    #[test]
    fn sample_too_many() {
        let m = numbered(300, 1);
        assert!(matches!(sample(&m, 301, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn sample_rows_are_source_rows() {
        let m = numbered(50, 4);
        let s = sample(&m, 20, 11).unwrap();
        for (i, id) in s.sentence_ids.iter().enumerate() {
            let src: usize = id.trim_start_matches("row-").parse().unwrap();
            assert_eq!(s.values.row(i), m.values.row(src));
        }
    }

    #[test]
    fn sample_frequencies_are_uniform() {
        // each row's inclusion frequency over 10,000 seeded draws is within
        // 5 sigma of n/M
        let (m_rows, n, draws) = (30usize, 10usize, 10_000usize);
        let m = numbered(m_rows, 1);
        let mut counts = vec![0usize; m_rows];
        let mut rng = rng::stream(99, 0);
        for _ in 0..draws {
            let s = sample_with(&m, n, &mut rng).unwrap();
            for id in &s.sentence_ids {
                counts[id.trim_start_matches("row-").parse::<usize>().unwrap()] += 1;
            }
        }
        let p = n as f64 / m_rows as f64;
        let mean = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 5.0 * sd, "count {c} vs {mean}");
        }
    }

    #[test]
    fn concat_counts_rows() {
        let a = numbered(3, 2);
        let b = numbered(5, 2);
        let c = ActivationMatrix::concat(&[&a, &b]).unwrap();
        assert_eq!(c.n_rows(), 8);
        let bad = numbered(2, 3);
        assert!(ActivationMatrix::concat(&[&a, &bad]).is_err());
    }
}
