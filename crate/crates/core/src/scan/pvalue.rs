use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::ActivationMatrix;

/// Which side of the background distribution counts as anomalous.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// High activations are anomalous.
    #[default]
    Upper,
    /// `2 * min(p_upper, p_lower)`, capped at 1.
    TwoSided,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PValueOptions {
    pub tail: TailMode,
    /// Count only background values strictly greater than the test value.
    pub strict: bool,
}

/// Empirical p-values of test activations, one per (sentence, position).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueMatrix {
    pub values: Array2<f64>,
    pub background_size: usize,
}

impl PValueMatrix {
    /// Wrap raw p-values, checking every entry lies in (0, 1].
    pub fn new(values: Array2<f64>, background_size: usize) -> Result<Self> {
        if let Some(((row, col), _)) = values.indexed_iter().find(|(_, v)| !(**v > 0.0 && **v <= 1.0)) {
            return Err(Error::param(format!("p-value at ({row}, {col}) outside (0, 1]")));
        }
        Ok(PValueMatrix { values, background_size })
    }

    pub fn n_sentences(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_positions(&self) -> usize {
        self.values.ncols()
    }
}

/// `p = (#{b >= v} + 1) / (N + 1)` per column, against the background rows.
pub fn empirical_pvalues(background: &ActivationMatrix, test: &ActivationMatrix) -> Result<PValueMatrix> {
    empirical_pvalues_with(background.values.view(), test.values.view(), PValueOptions::default())
}

pub fn empirical_pvalues_with(
    background: ArrayView2<f32>,
    test: ArrayView2<f32>,
    opts: PValueOptions,
) -> Result<PValueMatrix> {
    let n = background.nrows();
    if n == 0 {
        return Err(Error::param("empty background"));
    }
    if background.ncols() != test.ncols() {
        return Err(Error::Dimension(format!(
            "background has {} columns, test has {}",
            background.ncols(),
            test.ncols()
        )));
    }
    let denom = (n + 1) as f64;
    let columns: Vec<Vec<f64>> = (0..test.ncols())
        .into_par_iter()
        .map(|j| {
            let mut bg: Vec<f32> = background.column(j).to_vec();
            bg.sort_by(f32::total_cmp);
            test.column(j)
                .iter()
                .map(|&v| {
                    // first index with b >= v (or b > v when strict)
                    let lo = if opts.strict { bg.partition_point(|&b| b <= v) } else { bg.partition_point(|&b| b < v) };
                    let upper = (n - lo + 1) as f64 / denom;
                    match opts.tail {
                        TailMode::Upper => upper,
                        TailMode::TwoSided => (2.0 * upper.min(1.0 - upper + 1.0 / denom)).min(1.0),
                    }
                })
                .collect()
        })
        .collect();
    let mut values = Array2::<f64>::zeros((test.nrows(), test.ncols()));
    for (j, col) in columns.into_iter().enumerate() {
        for (i, p) in col.into_iter().enumerate() {
            values[[i, j]] = p;
        }
    }
    Ok(PValueMatrix { values, background_size: n })
}
