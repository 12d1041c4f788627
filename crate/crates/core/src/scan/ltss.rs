use super::score::score_counts;
use super::{PValueMatrix, ScanAxis, ScanConfig, ScoreKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LtssResult {
    /// Chosen indices on the free axis, ascending.
    pub subset: Vec<usize>,
    pub score: f64,
    pub alpha: f64,
}

/// Candidate thresholds: distinct values `<= alpha_max` plus `alpha_max`,
/// ascending. The count of p-values at or below `alpha` only changes at
/// observed values, so nothing between them can score higher.
pub fn alpha_grid(values: impl IntoIterator<Item = f64>, alpha_max: f64) -> Vec<f64> {
    let mut g: Vec<f64> = values.into_iter().filter(|&v| v <= alpha_max).collect();
    g.push(alpha_max);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// F of `sentences × positions` at threshold `alpha`.
pub fn subset_score(p: &PValueMatrix, sentences: &[usize], positions: &[usize], alpha: f64, kind: ScoreKind) -> f64 {
    let mut n_alpha = 0;
    for &i in sentences {
        for &j in positions {
            if p.values[[i, j]] <= alpha {
                n_alpha += 1;
            }
        }
    }
    score_counts(sentences.len() * positions.len(), n_alpha, alpha, kind)
}

/// Exact best subset of the free axis for a fixed subset of the other.
///
/// For each candidate alpha, free elements are ranked by how many of their
/// fixed-slice p-values are `<= alpha` (ties by index); the score is
/// non-decreasing in that count at fixed size, so the best subset of each
/// size is a prefix of the ranking. Ties across alphas and sizes keep the
/// smallest alpha, then the smallest prefix.
pub fn ltss_optimize(p: &PValueMatrix, fixed: &[usize], free_axis: ScanAxis, cfg: &ScanConfig) -> Result<LtssResult> {
    let (rows, cols) = p.values.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::param("empty p-value matrix"));
    }
    if fixed.is_empty() {
        return Err(Error::param("fixed subset is empty"));
    }
    let fixed_len = match free_axis {
        ScanAxis::Sentences => cols,
        ScanAxis::Positions => rows,
    };
    if let Some(bad) = fixed.iter().find(|&&i| i >= fixed_len) {
        return Err(Error::param(format!("fixed index {bad} out of range 0..{fixed_len}")));
    }
    let n_free = match free_axis {
        ScanAxis::Sentences => rows,
        ScanAxis::Positions => cols,
    };
    let at = |free: usize, fix: usize| match free_axis {
        ScanAxis::Sentences => p.values[[free, fix]],
        ScanAxis::Positions => p.values[[fix, free]],
    };

    let grid = alpha_grid((0..n_free).flat_map(|i| fixed.iter().map(move |&f| at(i, f))), cfg.alpha_max);
    let g = grid.len();

    // cum[i * g + a]: fixed-slice p-values of element i at or below grid[a]
    let mut cum = vec![0u32; n_free * g];
    for i in 0..n_free {
        let row = &mut cum[i * g..(i + 1) * g];
        for &f in fixed {
            let v = at(i, f);
            if v <= cfg.alpha_max {
                let a = grid.partition_point(|&x| x < v);
                row[a] += 1;
            }
        }
        for a in 1..g {
            row[a] += row[a - 1];
        }
    }

    let m = fixed.len();
    let mut bucket = vec![0usize; m + 1];
    let mut best: Option<(f64, usize, usize)> = None; // (score, grid index, prefix len)
    for (a, &alpha) in grid.iter().enumerate() {
        bucket.iter_mut().for_each(|b| *b = 0);
        for i in 0..n_free {
            bucket[cum[i * g + a] as usize] += 1;
        }
        let mut k = 0;
        let mut n_alpha = 0;
        for c in (0..=m).rev() {
            for _ in 0..bucket[c] {
                k += 1;
                n_alpha += c;
                let s: f64 = score_counts(k * m, n_alpha, alpha, cfg.score_kind);
                if best.is_none_or(|(bs, _, _)| s > bs) {
                    best = Some((s, a, k));
                }
            }
        }
    }

    let (score, a, k) = best.expect("at least one candidate");
    let mut order: Vec<usize> = (0..n_free).collect();
    order.sort_by(|&x, &y| cum[y * g + a].cmp(&cum[x * g + a]).then(x.cmp(&y)));
    let mut subset = order[..k].to_vec();
    subset.sort_unstable();
    Ok(LtssResult { subset, score, alpha: grid[a] })
}
