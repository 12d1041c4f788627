use super::ltss::alpha_grid;
use super::score::score_counts;
use super::{PValueMatrix, ScanConfig, ScanResult};
use crate::error::{Error, Result};

pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Exhaustive maximum over every non-empty sentence subset × position
/// subset and every threshold in the matrix-wide candidate grid.
///
/// Enumeration order is sentence mask, then position mask, then alpha,
/// all ascending; the first strict maximum wins.
pub fn brute_force_scan(p: &PValueMatrix, cfg: &ScanConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let (rows, cols) = p.values.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::param("empty p-value matrix"));
    }
    if rows > BRUTE_FORCE_LIMIT || cols > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { rows, cols });
    }
    let grid = alpha_grid(p.values.iter().copied(), cfg.alpha_max);

    let mut best: Option<(f64, u32, u32, f64)> = None;
    let mut cells: Vec<f64> = Vec::with_capacity(rows * cols);
    for rmask in 1u32..(1 << rows) {
        for cmask in 1u32..(1 << cols) {
            cells.clear();
            for i in (0..rows).filter(|i| rmask >> i & 1 == 1) {
                for j in (0..cols).filter(|j| cmask >> j & 1 == 1) {
                    cells.push(p.values[[i, j]]);
                }
            }
            cells.sort_by(f64::total_cmp);
            let mut n_alpha = 0;
            for &alpha in &grid {
                while n_alpha < cells.len() && cells[n_alpha] <= alpha {
                    n_alpha += 1;
                }
                let s: f64 = score_counts(cells.len(), n_alpha, alpha, cfg.score_kind);
                if best.is_none_or(|(b, ..)| s > b) {
                    best = Some((s, rmask, cmask, alpha));
                }
            }
        }
    }
    let (score, rmask, cmask, alpha) = best.expect("non-empty instance");
    Ok(ScanResult {
        score,
        alpha_star: alpha,
        sentences: (0..rows).filter(|i| rmask >> i & 1 == 1).collect(),
        positions: (0..cols).filter(|j| cmask >> j & 1 == 1).collect(),
        restart_scores: Vec::new(),
        iterations_used: 0,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::scan;
    use ndarray::{array, Array2};

    #[test]
    fn single_cell_matches_scan() {
        let p = PValueMatrix::new(array![[0.01]], 99).unwrap();
        let cfg = ScanConfig::default();
        let b = brute_force_scan(&p, &cfg).unwrap();
        let s = scan(&p, &cfg).unwrap();
        assert_eq!((b.score, &b.sentences, &b.positions), (s.score, &s.sentences, &s.positions));
    }

    #[test]
    fn all_equal_is_canonical_zero() {
        let p = PValueMatrix::new(Array2::from_elem((3, 4), 0.7), 9).unwrap();
        let b = brute_force_scan(&p, &ScanConfig::default()).unwrap();
        assert_eq!(b.score, 0.0);
        assert_eq!(b.sentences, vec![0]);
        assert_eq!(b.positions, vec![0]);
    }

    #[test]
    fn too_large() {
        let p = PValueMatrix::new(Array2::from_elem((9, 2), 0.5), 9).unwrap();
        assert!(matches!(brute_force_scan(&p, &ScanConfig::default()), Err(Error::TooLarge { .. })));
    }
}
