//! Non-parametric scan statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreKind {
    #[default]
    BerkJones,
    HigherCriticism,
}

impl std::str::FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "berk-jones" | "berkjones" | "bj" => Ok(ScoreKind::BerkJones),
            "higher-criticism" | "highercriticism" | "hc" => Ok(ScoreKind::HigherCriticism),
            _ => Err(Error::Unknown { kind: "score kind", name: s.to_string() }),
        }
    }
}

/// `x ln(x / y)` with `0 ln 0 = 0`.
fn xlogx_over<T: Real>(x: T, y: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x * (x / y).ln()
    }
}

/// Score of `n_alpha` significant p-values out of `n_total` at threshold
/// `alpha`. Only an excess over the expected proportion scores; anything at
/// or below `alpha` is 0.
pub fn npss_score<T: Real>(n_total: usize, n_alpha: usize, alpha: T, kind: ScoreKind) -> Result<T> {
    if n_total == 0 {
        return Err(Error::param("n_total must be at least 1"));
    }
    if n_alpha > n_total {
        return Err(Error::param(format!("n_alpha = {n_alpha} exceeds n_total = {n_total}")));
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::param(format!("alpha = {alpha} outside (0, 1)")));
    }
    Ok(score_counts(n_total, n_alpha, alpha, kind))
}

/// Unchecked core of [`npss_score`]; `alpha >= 1` scores 0.
pub(crate) fn score_counts<T: Real>(n_total: usize, n_alpha: usize, alpha: T, kind: ScoreKind) -> T {
    let n = T::from_usize_lossy(n_total);
    let x = T::from_usize_lossy(n_alpha) / n;
    if x <= alpha || alpha >= T::one() {
        return T::zero();
    }
    match kind {
        ScoreKind::BerkJones => {
            let kl = xlogx_over(x, alpha) + xlogx_over(T::one() - x, T::one() - alpha);
            n * kl
        }
        ScoreKind::HigherCriticism => {
            let excess = T::from_usize_lossy(n_alpha) - n * alpha;
            (excess / (n * alpha * (T::one() - alpha)).sqrt()).max(T::zero())
        }
    }
}
