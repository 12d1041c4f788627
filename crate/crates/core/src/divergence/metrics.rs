use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::hull::hull_centroid_distance;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two-cluster separation between matching (`q+`) and non-matching (`q-`)
/// point sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationMetrics<T> {
    pub silhouette: T,
    /// `+inf` when the within-cluster dispersion is zero; see `ch_infinite`.
    pub calinski_harabasz: T,
    pub davies_bouldin: T,
    pub centroid_distance: T,
    pub ch_infinite: bool,
}

/// The three clustering scores, without the centroid distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterScores<T> {
    pub silhouette: T,
    pub calinski_harabasz: T,
    pub davies_bouldin: T,
    pub ch_infinite: bool,
}

fn dist<T: Real>(a: ArrayView1<T>, b: ArrayView1<T>) -> T {
    a.iter().zip(b.iter()).map(|(x, y)| (*x - *y) * (*x - *y)).sum::<T>().sqrt()
}

fn check_sets<T: Real>(a: &ArrayView2<T>, b: &ArrayView2<T>) -> Result<()> {
    if a.nrows() < 2 || b.nrows() < 2 {
        return Err(Error::param(format!(
            "each set needs at least 2 points (got {} and {})",
            a.nrows(),
            b.nrows()
        )));
    }
    if a.ncols() != b.ncols() {
        return Err(Error::Dimension(format!("{} vs {} dimensions", a.ncols(), b.ncols())));
    }
    Ok(())
}

fn centroid<T: Real>(x: &ArrayView2<T>) -> Array1<T> {
    x.mean_axis(Axis(0)).expect("non-empty")
}

/// Mean silhouette over both sets with Euclidean distance.
pub fn silhouette<T: Real>(a: ArrayView2<T>, b: ArrayView2<T>) -> Result<T> {
    check_sets(&a, &b)?;
    let mut total = T::zero();
    for (own, other) in [(&a, &b), (&b, &a)] {
        let n_own = T::from_usize_lossy(own.nrows() - 1);
        let n_other = T::from_usize_lossy(other.nrows());
        for (i, p) in own.rows().into_iter().enumerate() {
            let intra: T = own
                .rows()
                .into_iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| dist(p, q))
                .sum::<T>()
                / n_own;
            let inter: T = other.rows().into_iter().map(|q| dist(p, q)).sum::<T>() / n_other;
            let denom = intra.max(inter);
            if denom > T::zero() {
                total += (inter - intra) / denom;
            }
        }
    }
    Ok(total / T::from_usize_lossy(a.nrows() + b.nrows()))
}

/// Calinski-Harabasz with K = 2. Returns `(score, infinite)`.
pub fn calinski_harabasz<T: Real>(a: ArrayView2<T>, b: ArrayView2<T>) -> Result<(T, bool)> {
    check_sets(&a, &b)?;
    let n = a.nrows() + b.nrows();
    let ca = centroid(&a);
    let cb = centroid(&b);
    let overall = (&ca * T::from_usize_lossy(a.nrows()) + &cb * T::from_usize_lossy(b.nrows())) / T::from_usize_lossy(n);
    let sq = |x: ArrayView1<T>, c: ArrayView1<T>| dist(x, c).powi(2);
    let between = T::from_usize_lossy(a.nrows()) * sq(ca.view(), overall.view())
        + T::from_usize_lossy(b.nrows()) * sq(cb.view(), overall.view());
    let within: T = a.rows().into_iter().map(|p| sq(p, ca.view())).sum::<T>()
        + b.rows().into_iter().map(|p| sq(p, cb.view())).sum::<T>();
    if within == T::zero() {
        return Ok((T::infinity(), true));
    }
    // (between / (K - 1)) / (within / (N - K)), K = 2
    Ok((between * T::from_usize_lossy(n - 2) / within, false))
}

/// Davies-Bouldin with K = 2: (s_a + s_b) / d(c_a, c_b), where s is the mean
/// distance of a cluster's points to its centroid. Coincident centroids or
/// zero spread give 0.
pub fn davies_bouldin<T: Real>(a: ArrayView2<T>, b: ArrayView2<T>) -> Result<T> {
    check_sets(&a, &b)?;
    let ca = centroid(&a);
    let cb = centroid(&b);
    let spread = |x: &ArrayView2<T>, c: &Array1<T>| {
        x.rows().into_iter().map(|p| dist(p, c.view())).sum::<T>() / T::from_usize_lossy(x.nrows())
    };
    let sa = spread(&a, &ca);
    let sb = spread(&b, &cb);
    let d = dist(ca.view(), cb.view());
    let tiny = T::epsilon() * T::lit(8.0);
    if d <= tiny || (sa + sb) <= tiny {
        return Ok(T::zero());
    }
    Ok((sa + sb) / d)
}

pub fn cluster_scores<T: Real>(a: ArrayView2<T>, b: ArrayView2<T>) -> Result<ClusterScores<T>> {
    let (ch, inf) = calinski_harabasz(a, b)?;
    Ok(ClusterScores {
        silhouette: silhouette(a, b)?,
        calinski_harabasz: ch,
        davies_bouldin: davies_bouldin(a, b)?,
        ch_infinite: inf,
    })
}

/// All four metrics on the same point sets. The centroid distance uses the
/// convex-hull vertex centroids, so the sets must live in 1 to 3 dimensions.
pub fn separation_metrics<T: Real>(q_plus: ArrayView2<T>, q_minus: ArrayView2<T>) -> Result<SeparationMetrics<T>> {
    let s = cluster_scores(q_plus, q_minus)?;
    Ok(SeparationMetrics {
        silhouette: s.silhouette,
        calinski_harabasz: s.calinski_harabasz,
        davies_bouldin: s.davies_bouldin,
        centroid_distance: hull_centroid_distance(q_plus, q_minus)?,
        ch_infinite: s.ch_infinite,
    })
}
