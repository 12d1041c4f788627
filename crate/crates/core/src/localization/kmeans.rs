use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;

use super::run::{precision_recall, PrecisionRecall};
use crate::error::{Error, Result};
use crate::rng;
use crate::store::ActivationMatrix;

const MAX_ITERS: usize = 300;
const TOL: f64 = 1e-6;
const KMEANS_TAG: u32 = 0x4b4d;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    pub centers: Array2<f64>,
    pub iterations: usize,
}

fn sqdist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Two-means with k-means++ seeding and Lloyd iterations. Stops when the
/// total squared center shift falls to `TOL` times the mean per-column
/// variance, or after 300 iterations.
pub fn kmeans2(x: ArrayView2<f64>, seed: u64) -> Result<KMeansFit> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::param("k-means needs at least 2 rows"));
    }
    let first = x.row(0);
    if x.rows().into_iter().all(|r| r == first) {
        return Err(Error::Degenerate("all rows are identical".into()));
    }
    let mut rng = rng::stream2(seed, KMEANS_TAG, 0);

    let c0 = rng.random_range(0..n);
    let d2: Vec<f64> = x.rows().into_iter().map(|r| sqdist(r, x.row(c0))).collect();
    let total: f64 = d2.iter().sum();
    let mut target = rng.random::<f64>() * total;
    let mut c1 = n - 1;
    for (i, d) in d2.iter().enumerate() {
        if *d > 0.0 && target < *d {
            c1 = i;
            break;
        }
        target -= d;
    }
    if d2[c1] == 0.0 {
        c1 = d2.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap();
    }
    let mut centers = ndarray::stack(Axis(0), &[x.row(c0), x.row(c1)]).expect("same width");

    let var = x.var_axis(Axis(0), 0.0);
    let tol = TOL * var.mean().unwrap_or(0.0);
    let mut labels = vec![0usize; n];
    let mut iterations = 0;
    for it in 1..=MAX_ITERS {
        iterations = it;
        for (i, r) in x.rows().into_iter().enumerate() {
            labels[i] = usize::from(sqdist(r, centers.row(1)) < sqdist(r, centers.row(0)));
        }
        let mut next = Array2::<f64>::zeros(centers.dim());
        let mut sizes = [0usize; 2];
        for (i, r) in x.rows().into_iter().enumerate() {
            next.row_mut(labels[i]).scaled_add(1.0, &r);
            sizes[labels[i]] += 1;
        }
        for c in 0..2 {
            if sizes[c] == 0 {
                // reseed an empty cluster at the point farthest from the other center
                let other = centers.row(1 - c).to_owned();
                let far = x
                    .rows()
                    .into_iter()
                    .enumerate()
                    .max_by(|a, b| sqdist(a.1, other.view()).total_cmp(&sqdist(b.1, other.view())))
                    .map(|(i, _)| i)
                    .unwrap();
                next.row_mut(c).assign(&x.row(far));
            } else {
                next.row_mut(c).mapv_inplace(|v| v / sizes[c] as f64);
            }
        }
        let shift: f64 = (0..2).map(|c| sqdist(next.row(c), centers.row(c))).sum();
        centers = next;
        if shift <= tol {
            break;
        }
    }
    for (i, r) in x.rows().into_iter().enumerate() {
        labels[i] = usize::from(sqdist(r, centers.row(1)) < sqdist(r, centers.row(0)));
    }
    Ok(KMeansFit { labels, centers, iterations })
}

/// Cluster the test rows into two groups, call the group whose labeling
/// agrees best with the truth "H1", and score it.
pub fn baseline_kmeans<S: AsRef<str>>(test: &ActivationMatrix, truth_h1: &[S], seed: u64) -> Result<PrecisionRecall> {
    let fit = kmeans2(test.to_f64().view(), seed)?;
    let truth: std::collections::HashSet<&str> = truth_h1.iter().map(AsRef::as_ref).collect();
    let is_h1: Array1<bool> = test.sentence_ids.iter().map(|id| truth.contains(id.as_str())).collect();
    // accuracy when cluster 1 is called H1; the other mapping scores n - that
    let agree = fit.labels.iter().zip(is_h1.iter()).filter(|(l, h)| (**l == 1) == **h).count();
    let h1_cluster = if agree * 2 >= fit.labels.len() { 1 } else { 0 };
    let detected: Vec<&str> = test
        .sentence_ids
        .iter()
        .zip(&fit.labels)
        .filter(|(_, l)| **l == h1_cluster)
        .map(|(id, _)| id.as_str())
        .collect();
    let truth_v: Vec<&str> = truth_h1.iter().map(AsRef::as_ref).collect();
    let universe: Vec<&str> = test.sentence_ids.iter().map(String::as_str).collect();
    precision_recall(&detected, &truth_v, &universe)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_clusters() {
        let values = Array2::from_shape_fn((20, 3), |(i, j)| {
            let base = if i < 10 { 10.0 } else { 0.0 };
            base + ((i * 7 + j * 3) % 5) as f32 * 0.1
        });
        let ids: Vec<String> = (0..20).map(|i| format!("s{i}")).collect();
        let m = ActivationMatrix::new("", 0, ids.clone(), values).unwrap();
        let truth: Vec<&str> = ids[..10].iter().map(String::as_str).collect();
        for seed in 0..5 {
            let pr = baseline_kmeans(&m, &truth, seed).unwrap();
            assert_eq!((pr.precision, pr.recall), (1.0, 1.0));
        }
    }

    #[test]
    fn identical_rows_rejected() {
        let m = ActivationMatrix::from_values(Array2::from_elem((4, 2), 1.0)).unwrap();
        assert!(matches!(baseline_kmeans(&m, &["row-0"], 0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn deterministic() {
        let x = Array2::from_shape_fn((30, 2), |(i, j)| ((i * 13 + j * 7) % 17) as f64);
        assert_eq!(kmeans2(x.view(), 9).unwrap(), kmeans2(x.view(), 9).unwrap());
    }
}
