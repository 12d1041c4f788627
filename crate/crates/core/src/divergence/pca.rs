use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::linalg::{complete_orthonormal, symmetric_eigen};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Principal axes of a point cloud.
///
/// `components` holds one unit-length principal axis per row, in
/// descending order of explained variance. Each axis is sign-normalized so
/// its largest-magnitude coordinate is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PcaModel<T> {
    pub mean: Array1<T>,
    pub components: Array2<T>,
    pub explained_variance: Array1<T>,
    pub explained_variance_ratio: Array1<T>,
}

impl<T: Real> PcaModel<T> {
    pub fn k(&self) -> usize {
        self.components.nrows()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Fit `k` principal components to the rows of `x`.
///
/// Uses the J×J covariance when J ≤ rows and the rows×rows Gram matrix
/// otherwise, so wide activation matrices (J = 4096, a few hundred rows)
/// stay cheap. Data with no variance yields zero ratios and an arbitrary
/// orthonormal basis.
pub fn fit_pca<T: Real>(x: ArrayView2<T>, k: usize) -> Result<PcaModel<T>> {
    let (n, dim) = x.dim();
    if n < 2 {
        return Err(Error::param(format!("PCA needs at least 2 rows, got {n}")));
    }
    if k == 0 || k > (n - 1).min(dim) {
        return Err(Error::param(format!(
            "k = {k} out of range 1..={} for {n}x{dim} data",
            (n - 1).min(dim)
        )));
    }
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let centered = &x - &mean;
    let denom = T::from_usize_lossy(n - 1);

    let (eigvals, mut components) = if dim <= n {
        let cov = centered.t().dot(&centered) / denom;
        let (w, v) = symmetric_eigen(cov.view());
        let comps = v.t().slice(ndarray::s![..k, ..]).to_owned();
        (w, comps)
    } else {
        let gram = centered.dot(&centered.t()) / denom;
        let (w, u) = symmetric_eigen(gram.view());
        let mut comps = Array2::<T>::zeros((k, dim));
        let lam_max = w[0].max(T::zero());
        let floor = lam_max * T::epsilon() * T::from_usize_lossy(n) * T::lit(16.0);
        for i in 0..k {
            if w[i] > floor && w[i] > T::zero() {
                let axis = centered.t().dot(&u.column(i)) / (w[i] * denom).sqrt();
                comps.row_mut(i).assign(&axis);
            }
        }
        (w, comps)
    };

    let total: T = eigvals.iter().map(|&l| l.max(T::zero())).sum();
    let lam_max = eigvals[0].max(T::zero());
    let floor = lam_max * T::epsilon() * T::from_usize_lossy(n.max(dim)) * T::lit(16.0);
    let mut explained = Array1::<T>::zeros(k);
    let mut ratio = Array1::<T>::zeros(k);
    let mut valid = 0;
    for i in 0..k {
        let l = eigvals[i].max(T::zero());
        if l > floor && total > T::zero() {
            explained[i] = l;
            ratio[i] = l / total;
            valid = i + 1;
        }
    }
    for i in valid..k {
        components.row_mut(i).fill(T::zero());
    }
    complete_orthonormal(&mut components, valid);
    for mut row in components.rows_mut() {
        let mut best = 0;
        for (j, v) in row.iter().enumerate() {
            if v.abs() > row[best].abs() {
                best = j;
            }
        }
        if row[best] < T::zero() {
            row.mapv_inplace(|v| -v);
        }
    }

    Ok(PcaModel { mean, components, explained_variance: explained, explained_variance_ratio: ratio })
}

/// Coordinates of `x`'s rows in the model's component basis.
pub fn project<T: Real>(model: &PcaModel<T>, x: ArrayView2<T>) -> Result<Array2<T>> {
    if x.ncols() != model.dim() {
        return Err(Error::Dimension(format!("rows have {} columns, model expects {}", x.ncols(), model.dim())));
    }
    let centered = &x - &model.mean;
    Ok(centered.dot(&model.components.t()))
}

/// Map PC-space coordinates back to the original space.
pub fn reconstruct<T: Real>(model: &PcaModel<T>, coords: ArrayView2<T>) -> Array2<T> {
    coords.dot(&model.components) + &model.mean
}

/// Column-wise z-scoring; zero-variance columns are only centered.
pub fn standardize_columns<T: Real>(x: ArrayView2<T>) -> Array2<T> {
    let n = T::from_usize_lossy(x.nrows());
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let centered = &x - &mean;
    let sd = centered.map_axis(Axis(0), |c| (c.iter().map(|v| *v * *v).sum::<T>() / n).sqrt());
    let mut out = centered;
    for (mut col, s) in out.columns_mut().into_iter().zip(sd.iter()) {
        if *s > T::zero() {
            col.mapv_inplace(|v| v / *s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn collinear_line() {
        let x: ndarray::Array2<f64> = array![[0.0, 0.0], [1.0, 2.0], [2.0, 4.0], [-1.0, -2.0], [3.0, 6.0]];
        let m = fit_pca(x.view(), 2).unwrap();
        assert!((m.explained_variance_ratio[0] - 1.0).abs() < 1e-12);
        assert!(m.explained_variance_ratio[1].abs() < 1e-12);
        let s5 = 5f64.sqrt();
        assert!((m.components[[0, 0]] - 1.0 / s5).abs() < 1e-12);
        assert!((m.components[[0, 1]] - 2.0 / s5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_cross() {
        let x: ndarray::Array2<f64> = array![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        let m = fit_pca(x.view(), 2).unwrap();
        assert!((m.explained_variance_ratio[0] - 0.5).abs() < 1e-12);
        assert!((m.explained_variance_ratio[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn k_out_of_range() {
        let x: ndarray::Array2<f64> = array![[1.0, 0.0, 2.0], [0.0, 1.0, 1.0]];
        assert!(fit_pca(x.view(), 2).is_err());
        assert!(fit_pca(x.view(), 0).is_err());
        assert!(fit_pca(x.view(), 1).is_ok());
        let one: ndarray::Array2<f64> = array![[1.0, 2.0]];
        assert!(fit_pca(one.view(), 1).is_err());
    }

    #[test]
    fn zero_variance_is_not_an_error() {
        let x = Array2::<f64>::from_elem((5, 3), 2.5);
        let m = fit_pca(x.view(), 2).unwrap();
        assert!(m.explained_variance_ratio.iter().all(|&r| r == 0.0));
        let g = m.components.dot(&m.components.t());
        for ((i, j), v) in g.indexed_iter() {
            assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_of_mean_is_origin() {
        let x: ndarray::Array2<f64> = array![[1.0, 2.0, 0.5], [3.0, -1.0, 2.0], [0.0, 0.0, 1.0], [2.0, 2.0, 2.0]];
        let m = fit_pca(x.view(), 2).unwrap();
        let p = project(&m, m.mean.view().insert_axis(Axis(0))).unwrap();
        assert!(p.iter().all(|v| v.abs() < 1e-9));
        assert!(project(&m, array![[1.0, 2.0]].view()).is_err());
    }

    #[test]
    fn line_coordinates_are_signed_distances() {
        let dir = array![3.0 / 5.0, 4.0 / 5.0];
        let ts = [-2.0, -0.5, 0.0, 1.0, 1.5];
        let x = Array2::from_shape_fn((5, 2), |(i, j)| 1.0 + ts[i] * dir[j]);
        let m = fit_pca(x.view(), 1).unwrap();
        let p = project(&m, x.view()).unwrap();
        let tmean = ts.iter().sum::<f64>() / 5.0;
        for (i, t) in ts.iter().enumerate() {
            assert!((p[[i, 0]] - (t - tmean)).abs() < 1e-12);
        }
    }

    #[test]
    fn wide_data_uses_gram_route() {
        // 6 rows, 40 columns: components still orthonormal and variance
        // ratios match the covariance route computed on the transpose space
        let x = Array2::from_shape_fn((6, 40), |(i, j)| ((i * 7 + j * 13) % 11) as f64 + (i * j) as f64 * 0.01);
        let m = fit_pca(x.view(), 5).unwrap();
        let g = m.components.dot(&m.components.t());
        for ((i, j), v) in g.indexed_iter() {
            assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9, "{i},{j}: {v}");
        }
        let centered = &x - &m.mean;
        let cov = centered.t().dot(&centered) / 5.0;
        for (i, row) in m.components.rows().into_iter().enumerate() {
            let rayleigh = row.dot(&cov.dot(&row));
            assert!((rayleigh - m.explained_variance[i]).abs() < 1e-8 * (1.0 + rayleigh));
        }
    }

    #[test]
    fn f32_path() {
        let x = array![[0.0f32, 0.0], [1.0, 2.0], [2.0, 4.0]];
        let m = fit_pca(x.view(), 1).unwrap();
        assert!((m.explained_variance_ratio[0] - 1.0).abs() < 1e-5);
    }
}
