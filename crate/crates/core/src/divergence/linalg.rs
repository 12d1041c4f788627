//! Small dense symmetric eigensolver (cyclic Jacobi).

use ndarray::{Array1, Array2, ArrayView2};

use crate::scalar::Real;

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue
/// (ties by original index). Eigenvectors are the columns of the returned
/// matrix.
pub fn symmetric_eigen<T: Real>(a: ArrayView2<T>) -> (Array1<T>, Array2<T>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "symmetric_eigen needs a square matrix");
    let mut m = a.to_owned();
    let mut v = Array2::<T>::eye(n);
    let two = T::lit(2.0);

    let scale: T = m.iter().map(|x| *x * *x).sum::<T>().sqrt();
    if scale > T::zero() {
        let tol = T::epsilon() * T::epsilon() * scale * scale;
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += m[[p, q]] * m[[p, q]];
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[[p, q]];
                    if apq == T::zero() {
                        continue;
                    }
                    let app = m[[p, p]];
                    let aqq = m[[q, q]];
                    let theta = (aqq - app) / (two * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[[k, p]];
                        let mkq = m[[k, q]];
                        m[[k, p]] = c * mkp - s * mkq;
                        m[[k, q]] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[[p, k]];
                        let mqk = m[[q, k]];
                        m[[p, k]] = c * mpk - s * mqk;
                        m[[q, k]] = s * mpk + c * mqk;
                    }
                    for k in 0..n {
                        let vkp = v[[k, p]];
                        let vkq = v[[k, q]];
                        v[[k, p]] = c * vkp - s * vkq;
                        v[[k, q]] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].partial_cmp(&m[[i, i]]).unwrap().then(i.cmp(&j)));
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vectors = Array2::<T>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    (values, vectors)
}

/// Orthonormalize `rows` in place (modified Gram-Schmidt), filling any
/// rows that collapse with standard basis vectors orthogonal to the rest.
/// `fixed` leading rows are assumed orthonormal already.
pub fn complete_orthonormal<T: Real>(rows: &mut Array2<T>, fixed: usize) {
    let (k, dim) = rows.dim();
    let mut basis = 0usize;
    for i in fixed..k {
        loop {
            let mut r = rows.row(i).to_owned();
            for _ in 0..2 {
                for j in 0..i {
                    let d = r.dot(&rows.row(j));
                    r.scaled_add(-d, &rows.row(j));
                }
            }
            let norm = r.dot(&r).sqrt();
            if norm > T::lit(1e-3) {
                rows.row_mut(i).assign(&(r / norm));
                break;
            }
            assert!(basis < dim, "cannot complete orthonormal basis");
            let mut e = Array1::<T>::zeros(dim);
            e[basis] = T::one();
            basis += 1;
            rows.row_mut(i).assign(&e);
        }
    }
}
