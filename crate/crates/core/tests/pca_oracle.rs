use actscan::divergence::{reconstruct, standardize_columns};
use actscan::{fit_pca, project};
use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // unequal column scales keep the spectrum well separated
    Array2::from_shape_fn((rows, cols), |(_, j)| {
        let z: f64 = StandardNormal.sample(&mut rng);
        z * (1.0 + j as f64)
    })
}

/// Eigenpairs of the sample covariance, descending, from nalgebra.
fn oracle(x: &Array2<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (n, d) = x.dim();
    let mean = x.mean_axis(Axis(0)).unwrap();
    let c = x - &mean;
    let m = DMatrix::from_fn(n, d, |i, j| c[[i, j]]);
    let cov = m.transpose() * &m / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

#[test]
fn components_and_ratios_match_dense_eigendecomposition() {
    for seed in 0..100 {
        let x = random(50, 8, seed);
        let model = fit_pca(x.view(), 8).unwrap();
        let (vals, vecs) = oracle(&x);
        let total: f64 = vals.iter().sum();
        for c in 0..8 {
            assert!((model.explained_variance[c] - vals[c]).abs() < 1e-8 * vals[0], "seed {seed} value {c}");
            assert!((model.explained_variance_ratio[c] - vals[c] / total).abs() < 1e-8, "seed {seed} ratio {c}");
            let dot: f64 = (0..8).map(|r| model.components[[c, r]] * vecs[(r, c)]).sum();
            let sign = dot.signum();
            for r in 0..8 {
                assert!(
                    (model.components[[c, r]] - sign * vecs[(r, c)]).abs() < 1e-8,
                    "seed {seed} component {c} coord {r}"
                );
            }
        }
    }
}

#[test]
fn full_basis_reconstructs_input() {
    for seed in 0..10 {
        let x = random(30, 6, 1000 + seed);
        let model = fit_pca(x.view(), 6).unwrap();
        let back = reconstruct(&model, project(&model, x.view()).unwrap().view());
        for (a, b) in x.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn components_are_orthonormal() {
    let x = random(40, 12, 7);
    let model = fit_pca(x.view(), 5).unwrap();
    let g = model.components.dot(&model.components.t());
    for i in 0..5 {
        for j in 0..5 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g[[i, j]] - want).abs() < 1e-10);
        }
    }
}

#[test]
fn wide_input_agrees_with_transposed_route() {
    // more columns than rows goes through the Gram matrix
    let x = random(10, 25, 3);
    let model = fit_pca(x.view(), 4).unwrap();
    let (vals, vecs) = oracle(&x);
    for c in 0..4 {
        assert!((model.explained_variance[c] - vals[c]).abs() < 1e-8 * vals[0]);
        let dot: f64 = (0..25).map(|r| model.components[[c, r]] * vecs[(r, c)]).sum();
        assert!((dot.abs() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn standardized_columns_have_unit_variance() {
    let x = random(60, 4, 11);
    let z = standardize_columns(x.view());
    for col in z.columns() {
        let m = col.mean().unwrap();
        let v = col.iter().map(|a| (a - m).powi(2)).sum::<f64>() / col.len() as f64;
        assert!(m.abs() < 1e-12);
        assert!((v - 1.0).abs() < 1e-9);
    }
}
