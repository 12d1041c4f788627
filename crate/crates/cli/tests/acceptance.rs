//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use actscan::divergence::hull_centroid_distance;
use actscan::scan::{empirical_pvalues_with, PValueOptions};
use actscan::{
    brute_force_scan, detection_power, fit_pca, intersection_counts, jaccard_matrix, npss_score, scan,
    separation_metrics, NamedSetFamily, ScanConfig, ScoreKind, SynthConfig,
};
use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{array, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check { pass, detail: detail.into() }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn metric_exactness() -> Check {
    let a: Array2<f64> = array![[0.0], [1.0]];
    let b: Array2<f64> = array![[10.0], [11.0]];
    let m = separation_metrics(a.view(), b.view()).unwrap();
    let sq: Array2<f64> = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [0.5, 0.5]];
    let shifted = &sq + &array![10.0, 0.0];
    let d = hull_centroid_distance(sq.view(), shifted.view()).unwrap();
    let ok = (m.calinski_harabasz - 200.0).abs() < 1e-6
        && (m.davies_bouldin - 0.1).abs() < 1e-6
        && (m.silhouette - 0.899749).abs() < 1e-6
        && !m.ch_infinite
        && (d - 10.0).abs() < 1e-9;
    check(
        ok,
        format!(
            "CH={:.9} DB={:.9} silhouette={:.9} hull distance={:.12}",
            m.calinski_harabasz, m.davies_bouldin, m.silhouette, d
        ),
    )
}

fn pca_correctness() -> Check {
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_simple_fn((50, 8), || normal(&mut rng));
        let model = fit_pca(x.view(), 8).unwrap();
        let c = &x - &x.mean_axis(Axis(0)).unwrap();
        let m = DMatrix::from_fn(50, 8, |i, j| c[[i, j]]);
        let eig = SymmetricEigen::new(m.transpose() * &m / 49.0);
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
        let total: f64 = eig.eigenvalues.iter().sum();
        for (k, &o) in order.iter().enumerate() {
            worst = worst.max((model.explained_variance_ratio[k] - eig.eigenvalues[o] / total).abs());
            let v = eig.eigenvectors.column(o);
            let sign = (0..8).map(|r| model.components[[k, r]] * v[r]).sum::<f64>().signum();
            for r in 0..8 {
                worst = worst.max((model.components[[k, r]] - sign * v[r]).abs());
            }
        }
    }
    let line: Array2<f64> = array![[0.0, 0.0], [1.0, 2.0], [2.0, 4.0], [-3.0, -6.0]];
    let lr = fit_pca(line.view(), 2).unwrap().explained_variance_ratio;
    let cross: Array2<f64> = array![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
    let cr = fit_pca(cross.view(), 2).unwrap().explained_variance_ratio;
    let analytic = lr.to_vec() == vec![1.0, 0.0] && cr.to_vec() == vec![0.5, 0.5];
    check(
        worst < 1e-8 && analytic,
        format!("max deviation {worst:.2e} over 100 matrices; line ratios {lr}; cross ratios {cr}"),
    )
}

fn scan_vs_brute() -> Check {
    let (mut hits, mut exceeded) = (0, 0);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let bg = Array2::from_shape_simple_fn((99, 5), || normal(&mut rng) as f32);
        let mut test = Array2::from_shape_simple_fn((6, 5), || normal(&mut rng) as f32);
        if seed % 2 == 0 {
            let rows: Vec<usize> = (0..6).filter(|_| rng.random_bool(0.5)).collect();
            let cols: Vec<usize> = (0..5).filter(|_| rng.random_bool(0.5)).collect();
            for &r in &rows {
                for &c in &cols {
                    test[[r, c]] += 1.5;
                }
            }
        }
        let p = empirical_pvalues_with(bg.view(), test.view(), PValueOptions::default()).unwrap();
        let cfg = ScanConfig { restarts: 20, seed, ..Default::default() };
        let fast = scan(&p, &cfg).unwrap().score;
        let best = brute_force_scan(&p, &cfg).unwrap().score;
        if fast > best + 1e-9 {
            exceeded += 1;
        }
        if (fast - best).abs() <= 1e-9 {
            hits += 1;
        }
    }
    check(hits >= 95 && exceeded == 0, format!("optimum attained {hits}/100, exceeded {exceeded}"))
}

fn score_formulas() -> Check {
    let bj = npss_score(10, 10, 0.1f64, ScoreKind::BerkJones).unwrap();
    let hc = npss_score(100, 10, 0.05f64, ScoreKind::HigherCriticism).unwrap();
    let boundary_bj = npss_score(100, 10, 0.1f64, ScoreKind::BerkJones).unwrap();
    let boundary_hc = npss_score(100, 10, 0.1f64, ScoreKind::HigherCriticism).unwrap();
    let ok = (bj - 23.02585).abs() < 1e-5 && (hc - 2.29416).abs() < 1e-5 && boundary_bj == 0.0 && boundary_hc == 0.0;
    check(ok, format!("BJ(10,10,0.1)={bj:.7} HC(100,10,0.05)={hc:.7} boundary BJ={boundary_bj} HC={boundary_hc}"))
}

fn null_calibration() -> Check {
    // 10,000 independent columns, each with its own 300-row background and
    // one test value, so the p-values are i.i.d.
    let (n, tests) = (300usize, 10_000usize);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let bg = Array2::from_shape_simple_fn((n, tests), || normal(&mut rng) as f32);
    let test = Array2::from_shape_simple_fn((1, tests), || normal(&mut rng) as f32);
    let p = empirical_pvalues_with(bg.view(), test.view(), PValueOptions::default()).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.05, 0.1, 0.5] {
        let frac = p.values.iter().filter(|v| **v < alpha).count() as f64 / tests as f64;
        let expect = alpha * n as f64 / (n + 1) as f64;
        let sigma = (expect * (1.0 - expect) / tests as f64).sqrt();
        let z = (frac - expect) / sigma;
        ok &= z.abs() <= 5.0;
        parts.push(format!("a={alpha}: {frac:.4} vs {expect:.4} (z={z:+.2})"));
    }
    check(ok, parts.join("; "))
}

fn synthetic_power() -> Check {
    let scan_cfg = ScanConfig::default();
    let signal = detection_power(&SynthConfig::default(), &scan_cfg, 20).unwrap().per_metric;
    let means = [
        signal.sentence_precision.mean,
        signal.sentence_recall.mean,
        signal.position_precision.mean,
        signal.position_recall.mean,
    ];
    let null = detection_power(&SynthConfig { mu: 0.0, ..Default::default() }, &scan_cfg, 20).unwrap().per_metric;
    let chance = 40.0 / 512.0;
    let se = null.position_precision.std / 20f64.sqrt();
    let z = (null.position_precision.mean - chance) / se;
    let ok = means.iter().all(|m| *m >= 0.90) && z.abs() <= 3.0;
    check(
        ok,
        format!(
            "mu=2: sentence P/R {:.4}/{:.4}, position P/R {:.4}/{:.4}; mu=0 position precision {:.4} vs chance {chance:.4} (z={z:+.2})",
            means[0], means[1], means[2], means[3], null.position_precision.mean
        ),
    )
}

fn overlap_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bad = 0;
    for _ in 0..1000 {
        let sets: Vec<Vec<usize>> = (0..5)
            .map(|_| {
                let size = rng.random_range(0..1500);
                (0..size).map(|_| rng.random_range(0..4096)).collect::<BTreeSet<_>>().into_iter().collect()
            })
            .collect();
        let union: BTreeSet<usize> = sets.iter().flatten().copied().collect();
        let names = (0..5).map(|i| format!("s{i}")).collect();
        let upset = intersection_counts(&NamedSetFamily::new(names, sets, 4096).unwrap());
        if upset.regions.iter().map(|r| r.count).sum::<usize>() != union.len() || upset.regions.len() != 31 {
            bad += 1;
        }
    }
    let pair = NamedSetFamily::new(vec!["a".into(), "b".into()], vec![vec![1, 2], vec![2, 3]], 4).unwrap();
    let j = jaccard_matrix(&pair)[0][1];
    check(bad == 0 && j == 1.0 / 3.0, format!("{bad}/1000 families with region sum != union; jaccard {{1,2}}/{{2,3}} = {j}"))
}

fn cli_determinism(root: &Path) -> Check {
    match common::determinism_suite(root) {
        Ok(summary) => check(true, summary),
        Err(e) => check(false, e),
    }
}

type Criterion<'a> = (&'a str, Option<Duration>, Box<dyn Fn() -> Check>);

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().to_path_buf();
    let criteria: Vec<Criterion> = vec![
        ("metric exactness", Some(Duration::from_secs(1)), Box::new(metric_exactness)),
        ("PCA correctness", Some(Duration::from_secs(5)), Box::new(pca_correctness)),
        ("scan vs brute force", Some(Duration::from_secs(30)), Box::new(scan_vs_brute)),
        ("score formulas", None, Box::new(score_formulas)),
        ("null calibration", Some(Duration::from_secs(10)), Box::new(null_calibration)),
        ("synthetic detection power", Some(Duration::from_secs(300)), Box::new(synthetic_power)),
        ("overlap exactness", Some(Duration::from_secs(10)), Box::new(overlap_exactness)),
        ("end-to-end determinism", None, Box::new(move || cli_determinism(&root))),
    ];
    let mut failed = 0;
    for (name, limit, run) in &criteria {
        let start = Instant::now();
        let c = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took < l);
        let pass = c.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map(|l| format!(" / limit {l:.0?}")).unwrap_or_default();
        println!("{} {name}: {} [{took:.2?}{budget}]", if pass { "PASS" } else { "FAIL" }, c.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
