//! Convex-hull vertex centroids in one to three dimensions.
//!
//! The centroid of a set is the arithmetic mean of its hull vertices
//! (points strictly on an edge or face are not vertices). Affinely
//! degenerate sets, whose points span fewer than `d` dimensions, fall back
//! to the mean of all points.

use std::collections::HashSet;

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};

use super::linalg::symmetric_eigen;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Euclidean distance between the hull-vertex centroids of the two sets.
pub fn hull_centroid_distance<T: Real>(q_plus: ArrayView2<T>, q_minus: ArrayView2<T>) -> Result<T> {
    if q_plus.ncols() != q_minus.ncols() {
        return Err(Error::Dimension(format!("{} vs {} dimensions", q_plus.ncols(), q_minus.ncols())));
    }
    let a = hull_centroid(q_plus)?;
    let b = hull_centroid(q_minus)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (*x - *y) * (*x - *y)).sum::<T>().sqrt())
}

/// Mean of the hull vertices, or of all points when degenerate.
pub fn hull_centroid<T: Real>(points: ArrayView2<T>) -> Result<Array1<T>> {
    if points.nrows() == 0 {
        return Err(Error::param("empty point set"));
    }
    let d = points.ncols();
    if !(1..=3).contains(&d) {
        return Err(Error::Dimension(format!("hull centroid needs 1 to 3 dimensions, got {d}")));
    }
    match hull_vertices(points) {
        Some(idx) => Ok(points.select(Axis(0), &idx).mean_axis(Axis(0)).expect("non-empty")),
        None => Ok(points.mean_axis(Axis(0)).expect("non-empty")),
    }
}

/// Indices of hull vertices (sorted, one index per distinct location), or
/// `None` when the set is affinely degenerate.
pub fn hull_vertices<T: Real>(points: ArrayView2<T>) -> Option<Vec<usize>> {
    let d = points.ncols();
    if points.nrows() < d + 1 || affine_rank(points) < d {
        return None;
    }
    let mut v = match d {
        1 => hull_1d(points),
        2 => hull_2d(points),
        3 => hull_3d(points)?,
        _ => return None,
    };
    v.sort_unstable();
    Some(v)
}

fn affine_rank<T: Real>(points: ArrayView2<T>) -> usize {
    let mean = points.mean_axis(Axis(0)).expect("non-empty");
    let c = &points - &mean;
    let scatter = c.t().dot(&c);
    let (w, _) = symmetric_eigen(scatter.view());
    let top = w[0].max(T::zero());
    if top == T::zero() {
        return 0;
    }
    let tol = top * T::epsilon() * T::lit(1e3) * T::from_usize_lossy(points.nrows());
    w.iter().filter(|&&l| l > tol).count()
}

fn hull_1d<T: Real>(p: ArrayView2<T>) -> Vec<usize> {
    let mut lo = 0;
    let mut hi = 0;
    for i in 0..p.nrows() {
        if p[[i, 0]] < p[[lo, 0]] {
            lo = i;
        }
        if p[[i, 0]] > p[[hi, 0]] {
            hi = i;
        }
    }
    vec![lo, hi]
}

fn cross2<T: Real>(o: ArrayView1<T>, a: ArrayView1<T>, b: ArrayView1<T>) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; collinear boundary points are dropped.
fn hull_2d<T: Real>(p: ArrayView2<T>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.nrows()).collect();
    idx.sort_by(|&i, &j| {
        p[[i, 0]]
            .partial_cmp(&p[[j, 0]])
            .unwrap()
            .then(p[[i, 1]].partial_cmp(&p[[j, 1]]).unwrap())
            .then(i.cmp(&j))
    });
    idx.dedup_by(|a, b| p[[*a, 0]] == p[[*b, 0]] && p[[*a, 1]] == p[[*b, 1]]);
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    let row = |i: usize| p.row(i);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &i in iter {
            while hull.len() >= start + 2 && cross2(row(hull[hull.len() - 2]), row(hull[hull.len() - 1]), row(i)) <= T::zero() {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

type Face = [usize; 3];

fn sub3<T: Real>(a: ArrayView1<T>, b: ArrayView1<T>) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3<T: Real>(u: [T; 3], v: [T; 3]) -> [T; 3] {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

fn dot3<T: Real>(u: [T; 3], v: [T; 3]) -> T {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Incremental 3-D hull. Faces are kept counter-clockwise seen from outside.
fn hull_3d<T: Real>(p: ArrayView2<T>) -> Option<Vec<usize>> {
    let n = p.nrows();
    let row = |i: usize| p.row(i);
    let extent = p.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::one());
    let eps = extent * extent * extent * T::epsilon() * T::lit(64.0);

    // initial tetrahedron from extreme points
    let i0 = (0..n).min_by(|&a, &b| p[[a, 0]].partial_cmp(&p[[b, 0]]).unwrap()).unwrap();
    let norm2 = |v: [T; 3]| dot3(v, v);
    let i1 = (0..n).max_by(|&a, &b| norm2(sub3(row(a), row(i0))).partial_cmp(&norm2(sub3(row(b), row(i0)))).unwrap().then(b.cmp(&a)))?;
    let e01 = sub3(row(i1), row(i0));
    let i2 = (0..n).max_by(|&a, &b| {
        let ca = norm2(cross3(e01, sub3(row(a), row(i0))));
        let cb = norm2(cross3(e01, sub3(row(b), row(i0))));
        ca.partial_cmp(&cb).unwrap().then(b.cmp(&a))
    })?;
    let normal = cross3(e01, sub3(row(i2), row(i0)));
    let i3 = (0..n).max_by(|&a, &b| {
        let da = dot3(normal, sub3(row(a), row(i0))).abs();
        let db = dot3(normal, sub3(row(b), row(i0))).abs();
        da.partial_cmp(&db).unwrap().then(b.cmp(&a))
    })?;
    if dot3(normal, sub3(row(i3), row(i0))).abs() <= eps {
        return None;
    }

    let quarter = T::lit(0.25);
    let interior: [T; 3] = std::array::from_fn(|k| (p[[i0, k]] + p[[i1, k]] + p[[i2, k]] + p[[i3, k]]) * quarter);
    let orient = |f: Face| -> Face {
        let nrm = cross3(sub3(row(f[1]), row(f[0])), sub3(row(f[2]), row(f[0])));
        let to_in = [interior[0] - p[[f[0], 0]], interior[1] - p[[f[0], 1]], interior[2] - p[[f[0], 2]]];
        if dot3(nrm, to_in) > T::zero() {
            [f[0], f[2], f[1]]
        } else {
            f
        }
    };
    let mut faces: Vec<Face> = vec![
        orient([i0, i1, i2]),
        orient([i0, i1, i3]),
        orient([i0, i2, i3]),
        orient([i1, i2, i3]),
    ];
    let seed: HashSet<usize> = [i0, i1, i2, i3].into_iter().collect();

    for q in 0..n {
        if seed.contains(&q) {
            continue;
        }
        let above = |f: &Face| {
            let nrm = cross3(sub3(row(f[1]), row(f[0])), sub3(row(f[2]), row(f[0])));
            dot3(nrm, sub3(row(q), row(f[0]))) > eps
        };
        let visible: Vec<bool> = faces.iter().map(above).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut vis_edges = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, v)| **v) {
            for e in 0..3 {
                vis_edges.insert((f[e], f[(e + 1) % 3]));
            }
        }
        let mut next = Vec::with_capacity(faces.len() + 4);
        let mut horizon = Vec::new();
        for (f, v) in faces.iter().zip(&visible) {
            if *v {
                for e in 0..3 {
                    let (a, b) = (f[e], f[(e + 1) % 3]);
                    if !vis_edges.contains(&(b, a)) {
                        horizon.push((a, b));
                    }
                }
            } else {
                next.push(*f);
            }
        }
        for (a, b) in horizon {
            next.push([a, b, q]);
        }
        faces = next;
    }

    let mut verts: Vec<usize> = faces.iter().flat_map(|f| f.iter().copied()).collect();
    verts.sort_unstable();
    verts.dedup();
    Some(verts)
}
