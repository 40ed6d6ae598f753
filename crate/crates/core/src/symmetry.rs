//! Dihedral relabelling of trajectories and the quotient count.
//!
//! `D_p` acts on a cyclic vertex sequence by rotation and reversal. Two
//! numerical finds describe the same trajectory when some relabelling of one
//! matches the other vertex by vertex. Body symmetries are not quotiented.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::varsolve::TrajectoryCandidate;

/// Default dedup tolerance, relative to the body diameter.
pub const TOL_DEDUP: f64 = 1e-6;

/// The `2p` images of a cyclic sequence: `p` rotations of it followed by the
/// `p` rotations of its reversal. For `p = 2` the images repeat.
pub fn dihedral_images<T: Clone>(vertices: &[T]) -> Vec<Vec<T>> {
    let p = vertices.len();
    let mut out = Vec::with_capacity(2 * p);
    for shift in 0..p {
        out.push((0..p).map(|i| vertices[(i + shift) % p].clone()).collect());
    }
    for shift in 0..p {
        out.push(
            (0..p)
                .map(|i| vertices[(shift + p - i) % p].clone())
                .collect(),
        );
    }
    out
}

fn max_vertex_distance(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// True iff some dihedral image of `t1` matches `t2` vertexwise within
/// `tol_dedup · diam`.
pub fn same_orbit(t1: &[DVector<f64>], t2: &[DVector<f64>], tol_dedup: f64, diam: f64) -> bool {
    if t1.len() != t2.len() {
        return false;
    }
    let tol = tol_dedup * diam;
    dihedral_images(t1)
        .iter()
        .any(|img| max_vertex_distance(img, t2) <= tol)
}

/// Relabelling-invariant fingerprint: perimeter and sorted edge lengths,
/// rounded to units of `tol_dedup · diam`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub perimeter: i64,
    pub edges: Vec<i64>,
}

fn sorted_edges(points: &[DVector<f64>]) -> Vec<f64> {
    let p = points.len();
    let mut edges: Vec<f64> = (0..p)
        .map(|i| (&points[i] - &points[(i + 1) % p]).norm())
        .collect();
    edges.sort_by(f64::total_cmp);
    edges
}

pub fn signature(points: &[DVector<f64>], tol_dedup: f64, diam: f64) -> Signature {
    let unit = tol_dedup * diam;
    let edges = sorted_edges(points);
    let perimeter: f64 = edges.iter().sum();
    Signature {
        perimeter: (perimeter / unit).round() as i64,
        edges: edges.iter().map(|e| (e / unit).round() as i64).collect(),
    }
}

/// A `D_p`-orbit of numerically found trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitClass {
    pub representative: TrajectoryCandidate,
    pub members: usize,
    pub perimeter: f64,
    pub signature: Signature,
}

fn lex_cmp(a: &[DVector<f64>], b: &[DVector<f64>]) -> std::cmp::Ordering {
    a.iter()
        .flat_map(|v| v.iter())
        .zip(b.iter().flat_map(|v| v.iter()))
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Collapse candidates into `D_p`-orbit classes.
///
/// Candidates are visited in a canonical order (perimeter, then coordinates),
/// so the outcome does not depend on the input order. Each one joins the
/// first earlier class whose prototype (first member) has perimeter and
/// sorted edge lengths within `2 · tol_dedup · diam` and lies in the same
/// orbit; otherwise it opens a new class. The representative is the member
/// with the smallest residual, ties broken on coordinates, and classes are
/// returned ordered by perimeter, then signature.
pub fn dedup(candidates: &[TrajectoryCandidate], tol_dedup: f64, diam: f64) -> Vec<OrbitClass> {
    let n = candidates.len();
    let gate = 2.0 * tol_dedup * diam;
    let points: Vec<Vec<DVector<f64>>> = candidates.iter().map(|c| c.points()).collect();
    let edges: Vec<Vec<f64>> = points.iter().map(|p| sorted_edges(p)).collect();
    let perims: Vec<f64> = edges.iter().map(|e| e.iter().sum()).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        perims[a]
            .total_cmp(&perims[b])
            .then_with(|| lex_cmp(&points[a], &points[b]))
    });

    // (prototype index, members)
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut window_start = 0;
    for &a in &order {
        while window_start < groups.len() && perims[a] - perims[groups[window_start].0] > gate {
            window_start += 1;
        }
        let home = groups[window_start..].iter().position(|(proto, _)| {
            let b = *proto;
            edges[a].len() == edges[b].len()
                && edges[a]
                    .iter()
                    .zip(&edges[b])
                    .all(|(x, y)| (x - y).abs() <= gate)
                && same_orbit(&points[b], &points[a], tol_dedup, diam)
        });
        match home {
            Some(k) => groups[window_start + k].1.push(a),
            None => groups.push((a, vec![a])),
        }
    }

    let mut classes: Vec<OrbitClass> = groups
        .into_iter()
        .map(|(_, members)| {
            let rep = *members
                .iter()
                .min_by(|&&a, &&b| {
                    candidates[a]
                        .kkt_residual
                        .total_cmp(&candidates[b].kkt_residual)
                        .then_with(|| lex_cmp(&points[a], &points[b]))
                })
                .expect("non-empty group");
            OrbitClass {
                representative: candidates[rep].clone(),
                members: members.len(),
                perimeter: perims[rep],
                signature: signature(&points[rep], tol_dedup, diam),
            }
        })
        .collect();
    classes.sort_by(|a, b| {
        a.perimeter
            .total_cmp(&b.perimeter)
            .then_with(|| a.signature.cmp(&b.signature))
            .then_with(|| lex_cmp(&a.representative.points(), &b.representative.points()))
    });
    classes
}
