//! Periodic billiard trajectories as critical points of the perimeter
//! functional on cyclic `p`-tuples of boundary points.
//!
//! Critical points are located by damped Newton on the Lagrange system
//! (one multiplier per vertex). At a feasible iterate the constraint rows of
//! that system force each vertex step into the tangent plane, so the system
//! is solved in the null space of the constraints: the reduced Hessian of the
//! Lagrangian against the tangential gradient. Iterates are re-projected onto
//! the boundary after every step. Newton converges to saddles as readily as
//! to minima, which matters because most billiard orbits are saddles.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::GRAZING_THRESHOLD;
use crate::geometry::{BodyModel, BoundaryPoint, GeometryError};
use crate::symmetry::dihedral_images;

/// Edges shorter than this (absolute) make the perimeter non-differentiable.
pub const DEGENERATE_EDGE_ABS: f64 = 1e-14;

/// Reduced-Hessian eigenvalues below this fraction of the largest one count
/// as null directions.
pub const CONTINUUM_REL_THRESHOLD: f64 = 1e-8;

/// Number of null directions of the reduced Hessian explained by symmetry.
/// The relabelling group is discrete and ambient isometries are not
/// quotiented, so an isolated orbit has none.
pub const EXPECTED_NULL_DIM: usize = 0;

const PINV_CUTOFF: f64 = 1e-12;
const MAX_LINE_SEARCH: usize = 30;
const MAX_POLISH_STEPS: usize = 4;
const MAX_START_RESAMPLES: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarsolveError {
    #[error("consecutive vertices {0} and {1} coincide")]
    DegenerateEdge(usize, usize),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("trajectory needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub n_starts: usize,
    pub rng_seed: u64,
    pub max_newton_iters: usize,
    /// Stop once `kkt_residual ≤ tol_crit`.
    pub tol_crit: f64,
    /// Minimal edge length as a fraction of the body diameter.
    pub edge_factor: f64,
    /// Radius (fraction of the diameter) of the deflation bump placed on
    /// orbits already found from the same start.
    pub deflation_radius: f64,
    /// Deflated re-solves attempted from each start after a success.
    pub deflation_restarts: usize,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    /// Longest vertex displacement per Newton step, as a fraction of the diameter.
    pub max_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_starts: 1000,
            rng_seed: 0,
            max_newton_iters: 60,
            tol_crit: 1e-10,
            edge_factor: 1e-3,
            deflation_radius: 0.05,
            deflation_restarts: 1,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            max_step: 0.25,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), VarsolveError> {
        let bad = |m: &str| Err(VarsolveError::InvalidConfig(m.to_string()));
        if self.n_starts == 0 {
            return bad("n_starts must be positive");
        }
        if self.max_newton_iters == 0 {
            return bad("max_newton_iters must be positive");
        }
        if !(self.tol_crit > 0.0 && self.tol_crit <= 1e-8) {
            return bad("tol_crit must lie in (0, 1e-8]");
        }
        if !(self.edge_factor > 0.0 && self.edge_factor < 1.0) {
            return bad("edge_factor must lie in (0, 1)");
        }
        if !(self.deflation_radius > 0.0 && self.deflation_radius.is_finite()) {
            return bad("deflation_radius must be positive");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 0.5) {
            return bad("armijo_c must lie in (0, 0.5)");
        }
        if !(self.armijo_shrink > 0.0 && self.armijo_shrink < 1.0) {
            return bad("armijo_shrink must lie in (0, 1)");
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return bad("max_step must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateFlags {
    pub converged: bool,
    pub degenerate_edge: bool,
    pub grazing: bool,
    pub continuum_suspect: bool,
}

/// A cyclic sequence of boundary points `(x_1, …, x_p)`, indices mod `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryCandidate {
    pub vertices: Vec<BoundaryPoint>,
    pub perimeter: f64,
    /// Tangential stationarity defect, see [`kkt_residual`].
    pub kkt_residual: f64,
    pub flags: CandidateFlags,
}

impl TrajectoryCandidate {
    /// Evaluates perimeter and residual for boundary points; flags are left clear.
    pub fn from_points(body: &BodyModel, points: &[DVector<f64>]) -> Result<Self, VarsolveError> {
        let vertices = points
            .iter()
            .map(|x| BoundaryPoint::on(body, x.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TrajectoryCandidate {
            perimeter: perimeter(points)?,
            kkt_residual: kkt_residual(body, points)?,
            vertices,
            flags: CandidateFlags::default(),
        })
    }

    pub fn p(&self) -> usize {
        self.vertices.len()
    }

    pub fn points(&self) -> Vec<DVector<f64>> {
        self.vertices.iter().map(|v| v.x.clone()).collect()
    }

    pub fn min_edge(&self) -> f64 {
        min_edge(&self.points())
    }
}

fn check_len(points: &[DVector<f64>]) -> Result<usize, VarsolveError> {
    match points.len() {
        n if n < 2 => Err(VarsolveError::TooFewVertices(n)),
        n => Ok(n),
    }
}

/// Shortest cyclic edge `min_i |x_i − x_{i+1}|`.
pub fn min_edge(points: &[DVector<f64>]) -> f64 {
    let p = points.len();
    (0..p)
        .map(|i| (&points[i] - &points[(i + 1) % p]).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `Σ_i |x_i − x_{i+1}|` with cyclic indices.
pub fn perimeter(points: &[DVector<f64>]) -> Result<f64, VarsolveError> {
    let p = check_len(points)?;
    let mut total = 0.0;
    for i in 0..p {
        let j = (i + 1) % p;
        let len = (&points[i] - &points[j]).norm();
        if len < DEGENERATE_EDGE_ABS {
            return Err(VarsolveError::DegenerateEdge(i, j));
        }
        total += len;
    }
    Ok(total)
}

/// `∂f/∂x_i = unit(x_i − x_{i−1}) + unit(x_i − x_{i+1})`.
pub fn perimeter_gradient(points: &[DVector<f64>]) -> Result<Vec<DVector<f64>>, VarsolveError> {
    let p = check_len(points)?;
    let units = edge_units(points)?;
    Ok((0..p)
        .map(|i| &units[i] - &units[(i + p - 1) % p])
        .collect())
}

/// `units[i] = unit(x_i − x_{i+1})`.
fn edge_units(points: &[DVector<f64>]) -> Result<Vec<DVector<f64>>, VarsolveError> {
    let p = points.len();
    (0..p)
        .map(|i| {
            let j = (i + 1) % p;
            let e = &points[i] - &points[j];
            let len = e.norm();
            if len < DEGENERATE_EDGE_ABS {
                Err(VarsolveError::DegenerateEdge(i, j))
            } else {
                Ok(e / len)
            }
        })
        .collect()
}

/// `max_i |P_i ∂f/∂x_i| / 2` where `P_i` projects onto the tangent plane at
/// `x_i`. Zero exactly at billiard trajectories; each gradient term is a sum of
/// two unit vectors, hence the normalisation to `[0, 1]`.
pub fn kkt_residual(body: &BodyModel, points: &[DVector<f64>]) -> Result<f64, VarsolveError> {
    let grads = perimeter_gradient(points)?;
    let mut worst: f64 = 0.0;
    for (x, g) in points.iter().zip(&grads) {
        let n = body.normal(x)?;
        let tangential = g - &n * g.dot(&n);
        worst = worst.max(tangential.norm() / 2.0);
    }
    Ok(worst)
}

/// Orthonormal basis (as columns) of the plane orthogonal to the unit vector
/// `n`, taken from a Householder reflection that maps `n` to a coordinate axis.
fn tangent_basis(n: &DVector<f64>) -> DMatrix<f64> {
    let d = n.len();
    let k = n.iamax();
    let sign = if n[k] >= 0.0 { 1.0 } else { -1.0 };
    let mut w = n.clone();
    w[k] += sign;
    let scale = 2.0 / w.norm_squared();
    let mut basis = DMatrix::zeros(d, d - 1);
    let mut col = 0;
    for j in 0..d {
        if j == k {
            continue;
        }
        for i in 0..d {
            let e = if i == j { 1.0 } else { 0.0 };
            basis[(i, col)] = e - scale * w[i] * w[j];
        }
        col += 1;
    }
    basis
}

/// Second-order model of the perimeter restricted to `(∂T)^p` at a feasible
/// configuration.
struct LocalModel {
    tangents: Vec<DMatrix<f64>>,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
    residual: f64,
}

impl LocalModel {
    fn build(body: &BodyModel, points: &[DVector<f64>]) -> Result<Self, VarsolveError> {
        let p = check_len(points)?;
        let d = body.dimension();
        let m = d - 1;
        let units = edge_units(points)?;
        let grads: Vec<DVector<f64>> = (0..p)
            .map(|i| &units[i] - &units[(i + p - 1) % p])
            .collect();

        let mut tangents = Vec::with_capacity(p);
        let mut multipliers = Vec::with_capacity(p);
        let mut gradient = DVector::zeros(p * m);
        let mut residual: f64 = 0.0;
        for i in 0..p {
            let grad_g = body.gradient(&points[i]);
            let norm_g = grad_g.norm();
            if norm_g < 1e-12 {
                return Err(GeometryError::DegeneratePoint.into());
            }
            let n = &grad_g / norm_g;
            let t = tangent_basis(&n);
            let r = t.tr_mul(&grads[i]);
            residual = residual.max(r.norm() / 2.0);
            gradient.rows_mut(i * m, m).copy_from(&r);
            multipliers.push(grads[i].dot(&grad_g) / (norm_g * norm_g));
            tangents.push(t);
        }

        // Lagrangian Hessian blocks, reduced to the tangent planes.
        let mut hessian = DMatrix::zeros(p * m, p * m);
        let mut add_block = |a: usize, b: usize, block: &DMatrix<f64>| {
            let reduced = tangents[a].tr_mul(block) * &tangents[b];
            let mut view = hessian.view_mut((a * m, b * m), (m, m));
            view += reduced;
        };
        for i in 0..p {
            let j = (i + 1) % p;
            let len = (&points[i] - &points[j]).norm();
            let u = &units[i];
            let block = (DMatrix::identity(d, d) - u * u.transpose()) / len;
            add_block(i, i, &block);
            add_block(j, j, &block);
            let neg = -block;
            add_block(i, j, &neg);
            add_block(j, i, &neg);
        }
        for i in 0..p {
            let h = body.hessian_diagonal(&points[i]);
            let curvature = DMatrix::from_diagonal(&(h * -multipliers[i]));
            add_block(i, i, &curvature);
        }
        Ok(LocalModel {
            tangents,
            gradient,
            hessian,
            residual,
        })
    }

    /// Newton step in tangent coordinates, using a pseudo-inverse so that the
    /// null directions of degenerate (integrable) families are left alone.
    fn newton_step(&self) -> DVector<f64> {
        let eig = SymmetricEigen::new(self.hessian.clone());
        let scale = eig.eigenvalues.amax();
        let mut step = DVector::zeros(self.gradient.len());
        if !(scale > 0.0) {
            return step;
        }
        for (k, &mu) in eig.eigenvalues.iter().enumerate() {
            if mu.abs() > PINV_CUTOFF * scale {
                let v = eig.eigenvectors.column(k);
                step -= v * (v.dot(&self.gradient) / mu);
            }
        }
        step
    }

    fn ambient(&self, step: &DVector<f64>) -> Vec<DVector<f64>> {
        let m = self.tangents[0].ncols();
        self.tangents
            .iter()
            .enumerate()
            .map(|(i, t)| t * step.rows(i * m, m))
            .collect()
    }
}

/// Tangential gradient norm (Euclidean over all vertices) and the residual.
fn merit_parts(body: &BodyModel, points: &[DVector<f64>]) -> Result<(f64, f64), VarsolveError> {
    let grads = perimeter_gradient(points)?;
    let mut sq = 0.0;
    let mut worst: f64 = 0.0;
    for (x, g) in points.iter().zip(&grads) {
        let n = body.normal(x)?;
        let tangential = g - &n * g.dot(&n);
        let norm = tangential.norm();
        sq += norm * norm;
        worst = worst.max(norm / 2.0);
    }
    Ok((sq.sqrt(), worst))
}

/// Multiplicative deflation `m(X) = Π (1 + ρ² / |X − σY|²)` over the dihedral
/// images `σY` of previously found orbits.
struct Deflation {
    images: Vec<Vec<DVector<f64>>>,
    radius_sq: f64,
}

impl Deflation {
    fn new(known: &[Vec<DVector<f64>>], radius: f64) -> Self {
        let images = known.iter().flat_map(|k| dihedral_images(k)).collect();
        Deflation {
            images,
            radius_sq: radius * radius,
        }
    }

    fn dist_sq(x: &[DVector<f64>], y: &[DVector<f64>]) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a - b).norm_squared()).sum()
    }

    fn factor(&self, x: &[DVector<f64>]) -> f64 {
        self.images
            .iter()
            .map(|y| 1.0 + self.radius_sq / Self::dist_sq(x, y).max(1e-300))
            .product()
    }

    /// `∇ log m · Δ` for an ambient displacement `Δ`.
    fn log_derivative(&self, x: &[DVector<f64>], delta: &[DVector<f64>]) -> f64 {
        let mut total = 0.0;
        for y in &self.images {
            let dsq = Self::dist_sq(x, y).max(1e-300);
            let along: f64 = x
                .iter()
                .zip(y)
                .zip(delta)
                .map(|((a, b), dv)| (a - b).dot(dv))
                .sum();
            total += -2.0 * self.radius_sq * along / (dsq * (dsq + self.radius_sq));
        }
        total
    }

    fn min_dist(&self, x: &[DVector<f64>]) -> f64 {
        self.images
            .iter()
            .map(|y| Self::dist_sq(x, y))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

fn retract(
    body: &BodyModel,
    points: &[DVector<f64>],
    steps: &[DVector<f64>],
    alpha: f64,
) -> Option<Vec<DVector<f64>>> {
    points
        .iter()
        .zip(steps)
        .map(|(x, s)| {
            let target = x + s * alpha;
            body.project_from(&target, x.clone())
                .or_else(|_| body.project_to_boundary(&target))
                .ok()
                .map(|bp| bp.x)
        })
        .collect()
}

fn finish(
    body: &BodyModel,
    points: Vec<DVector<f64>>,
    cfg: &SolverConfig,
    mut flags: CandidateFlags,
) -> TrajectoryCandidate {
    let eps_edge = cfg.edge_factor * body.diam();
    let per = perimeter(&points).unwrap_or(f64::NAN);
    let res = kkt_residual(body, &points).unwrap_or(f64::INFINITY);
    if min_edge(&points) < eps_edge {
        flags.degenerate_edge = true;
    }
    let p = points.len();
    let vertices: Vec<BoundaryPoint> = points
        .iter()
        .map(|x| BoundaryPoint {
            x: x.clone(),
            normal: body.normal(x).unwrap_or_else(|_| DVector::zeros(x.len())),
        })
        .collect();
    if !flags.degenerate_edge {
        flags.grazing = (0..p).any(|i| {
            let chord = (&points[(i + 1) % p] - &points[i]).normalize();
            chord.dot(&vertices[i].normal).abs() < GRAZING_THRESHOLD
        });
    }
    flags.converged = res <= cfg.tol_crit && !flags.degenerate_edge && per.is_finite();
    TrajectoryCandidate {
        vertices,
        perimeter: per,
        kkt_residual: res,
        flags,
    }
}

/// Damped Newton on the Lagrange system from a starting configuration.
/// Never fails: unconverged runs come back with diagnostic flags.
pub fn newton_refine(
    body: &BodyModel,
    start: &[DVector<f64>],
    cfg: &SolverConfig,
) -> TrajectoryCandidate {
    refine_deflated(body, start, cfg, &[])
}

/// [`newton_refine`] with the orbits in `known` deflated away.
pub fn refine_deflated(
    body: &BodyModel,
    start: &[DVector<f64>],
    cfg: &SolverConfig,
    known: &[Vec<DVector<f64>>],
) -> TrajectoryCandidate {
    let eps_edge = cfg.edge_factor * body.diam();
    let max_disp = cfg.max_step * body.diam();
    let deflation = Deflation::new(known, cfg.deflation_radius * body.diam());
    let mut flags = CandidateFlags::default();
    let mut x: Vec<DVector<f64>> = start.to_vec();

    if x.len() < 2 || min_edge(&x) < eps_edge {
        flags.degenerate_edge = true;
        return finish(body, x, cfg, flags);
    }

    let mut reached = false;
    for _ in 0..cfg.max_newton_iters {
        let model = match LocalModel::build(body, &x) {
            Ok(m) => m,
            Err(_) => {
                flags.degenerate_edge = true;
                return finish(body, x, cfg, flags);
            }
        };
        if model.residual <= cfg.tol_crit {
            reached = true;
            break;
        }
        let xi = model.newton_step();
        let mut delta = model.ambient(&xi);
        let mut factor = 1.0;
        if !deflation.is_empty() {
            let denom = 1.0 - deflation.log_derivative(&x, &delta);
            factor = if denom.abs() < 1e-12 {
                1e12 * denom.signum()
            } else {
                1.0 / denom
            };
        }
        let longest = delta.iter().map(|s| s.norm()).fold(0.0, f64::max) * factor.abs();
        if longest > max_disp {
            factor *= max_disp / longest;
        }
        if longest == 0.0 {
            break;
        }
        for s in &mut delta {
            *s *= factor;
        }

        let merit = |pts: &[DVector<f64>]| -> Option<f64> {
            let (norm, _) = merit_parts(body, pts).ok()?;
            Some(if deflation.is_empty() {
                norm
            } else {
                norm * deflation.factor(pts)
            })
        };
        let Some(merit0) = merit(&x) else { break };
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_LINE_SEARCH {
            if let Some(trial) = retract(body, &x, &delta, alpha) {
                if min_edge(&trial) >= eps_edge {
                    if let Some(mt) = merit(&trial) {
                        if mt <= (1.0 - cfg.armijo_c * alpha) * merit0 {
                            accepted = Some(trial);
                            break;
                        }
                    }
                }
            }
            alpha *= cfg.armijo_shrink;
        }
        match accepted {
            Some(next) => x = next,
            None => break,
        }
    }

    if !reached {
        return finish(body, x, cfg, flags);
    }
    if !deflation.is_empty() && deflation.min_dist(&x) <= 1e-6 * body.diam() {
        // Deflation failed to push the iterate off a known orbit.
        return finish(body, x, cfg, flags);
    }
    // Plain Newton polish to near machine precision.
    let mut best = merit_parts(body, &x).map(|m| m.1).unwrap_or(f64::INFINITY);
    for _ in 0..MAX_POLISH_STEPS {
        let Ok(model) = LocalModel::build(body, &x) else {
            break;
        };
        let delta = model.ambient(&model.newton_step());
        let Some(trial) = retract(body, &x, &delta, 1.0) else {
            break;
        };
        if min_edge(&trial) < eps_edge {
            break;
        }
        match merit_parts(body, &trial) {
            Ok((_, res)) if res < best => {
                best = res;
                x = trial;
            }
            _ => break,
        }
    }
    finish(body, x, cfg, flags)
}

/// Eigenvalues of the reduced Lagrangian Hessian at a configuration.
pub fn reduced_hessian_eigenvalues(
    body: &BodyModel,
    points: &[DVector<f64>],
) -> Result<DVector<f64>, VarsolveError> {
    let model = LocalModel::build(body, points)?;
    Ok(SymmetricEigen::new(model.hessian).eigenvalues)
}

/// True when the reduced Hessian has more near-zero eigenvalues than symmetry
/// explains, i.e. the critical point sits on a continuous family.
pub fn classify_continuum(body: &BodyModel, points: &[DVector<f64>]) -> bool {
    let Ok(eigs) = reduced_hessian_eigenvalues(body, points) else {
        return true;
    };
    let scale = eigs.amax();
    let null = eigs
        .iter()
        .filter(|l| l.abs() < CONTINUUM_REL_THRESHOLD * scale)
        .count();
    null > EXPECTED_NULL_DIM
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub starts: usize,
    pub refinements: usize,
    pub converged: usize,
}

/// Random start: `p` radial projections of Gaussian directions, resampled
/// until every cyclic edge is at least `ε_edge`.
pub fn sample_start(
    body: &BodyModel,
    p: usize,
    eps_edge: f64,
    rng: &mut impl Rng,
) -> Option<Vec<DVector<f64>>> {
    let d = body.dimension();
    for _ in 0..MAX_START_RESAMPLES {
        let mut pts = Vec::with_capacity(p);
        for _ in 0..p {
            let u = loop {
                let g = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
                let n = g.norm();
                if n > 1e-8 {
                    break g / n;
                }
            };
            pts.push(body.radial_project(&u).ok()?.x);
        }
        if min_edge(&pts) >= eps_edge {
            return Some(pts);
        }
    }
    None
}

fn run_start(
    body: &BodyModel,
    p: usize,
    cfg: &SolverConfig,
    index: usize,
) -> (Vec<TrajectoryCandidate>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(index as u64);
    let Some(start) = sample_start(body, p, cfg.edge_factor * body.diam(), &mut rng) else {
        return (Vec::new(), 0);
    };
    let mut found: Vec<TrajectoryCandidate> = Vec::new();
    let mut known: Vec<Vec<DVector<f64>>> = Vec::new();
    let mut refinements = 0;
    for round in 0..=cfg.deflation_restarts {
        if round > 0 && known.is_empty() {
            break;
        }
        refinements += 1;
        let cand = refine_deflated(body, &start, cfg, &known);
        if !cand.flags.converged {
            break;
        }
        known.push(cand.points());
        if !cand.flags.grazing {
            found.push(cand);
        }
    }
    (found, refinements)
}

/// Multistart Newton search for length-`p` periodic trajectories.
///
/// Start `k` draws from the ChaCha stream `k` of `rng_seed`, so the result is
/// deterministic and independent of thread scheduling; results are merged in
/// start order. Returned candidates are converged, non-grazing and
/// non-degenerate, with the continuum flag filled in.
pub fn multistart_search(
    body: &BodyModel,
    p: usize,
    cfg: &SolverConfig,
) -> Result<(Vec<TrajectoryCandidate>, SearchStats), VarsolveError> {
    cfg.validate()?;
    if p < 2 {
        return Err(VarsolveError::TooFewVertices(p));
    }
    let per_start: Vec<(Vec<TrajectoryCandidate>, usize)> = (0..cfg.n_starts)
        .into_par_iter()
        .map(|k| run_start(body, p, cfg, k))
        .collect();
    let mut stats = SearchStats {
        starts: cfg.n_starts,
        ..Default::default()
    };
    let mut out = Vec::new();
    for (cands, refinements) in per_start {
        stats.refinements += refinements;
        for mut c in cands {
            stats.converged += 1;
            c.flags.continuum_suspect = classify_continuum(body, &c.points());
            out.push(c);
        }
    }
    Ok((out, stats))
}
