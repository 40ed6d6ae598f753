//! The billiard map: ray shooting to the next impact and elastic reflection.
//!
//! This is deliberately independent of the variational solver, so it can be
//! used to certify that a critical configuration of the perimeter is a real
//! closed billiard trajectory.

use nalgebra::DVector;
use thiserror::Error;

use crate::geometry::{BodyModel, GeometryError, EDGE_FACTOR};
use crate::varsolve::TrajectoryCandidate;

/// Impacts with `|v·n|` below this are treated as tangential.
pub const GRAZING_THRESHOLD: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-12;
const MAX_ROOT_ITERS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("grazing impact (|v·n| = {0:e})")]
    GrazingImpact(f64),
    #[error("impact root-find did not converge")]
    NoConvergence,
    #[error("invalid ray state: {0}")]
    InvalidState(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Reflect the direction of travel `v` off a wall with outward unit normal
/// `n`: `v' = v − 2(v·n)n`.
pub fn reflect(v: &DVector<f64>, n: &DVector<f64>) -> Result<DVector<f64>, DynamicsError> {
    let vn = v.dot(n);
    if vn.abs() < GRAZING_THRESHOLD {
        return Err(DynamicsError::GrazingImpact(vn));
    }
    Ok(v - n * (2.0 * vn))
}

/// A boundary point together with a unit direction pointing strictly inward.
#[derive(Debug, Clone, PartialEq)]
pub struct RayState {
    position: DVector<f64>,
    direction: DVector<f64>,
}

impl RayState {
    pub fn new(
        body: &BodyModel,
        position: DVector<f64>,
        direction: DVector<f64>,
    ) -> Result<Self, DynamicsError> {
        if body.eval_constraint(&position).abs() > body.tol_boundary() {
            return Err(DynamicsError::InvalidState("position is off the boundary"));
        }
        if (direction.norm() - 1.0).abs() > UNIT_TOL {
            return Err(DynamicsError::InvalidState(
                "direction is not a unit vector",
            ));
        }
        let n = body.normal(&position)?;
        let vn = direction.dot(&n);
        if vn.abs() < GRAZING_THRESHOLD {
            return Err(DynamicsError::GrazingImpact(vn));
        }
        if vn > 0.0 {
            return Err(DynamicsError::InvalidState("direction points outward"));
        }
        Ok(RayState {
            position,
            direction,
        })
    }

    /// Start at boundary point `from` heading toward boundary point `to`.
    pub fn toward(
        body: &BodyModel,
        from: &DVector<f64>,
        to: &DVector<f64>,
    ) -> Result<Self, DynamicsError> {
        let chord = to - from;
        let len = chord.norm();
        if len < EDGE_FACTOR * body.diam() {
            return Err(DynamicsError::InvalidState(
                "target coincides with the start",
            ));
        }
        RayState::new(body, from.clone(), chord / len)
    }

    pub fn position(&self) -> &DVector<f64> {
        &self.position
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }
}

/// Follow the ray to its next impact with `∂T` and reflect there.
///
/// `h(t) = g(x + t·v)` is negative just past the start; the exit root is
/// bracketed by doubling from the minimal chord length and then polished by
/// safeguarded Newton.
pub fn billiard_step(body: &BodyModel, state: &RayState) -> Result<RayState, DynamicsError> {
    let x = &state.position;
    let v = &state.direction;
    let h = |t: f64| body.eval_constraint(&(x + v * t));
    let dh = |t: f64| body.gradient(&(x + v * t)).dot(v);

    let eps_edge = EDGE_FACTOR * body.diam();
    let mut lo = eps_edge;
    if h(lo) >= 0.0 {
        // The chord is shorter than the minimal edge: a near-tangential launch.
        return Err(DynamicsError::GrazingImpact(v.dot(&body.normal(x)?)));
    }
    let cap = body.max_chord();
    let mut hi = 2.0 * lo;
    loop {
        if hi >= cap {
            hi = cap;
            if h(hi) <= 0.0 {
                return Err(DynamicsError::NoConvergence);
            }
            break;
        }
        if h(hi) > 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }

    let tol = 1e-6 * body.tol_boundary();
    let mut t = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..MAX_ROOT_ITERS {
        let val = h(t);
        if val < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let slope = dh(t);
        let newton = t - val / slope;
        let step_ok = slope > 0.0 && newton > lo && newton < hi;
        let next = if step_ok { newton } else { 0.5 * (lo + hi) };
        if val.abs() <= tol || (next - t).abs() <= 1e-16 * t.max(1.0) {
            t = if step_ok { newton } else { t };
            converged = true;
            break;
        }
        t = next;
    }
    if !converged {
        return Err(DynamicsError::NoConvergence);
    }

    let position = x + v * t;
    let n = body.normal(&position)?;
    let reflected = reflect(v, &n)?;
    // Renormalise away the rounding accumulated by repeated reflections.
    let direction = &reflected / reflected.norm();
    RayState::new(body, position, direction)
}

/// Shoot from `x_1` toward `x_2`, take `p` billiard steps and report the
/// largest distance between the shot impacts and the listed vertices,
/// relative to the body diameter. Any step failure yields `+∞`.
pub fn closure_residual_of(body: &BodyModel, vertices: &[DVector<f64>]) -> f64 {
    let p = vertices.len();
    if p < 2 {
        return f64::INFINITY;
    }
    let mut state = match RayState::toward(body, &vertices[0], &vertices[1]) {
        Ok(s) => s,
        Err(_) => return f64::INFINITY,
    };
    let mut worst: f64 = 0.0;
    for k in 1..=p {
        state = match billiard_step(body, &state) {
            Ok(s) => s,
            Err(_) => return f64::INFINITY,
        };
        let target = &vertices[k % p];
        worst = worst.max((state.position() - target).norm());
    }
    worst / body.diam()
}

pub fn closure_residual(body: &BodyModel, traj: &TrajectoryCandidate) -> f64 {
    closure_residual_of(body, &traj.points())
}
