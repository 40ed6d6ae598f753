//! Smooth strictly convex bodies given as the origin component of a level set
//! `{g = 0}` with
//!
//! ```text
//! g(x) = Σ (x_i / a_i)^2 − 1 + δ · Σ c_i x_i^4
//! ```
//!
//! The defining function is separable, so its Hessian is diagonal. The body is
//! the star-shaped region `{t·u : 0 ≤ t ≤ t*(u)}` where `t*(u)` is the first
//! positive root of `g` along the ray through `u`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Boundary tolerance relative to the body diameter.
pub const BOUNDARY_TOL_FACTOR: f64 = 1e-10;

/// Minimal chord length relative to the body diameter.
pub const EDGE_FACTOR: f64 = 1e-3;

const GRADIENT_FLOOR: f64 = 1e-12;
const PD_SAMPLES: usize = 1000;
const MAX_ROOT_ITERS: usize = 200;
const MAX_PROJECTION_ITERS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("gradient of the defining function vanishes at the query point")]
    DegeneratePoint,
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("point is not on the boundary (|g| = {0:e})")]
    OffBoundary(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKind {
    Ellipsoid,
    BumpedEllipsoid,
}

impl BodyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BodyKind::Ellipsoid => "ellipsoid",
            BodyKind::BumpedEllipsoid => "bumped-ellipsoid",
        }
    }
}

/// A smooth strictly convex body in `R^d`. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyModel {
    kind: BodyKind,
    semi_axes: Vec<f64>,
    inv_sq: Vec<f64>,
    bump_amplitude: f64,
    bump_coeffs: Vec<f64>,
    diam: f64,
    reach: f64,
}

impl BodyModel {
    pub fn ellipsoid(semi_axes: &[f64]) -> Result<Self, GeometryError> {
        let d = semi_axes.len();
        Self::new(BodyKind::Ellipsoid, semi_axes, 0.0, &vec![0.0; d])
    }

    pub fn unit_ball(d: usize) -> Result<Self, GeometryError> {
        Self::ellipsoid(&vec![1.0; d])
    }

    pub fn bumped_ellipsoid(
        semi_axes: &[f64],
        bump_amplitude: f64,
        bump_coeffs: &[f64],
    ) -> Result<Self, GeometryError> {
        Self::new(
            BodyKind::BumpedEllipsoid,
            semi_axes,
            bump_amplitude,
            bump_coeffs,
        )
    }

    /// Validates the descriptor and checks strict convexity by sampling the
    /// smallest Hessian eigenvalue over boundary points.
    pub fn new(
        kind: BodyKind,
        semi_axes: &[f64],
        bump_amplitude: f64,
        bump_coeffs: &[f64],
    ) -> Result<Self, GeometryError> {
        let d = semi_axes.len();
        if d < 2 {
            return Err(GeometryError::InvalidBody(format!("dimension {d} < 2")));
        }
        if let Some(a) = semi_axes.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(GeometryError::InvalidBody(format!(
                "semi-axis {a} is not positive"
            )));
        }
        if bump_coeffs.len() != d {
            return Err(GeometryError::InvalidBody(format!(
                "{} bump coefficients for dimension {d}",
                bump_coeffs.len()
            )));
        }
        if !(bump_amplitude.is_finite() && bump_amplitude >= 0.0) {
            return Err(GeometryError::InvalidBody(format!(
                "bump amplitude {bump_amplitude} must be finite and non-negative"
            )));
        }
        if bump_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::InvalidBody(
                "non-finite bump coefficient".into(),
            ));
        }
        let (amp, coeffs) = match kind {
            BodyKind::Ellipsoid => (0.0, vec![0.0; d]),
            BodyKind::BumpedEllipsoid => (bump_amplitude, bump_coeffs.to_vec()),
        };
        let max_a = semi_axes.iter().cloned().fold(0.0, f64::max);
        let mut body = BodyModel {
            kind,
            semi_axes: semi_axes.to_vec(),
            inv_sq: semi_axes.iter().map(|a| 1.0 / (a * a)).collect(),
            bump_amplitude: amp,
            bump_coeffs: coeffs,
            diam: 2.0 * max_a,
            reach: max_a,
        };
        body.validate_convexity()?;
        Ok(body)
    }

    fn validate_convexity(&mut self) -> Result<(), GeometryError> {
        let d = self.dimension();
        let mut directions: Vec<DVector<f64>> = Vec::with_capacity(PD_SAMPLES + 2 * d);
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut e = DVector::zeros(d);
                e[i] = s;
                directions.push(e);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_b0d1);
        while directions.len() < PD_SAMPLES + 2 * d {
            let u: DVector<f64> = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
            let norm = u.norm();
            if norm > 1e-8 {
                directions.push(u / norm);
            }
        }
        let mut reach: f64 = 0.0;
        for u in &directions {
            let bp = self.radial_project(u).map_err(|_| {
                GeometryError::InvalidBody(
                    "boundary is not reached along some ray; bump too strong".into(),
                )
            })?;
            let min_eig = self.min_hessian_eigenvalue(&bp.x);
            if min_eig <= 0.0 {
                return Err(GeometryError::InvalidBody(format!(
                    "Hessian of g is not positive definite at a boundary point \
                     (smallest eigenvalue {min_eig:e})"
                )));
            }
            reach = reach.max(bp.x.norm());
        }
        self.reach = reach;
        Ok(())
    }

    pub fn kind(&self) -> BodyKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.semi_axes.len()
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    pub fn bump_amplitude(&self) -> f64 {
        self.bump_amplitude
    }

    pub fn bump_coeffs(&self) -> &[f64] {
        &self.bump_coeffs
    }

    /// Diameter estimate `2 · max a_i`, the length scale for all tolerances.
    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn tol_boundary(&self) -> f64 {
        BOUNDARY_TOL_FACTOR * self.diam
    }

    /// Upper bound on the length of any chord, with margin over the sampled
    /// radial extent.
    pub fn max_chord(&self) -> f64 {
        2.2 * self.reach
    }

    pub fn eval_constraint(&self, x: &DVector<f64>) -> f64 {
        let mut quad = 0.0;
        let mut quartic = 0.0;
        for i in 0..x.len() {
            let xi = x[i];
            let sq = xi * xi;
            quad += sq * self.inv_sq[i];
            quartic += self.bump_coeffs[i] * sq * sq;
        }
        quad - 1.0 + self.bump_amplitude * quartic
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(x.len(), |i, _| {
            let xi = x[i];
            2.0 * xi * self.inv_sq[i]
                + 4.0 * self.bump_amplitude * self.bump_coeffs[i] * xi * xi * xi
        })
    }

    /// Diagonal of the Hessian of `g`; the off-diagonal entries vanish.
    pub fn hessian_diagonal(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(x.len(), |i, _| {
            2.0 * self.inv_sq[i] + 12.0 * self.bump_amplitude * self.bump_coeffs[i] * x[i] * x[i]
        })
    }

    pub fn min_hessian_eigenvalue(&self, x: &DVector<f64>) -> f64 {
        self.hessian_diagonal(x).min()
    }

    /// Unit outward normal `∇g / |∇g|`.
    pub fn normal(&self, x: &DVector<f64>) -> Result<DVector<f64>, GeometryError> {
        let grad = self.gradient(x);
        let norm = grad.norm();
        if !(norm >= GRADIENT_FLOOR) {
            return Err(GeometryError::DegeneratePoint);
        }
        Ok(grad / norm)
    }

    /// Boundary point on the ray through the unit vector `u`, found by Newton
    /// on `t ↦ g(t·u)` safeguarded by bisection on `[0, 2·max a_i]`.
    pub fn radial_project(&self, u: &DVector<f64>) -> Result<BoundaryPoint, GeometryError> {
        let tol = 1e-3 * self.tol_boundary();
        let phi = |t: f64| self.eval_constraint(&(u * t));
        let dphi = |t: f64| self.gradient(&(u * t)).dot(u);

        let mut lo = 0.0;
        let mut hi = self.diam;
        if phi(hi) <= 0.0 {
            return Err(GeometryError::NoConvergence("radial projection"));
        }
        // Ellipsoid root as the initial guess.
        let quad: f64 = (0..u.len()).map(|i| u[i] * u[i] * self.inv_sq[i]).sum();
        let mut t = (1.0 / quad.sqrt()).clamp(lo, hi);
        for _ in 0..MAX_ROOT_ITERS {
            let val = phi(t);
            if val.abs() <= tol {
                return BoundaryPoint::on(self, u * t);
            }
            if val < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let slope = dphi(t);
            let newton = t - val / slope;
            t = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(GeometryError::NoConvergence("radial projection"))
    }

    /// Nearest point of `{g = 0}` to `x`, by Newton on the optimality system
    /// `y − x + μ∇g(y) = 0`, `g(y) = 0`, started from the radial projection.
    pub fn project_to_boundary(&self, x: &DVector<f64>) -> Result<BoundaryPoint, GeometryError> {
        let norm = x.norm();
        if !(norm > 1e-12 * self.diam) {
            return Err(GeometryError::DegeneratePoint);
        }
        let start = self.radial_project(&(x / norm))?;
        self.project_from(x, start.x)
    }

    /// Same as [`BodyModel::project_to_boundary`] but seeded with a nearby
    /// boundary guess instead of the radial projection.
    pub fn project_from(
        &self,
        x: &DVector<f64>,
        guess: DVector<f64>,
    ) -> Result<BoundaryPoint, GeometryError> {
        let d = x.len();
        let tol_g = 1e-3 * self.tol_boundary();
        let tol_stat = 1e-13 * self.diam;
        let mut y = guess;
        let mut grad = self.gradient(&y);
        let mut mu = -(&y - x).dot(&grad) / grad.norm_squared();
        for _ in 0..MAX_PROJECTION_ITERS {
            let g = self.eval_constraint(&y);
            let stat = &y - x + &grad * mu;
            if g.abs() <= tol_g && stat.norm() <= tol_stat {
                return BoundaryPoint::on(self, y);
            }
            // Diagonal block I + μH; eliminate Δy by a Schur complement.
            let h = self.hessian_diagonal(&y);
            let diag = DVector::from_fn(d, |i, _| 1.0 + mu * h[i]);
            if diag.iter().any(|v| v.abs() < 1e-14) {
                return Err(GeometryError::NoConvergence("boundary projection"));
            }
            let dinv_grad = grad.component_div(&diag);
            let dinv_stat = stat.component_div(&diag);
            let schur = grad.dot(&dinv_grad);
            if schur.abs() < 1e-300 {
                return Err(GeometryError::NoConvergence("boundary projection"));
            }
            let dmu = (g - grad.dot(&dinv_stat)) / schur;
            let dy = -(dinv_stat + dinv_grad * dmu);
            y += dy;
            mu += dmu;
            if !y.iter().all(|v| v.is_finite()) {
                return Err(GeometryError::NoConvergence("boundary projection"));
            }
            grad = self.gradient(&y);
        }
        let g = self.eval_constraint(&y);
        if g.abs() <= self.tol_boundary() && (&y - x + &grad * mu).norm() <= 1e-9 * self.diam {
            return BoundaryPoint::on(self, y);
        }
        Err(GeometryError::NoConvergence("boundary projection"))
    }
}

/// A point of `∂T` with its cached unit outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub x: DVector<f64>,
    pub normal: DVector<f64>,
}

impl BoundaryPoint {
    /// Checks `|g(x)| ≤ tol_boundary` and caches the normal.
    pub fn on(body: &BodyModel, x: DVector<f64>) -> Result<Self, GeometryError> {
        let g = body.eval_constraint(&x);
        if !(g.abs() <= body.tol_boundary()) {
            return Err(GeometryError::OffBoundary(g));
        }
        let normal = body.normal(&x)?;
        Ok(BoundaryPoint { x, normal })
    }
}
