//! Periodic billiard trajectories in smooth strictly convex bodies.
//!
//! - [`geometry`]: level-set bodies and boundary projections.
//! - [`dynamics`]: the billiard map, used as an independent closure check.
//! - [`varsolve`]: critical points of the perimeter by multistart Newton.
//! - [`symmetry`]: dihedral relabelling and orbit deduplication.
//! - [`cohomology`]: presented graded algebras over `F_p` and the index and
//!   trajectory-count arithmetic they corroborate.

pub mod cohomology;
pub mod dynamics;
pub mod geometry;
pub mod symmetry;
pub mod varsolve;

pub use cohomology::{
    build_plane_conf_algebra, build_sphere_conf_algebra, closed_form_bounds, index_and_bound,
    trajectory_bound, BettiTable, CohomologyError, GradedAlgebra, IndexBound,
};
pub use dynamics::{billiard_step, closure_residual, closure_residual_of, reflect, RayState};
pub use geometry::{BodyKind, BodyModel, BoundaryPoint, GeometryError};
pub use symmetry::{dedup, dihedral_images, same_orbit, OrbitClass, Signature, TOL_DEDUP};
pub use varsolve::{
    classify_continuum, kkt_residual, multistart_search, newton_refine, perimeter,
    perimeter_gradient, CandidateFlags, SearchStats, SolverConfig, TrajectoryCandidate,
    VarsolveError,
};
