//! Exact `F_p` computations with the presented cohomology rings of cyclic
//! configuration spaces, and the index and trajectory-count arithmetic that
//! their top degrees corroborate.

mod algebra;
mod field;
mod presentations;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use algebra::{BettiTable, Generator, GradedAlgebra, Monomial, Polynomial};
pub use field::{is_prime, PrimeField};
pub use presentations::{
    build_plane_conf_algebra, build_sphere_conf_algebra, MAX_DIMENSION, MAX_PRIME,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("algebra does not vanish by degree {0}")]
    NotFinite(usize),
    #[error("{what}: closed form gives {expected}, computed algebra gives {computed}")]
    CrossCheckMismatch {
        what: &'static str,
        expected: usize,
        computed: usize,
    },
}

/// Lower bound `(d−2)(p−1)+2` on the number of distinct length-`p` periodic
/// trajectories. For `p = 2` it reduces to `d`.
pub fn trajectory_bound(d: usize, p: usize) -> usize {
    (d.saturating_sub(2)) * (p.saturating_sub(1)) + 2
}

/// Index values and bounds for `d ≥ 3` and an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBound {
    pub d: usize,
    pub p: usize,
    /// Cohomological index of `G(R^d, p)`: `(d−1)(p−1)`.
    pub hind_plane: usize,
    /// Cohomological index of `G(S^{d−1}, p)`: `(d−2)(p−1)+1`.
    pub hind_sphere: usize,
    /// Dimension of a CW model of `G(S^{d−1}, p)`, capping the index.
    pub dim_bound: usize,
    /// Category lower bound for the quotient by `D_p`: index + 1.
    pub cat_bound: usize,
    pub trajectory_bound: usize,
    /// Index of the Stiefel manifold of 2-frames, `2d − 3`, which maps
    /// equivariantly into `G(S^{d−1}, p)`.
    pub stiefel_index: usize,
}

/// Closed-form values only, no algebra is built.
pub fn closed_form_bounds(d: usize, p: usize) -> Result<IndexBound, CohomologyError> {
    if d < 3 {
        return Err(CohomologyError::InvalidParams(format!("dimension {d} < 3")));
    }
    if p == 2 || !is_prime(p as u64) {
        return Err(CohomologyError::InvalidParams(format!(
            "p = {p} is not an odd prime"
        )));
    }
    let hind_sphere = (d - 2) * (p - 1) + 1;
    Ok(IndexBound {
        d,
        p,
        hind_plane: (d - 1) * (p - 1),
        hind_sphere,
        dim_bound: (d - 2) * (p - 1) + 1,
        cat_bound: hind_sphere + 1,
        trajectory_bound: trajectory_bound(d, p),
        stiefel_index: 2 * d - 3,
    })
}

/// Closed-form index and bound record, cross-checked against the top
/// degrees of both presented algebras. A disagreement is an error.
pub fn index_and_bound(d: usize, p: usize) -> Result<IndexBound, CohomologyError> {
    let rec = closed_form_bounds(d, p)?;
    let prime =
        u32::try_from(p).map_err(|_| CohomologyError::InvalidParams("p too large".into()))?;
    let plane = build_plane_conf_algebra(d, prime)?;
    if plane.top_degree() != rec.hind_plane {
        return Err(CohomologyError::CrossCheckMismatch {
            what: "plane configuration space top degree",
            expected: rec.hind_plane,
            computed: plane.top_degree(),
        });
    }
    let sphere = build_sphere_conf_algebra(d, prime)?;
    if sphere.top_degree() != rec.hind_sphere {
        return Err(CohomologyError::CrossCheckMismatch {
            what: "sphere configuration space top degree",
            expected: rec.hind_sphere,
            computed: sphere.top_degree(),
        });
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let r = index_and_bound(3, 3).unwrap();
        assert_eq!(r.trajectory_bound, 4);
        assert_eq!(r.hind_sphere, 3);
        assert_eq!(r.hind_sphere, r.stiefel_index);
        let r = index_and_bound(4, 5).unwrap();
        assert_eq!((r.trajectory_bound, r.hind_sphere), (10, 9));
        let r = index_and_bound(3, 5).unwrap();
        assert_eq!((r.trajectory_bound, r.hind_plane), (6, 8));
        assert_eq!(r.cat_bound, r.trajectory_bound);
    }

    #[test]
    fn two_periodic_bound_is_dimension() {
        for d in 2..8 {
            assert_eq!(trajectory_bound(d, 2), d);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(closed_form_bounds(2, 3).is_err());
        assert!(closed_form_bounds(3, 2).is_err());
        assert!(closed_form_bounds(3, 9).is_err());
    }
}
