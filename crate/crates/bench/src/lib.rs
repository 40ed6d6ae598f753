//! Fixtures shared by the benchmarks.

use billiards_core::BodyModel;
use nalgebra::DVector;

/// The bumped ellipsoid used throughout the desk-scale experiments.
pub fn bumped_body() -> BodyModel {
    BodyModel::bumped_ellipsoid(&[1.0, 1.25, 1.6], 0.05, &[1.0, -1.0, 0.5]).expect("valid body")
}

/// `p` radially projected points spread around a slanted great circle.
pub fn polygon_start(body: &BodyModel, p: usize) -> Vec<DVector<f64>> {
    (0..p)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / p as f64 + 0.1;
            let u = DVector::from_column_slice(&[t.cos(), 0.6 * t.sin(), 0.8 * t.sin() + 0.05]);
            body.radial_project(&u.normalize())
                .expect("ray hits boundary")
                .x
        })
        .collect()
}
