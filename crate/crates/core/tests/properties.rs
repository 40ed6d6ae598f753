use billiards_core::{
    closure_residual_of, dedup, dihedral_images, kkt_residual, multistart_search, perimeter,
    perimeter_gradient, reflect, same_orbit, BodyModel, SolverConfig, TrajectoryCandidate,
    TOL_DEDUP,
};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bumped() -> BodyModel {
    BodyModel::bumped_ellipsoid(&[1.0, 1.25, 1.6], 0.05, &[1.0, -1.0, 0.5]).unwrap()
}

fn direction() -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-1.0..1.0f64, 3)
        .prop_filter("not too short", |v| {
            v.iter().map(|x| x * x).sum::<f64>() > 0.01
        })
        .prop_map(|v| DVector::from_vec(v).normalize())
}

/// `p` boundary points of the bumped body along random rays.
fn configuration(p: usize) -> impl Strategy<Value = Vec<DVector<f64>>> {
    prop::collection::vec(direction(), p)
        .prop_map(|dirs| {
            let body = bumped();
            dirs.iter()
                .map(|u| body.radial_project(u).unwrap().x)
                .collect::<Vec<_>>()
        })
        .prop_filter("edges not degenerate", |pts| {
            billiards_core::varsolve::min_edge(pts) > 1e-2
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflection_is_an_isometric_involution(v in direction(), n in direction()) {
        let w = reflect(&v, &n).unwrap();
        prop_assert!((w.norm() - v.norm()).abs() < 1e-14);
        prop_assert!((reflect(&w, &n).unwrap() - &v).norm() < 1e-14);
        prop_assert!((w.dot(&n) + v.dot(&n)).abs() < 1e-14);
    }

    #[test]
    fn constraint_gradient_matches_central_differences(
        x in prop::collection::vec(-1.5..1.5f64, 3)
    ) {
        let body = bumped();
        let x = DVector::from_vec(x);
        let g = body.gradient(&x);
        let h = 1e-6;
        for k in 0..3 {
            let mut e = DVector::zeros(3);
            e[k] = h;
            let fd = (body.eval_constraint(&(&x + &e)) - body.eval_constraint(&(&x - &e))) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() <= 1e-6 * g.norm().max(1.0));
        }
    }

    #[test]
    fn perimeter_gradient_matches_central_differences(pts in configuration(5)) {
        let grad = perimeter_gradient(&pts).unwrap();
        let gnorm = grad.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        let h = 1e-6 * bumped().diam();
        for i in 0..pts.len() {
            for k in 0..3 {
                let mut plus = pts.clone();
                let mut minus = pts.clone();
                plus[i][k] += h;
                minus[i][k] -= h;
                let fd = (perimeter(&plus).unwrap() - perimeter(&minus).unwrap()) / (2.0 * h);
                prop_assert!((fd - grad[i][k]).abs() <= 1e-6 * gnorm);
            }
        }
    }

    #[test]
    fn perimeter_and_residual_are_dihedral_invariant(pts in configuration(5)) {
        let body = bumped();
        let f = perimeter(&pts).unwrap();
        let r = kkt_residual(&body, &pts).unwrap();
        for img in dihedral_images(&pts) {
            prop_assert!((perimeter(&img).unwrap() - f).abs() <= 1e-12);
            prop_assert!((kkt_residual(&body, &img).unwrap() - r).abs() <= 1e-12);
            prop_assert!(same_orbit(&pts, &img, TOL_DEDUP, body.diam()));
        }
    }

    #[test]
    fn residual_is_normalised(pts in configuration(3)) {
        let r = kkt_residual(&bumped(), &pts).unwrap();
        prop_assert!((0.0..=1.0).contains(&r));
    }
}

fn found_orbits(p: usize) -> (BodyModel, Vec<TrajectoryCandidate>) {
    let body = bumped();
    let cfg = SolverConfig {
        n_starts: 120,
        rng_seed: 3,
        ..Default::default()
    };
    let (cands, _) = multistart_search(&body, p, &cfg).unwrap();
    (body, cands)
}

#[test]
fn converged_orbits_close_in_both_directions() {
    let (body, cands) = found_orbits(3);
    assert!(!cands.is_empty());
    for c in &cands {
        assert!(c.min_edge() >= 1e-3 * body.diam());
        let mut pts = c.points();
        assert!(closure_residual_of(&body, &pts) <= 1e-8);
        pts.reverse();
        assert!(closure_residual_of(&body, &pts) <= 1e-8);
    }
}

#[test]
fn dedup_is_idempotent_and_order_free() {
    let (body, cands) = found_orbits(3);
    let diam = body.diam();
    let classes = dedup(&cands, TOL_DEDUP, diam);
    let reps: Vec<TrajectoryCandidate> = classes.iter().map(|c| c.representative.clone()).collect();
    let again = dedup(&reps, TOL_DEDUP, diam);
    assert_eq!(again.len(), classes.len());
    for (a, b) in again.iter().zip(&classes) {
        assert_eq!(a.representative, b.representative);
        assert_eq!(a.members, 1);
    }

    // Relabelled copies of every candidate belong to the same classes.
    let mut relabelled = Vec::new();
    for (k, c) in cands.iter().enumerate() {
        let images = dihedral_images(&c.vertices);
        let vertices = images[k % images.len()].clone();
        relabelled.push(TrajectoryCandidate {
            vertices,
            ..c.clone()
        });
    }
    let mixed: Vec<TrajectoryCandidate> = cands.iter().chain(&relabelled).cloned().collect();
    let doubled = dedup(&mixed, TOL_DEDUP, diam);
    assert_eq!(doubled.len(), classes.len());

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut shuffled = mixed.clone();
    for _ in 0..20 {
        shuffled.shuffle(&mut rng);
        assert_eq!(dedup(&shuffled, TOL_DEDUP, diam), doubled);
    }
}

#[test]
fn seeded_search_is_reproducible() {
    let (_, a) = found_orbits(3);
    let (_, b) = found_orbits(3);
    assert_eq!(a, b);
}
