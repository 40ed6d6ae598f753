//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use billiards_cli::{run_search, BodySpec, ExperimentConfig, RunReport};
use billiards_core::varsolve::sample_start;
use billiards_core::{
    build_plane_conf_algebra, build_sphere_conf_algebra, closure_residual, closure_residual_of,
    dedup, dihedral_images, kkt_residual, multistart_search, perimeter, perimeter_gradient,
    BodyKind, BodyModel, SolverConfig, TrajectoryCandidate, TOL_DEDUP,
};
use nalgebra::{DVector, Rotation3, Vector3};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRADIENT_REL_TOL: f64 = 1e-6;
const CLOSURE_TOL: f64 = 1e-8;
const KKT_TOL: f64 = 1e-8;
const PERIMETER_TOL: f64 = 1e-8;
const DRIFT_TOL: f64 = 1e-12;
const SEED: u64 = 42;

const LIMIT_GRADIENT: Duration = Duration::from_secs(5);
const LIMIT_TWO_PERIODIC: Duration = Duration::from_secs(30);
const LIMIT_MAIN: Duration = Duration::from_secs(600);
const LIMIT_SPHERE: Duration = Duration::from_secs(30);
const LIMIT_COHOMOLOGY: Duration = Duration::from_secs(1);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(
        elapsed < limit,
        format!("took {elapsed:.1?}, limit {limit:?}"),
    )
}

fn bumped_spec() -> BodySpec {
    BodySpec {
        kind: BodyKind::BumpedEllipsoid,
        d: 3,
        semi_axes: vec![1.0, 1.25, 1.6],
        bump_delta: 0.05,
        bump_coeffs: vec![1.0, -1.0, 0.5],
    }
}

fn ellipsoid_spec(semi_axes: &[f64]) -> BodySpec {
    BodySpec {
        kind: BodyKind::Ellipsoid,
        d: semi_axes.len(),
        semi_axes: semi_axes.to_vec(),
        bump_delta: 0.0,
        bump_coeffs: Vec::new(),
    }
}

fn config(body: BodySpec, p: usize, n_starts: usize) -> ExperimentConfig {
    ExperimentConfig::new(
        body,
        p,
        SolverConfig {
            n_starts,
            rng_seed: SEED,
            ..Default::default()
        },
    )
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let body = bumped_spec().build().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let h = 1e-6 * body.diam();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let pts = sample_start(&body, 5, 1e-3 * body.diam(), &mut rng).ok_or("no start")?;
        let grad = perimeter_gradient(&pts).map_err(|e| e.to_string())?;
        let mut err = 0.0;
        let mut norm = 0.0;
        for i in 0..5 {
            for k in 0..3 {
                let mut plus = pts.clone();
                let mut minus = pts.clone();
                plus[i][k] += h;
                minus[i][k] -= h;
                let fd = (perimeter(&plus).unwrap() - perimeter(&minus).unwrap()) / (2.0 * h);
                err += (fd - grad[i][k]).powi(2);
                norm += grad[i][k].powi(2);
            }
        }
        worst = worst.max((err / norm).sqrt());
    }
    ensure(
        worst <= GRADIENT_REL_TOL,
        format!("relative error {worst:e}"),
    )?;
    within(t.elapsed(), LIMIT_GRADIENT)?;
    Ok(format!(
        "100 configurations, worst relative error {worst:.1e}, {:.2?}",
        t.elapsed()
    ))
}

/// Regular `p`-gon with rotation number `k` on the unit circle, moved by `rot`.
fn regular_polygon(p: usize, k: usize, rot: &Rotation3<f64>) -> Vec<DVector<f64>> {
    (0..p)
        .map(|i| {
            let th = 2.0 * PI * (i * k) as f64 / p as f64;
            let v = rot * Vector3::new(th.cos(), th.sin(), 0.0);
            DVector::from_column_slice(v.as_slice())
        })
        .collect()
}

fn criterion_2(reports: &[RunReport]) -> Outcome {
    // Variational to dynamical: every converged candidate closes under shooting.
    let body = bumped_spec().build().map_err(|e| e.to_string())?;
    let mut checked = 0;
    let mut worst_closure: f64 = 0.0;
    for p in [3, 4, 5] {
        let cfg = SolverConfig {
            n_starts: 1500,
            rng_seed: SEED + p as u64,
            ..Default::default()
        };
        let (cands, _) = multistart_search(&body, p, &cfg).map_err(|e| e.to_string())?;
        for c in &cands {
            ensure(
                c.min_edge() >= 1e-3 * body.diam(),
                "converged candidate with a short edge",
            )?;
            worst_closure = worst_closure.max(closure_residual(&body, c));
        }
        checked += cands.len();
    }
    for r in reports {
        ensure(
            r.closure_rejected == 0,
            format!("{} candidates failed shooting", r.closure_rejected),
        )?;
        let b = r.body().map_err(|e| e.to_string())?;
        for v in r
            .classes
            .iter()
            .map(|c| &c.vertices)
            .chain(r.continuum.iter().map(|f| &f.vertices))
        {
            let pts: Vec<DVector<f64>> = v.iter().map(|x| DVector::from_column_slice(x)).collect();
            worst_closure = worst_closure.max(closure_residual_of(&b, &pts));
        }
    }
    ensure(checked > 0, "no converged candidates")?;
    ensure(
        worst_closure <= CLOSURE_TOL,
        format!("closure residual {worst_closure:e}"),
    )?;

    // Dynamical to variational: shot orbits on the sphere are critical.
    let sphere = BodyModel::unit_ball(3).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_kkt: f64 = 0.0;
    for _ in 0..50 {
        let axis = Vector3::new(rng.random(), rng.random(), rng.random()).normalize();
        let rot = Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(axis),
            rng.random::<f64>() * 2.0 * PI,
        );
        for (p, k) in [(3, 1), (5, 1), (5, 2)] {
            let pts = regular_polygon(p, k, &rot);
            ensure(
                closure_residual_of(&sphere, &pts) <= CLOSURE_TOL,
                "sphere polygon does not close",
            )?;
            worst_kkt = worst_kkt.max(kkt_residual(&sphere, &pts).map_err(|e| e.to_string())?);
        }
    }
    ensure(worst_kkt <= KKT_TOL, format!("kkt residual {worst_kkt:e}"))?;
    Ok(format!(
        "{checked} candidates, worst closure {worst_closure:.1e}; 150 rotated sphere polygons, worst kkt {worst_kkt:.1e}"
    ))
}

fn criterion_3() -> Result<(String, RunReport), String> {
    let t = Instant::now();
    let r = run_search(&config(ellipsoid_spec(&[1.0, 1.3, 1.7]), 2, 2000))
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let perims: Vec<f64> = r.classes.iter().map(|c| c.perimeter).collect();
    ensure(
        perims.len() == 3,
        format!("{} classes, perimeters {perims:?}", perims.len()),
    )?;
    for (got, want) in perims.iter().zip([4.0, 5.2, 6.8]) {
        ensure(
            (got - want).abs() <= PERIMETER_TOL,
            format!("perimeter {got} vs {want}"),
        )?;
    }
    within(elapsed, LIMIT_TWO_PERIODIC)?;
    Ok((
        format!("3 classes, perimeters {perims:?}, {elapsed:.2?}"),
        r,
    ))
}

fn criterion_4() -> Result<(String, Vec<RunReport>), String> {
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for (p, starts, bound) in [(3, 10_000, 4), (5, 50_000, 6)] {
        let r = run_search(&config(bumped_spec(), p, starts)).map_err(|e| e.to_string())?;
        ensure(r.bound == bound, format!("bound {} for p={p}", r.bound))?;
        parts.push(format!(
            "p={p}: N={} (B={bound}) {}",
            r.certified_count,
            r.verdict.as_str()
        ));
        if r.certified_count < bound {
            failures.push(format!("p={p} undercount {} < {bound}", r.certified_count));
        }
        reports.push(r);
    }
    let elapsed = t.elapsed();
    ensure(failures.is_empty(), failures.join("; "))?;
    within(elapsed, LIMIT_MAIN)?;
    Ok((format!("{}, {elapsed:.1?}", parts.join(", ")), reports))
}

fn criterion_5() -> Result<(String, Vec<RunReport>), String> {
    let t = Instant::now();
    let sphere = BodyModel::unit_ball(3).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut reports = Vec::new();
    for p in [3usize, 5] {
        let cfg = SolverConfig {
            n_starts: 1000,
            rng_seed: SEED,
            ..Default::default()
        };
        let (cands, stats) = multistart_search(&sphere, p, &cfg).map_err(|e| e.to_string())?;
        ensure(!cands.is_empty(), format!("p={p}: nothing converged"))?;
        let flagged = cands.iter().filter(|c| c.flags.continuum_suspect).count();
        ensure(
            flagged == cands.len(),
            format!("p={p}: {flagged}/{} flagged", cands.len()),
        )?;
        let chords: Vec<f64> = (1..=p / 2)
            .map(|k| 2.0 * p as f64 * (PI * k as f64 / p as f64).sin())
            .collect();
        let mut by_k = BTreeMap::new();
        for c in &cands {
            let k = chords
                .iter()
                .position(|l| (c.perimeter - l).abs() <= PERIMETER_TOL)
                .ok_or_else(|| {
                    format!(
                        "p={p}: perimeter {} matches no rotation number",
                        c.perimeter
                    )
                })?;
            *by_k.entry(k + 1).or_insert(0) += 1;
        }
        parts.push(format!(
            "p={p}: {}/{} flagged, by rotation number {by_k:?}",
            flagged, stats.converged
        ));
        reports.push(
            run_search(&config(ellipsoid_spec(&[1.0; 3]), p, 200)).map_err(|e| e.to_string())?,
        );
    }
    let elapsed = t.elapsed();
    within(elapsed, LIMIT_SPHERE)?;
    Ok((format!("{}, {elapsed:.2?}", parts.join("; ")), reports))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    // (a) Poincaré polynomial of triples in the plane: (1+t)(1+2t).
    let mut poly = vec![1usize];
    for a in [1usize, 2] {
        let mut next = vec![0; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] += a * c;
        }
        poly = next;
    }
    let expected: BTreeMap<usize, usize> = poly
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .collect();
    let a = build_plane_conf_algebra(2, 3).map_err(|e| e.to_string())?;
    ensure(
        a.betti().dims == expected,
        format!("(a) table {}", a.betti()),
    )?;

    for d in 2..=4 {
        for p in [3u32, 5, 7] {
            let a = build_plane_conf_algebra(d, p).map_err(|e| e.to_string())?;
            // (b)
            let prod = (0..p as usize).fold(a.one(), |acc, i| a.multiply(&acc, &a.gen(i)));
            ensure(prod.is_zero(), format!("(b) s_1…s_p ≠ 0 at d={d} p={p}"))?;
            // (c)
            let top = (d - 1) * (p as usize - 1);
            ensure(
                a.top_degree() == top && a.dim(top) == p as usize - 1,
                format!(
                    "(c) d={d} p={p}: top {} dim {}",
                    a.top_degree(),
                    a.dim(a.top_degree())
                ),
            )?;
        }
    }
    // (d)
    for d in 3..=6 {
        for p in [3u32, 5, 7] {
            let a = build_sphere_conf_algebra(d, p).map_err(|e| e.to_string())?;
            let want = (d - 2) * (p as usize - 1) + 1;
            ensure(
                a.top_degree() == want,
                format!("(d) d={d} p={p}: top {}", a.top_degree()),
            )?;
        }
    }
    // (e)
    let a = build_sphere_conf_algebra(4, 5).map_err(|e| e.to_string())?;
    let s1 = a.generator_index("s_1").ok_or("no s_1")?;
    let s3 = a.gen(a.generator_index("s_3").ok_or("no s_3")?);
    ensure(
        a.power(s1, 3) == s3,
        format!("(e) s_1^3 = {}", a.format(&a.power(s1, 3))),
    )?;
    ensure(a.power(s1, 4).is_zero(), "(e) s_1^4 ≠ 0")?;
    within(t.elapsed(), LIMIT_COHOMOLOGY)?;
    Ok(format!("(a)-(e) exact, {:.2?}", t.elapsed()))
}

fn criterion_7() -> Outcome {
    let body = bumped_spec().build().map_err(|e| e.to_string())?;
    let cfg = config(bumped_spec(), 5, 400);
    let (cands, _) = multistart_search(&body, 5, &cfg.solver).map_err(|e| e.to_string())?;
    ensure(!cands.is_empty(), "nothing converged")?;

    let mut drift: f64 = 0.0;
    for c in &cands {
        for img in dihedral_images(&c.points()) {
            drift = drift.max((perimeter(&img).unwrap() - c.perimeter).abs());
            drift = drift.max((kkt_residual(&body, &img).unwrap() - c.kkt_residual).abs());
        }
    }
    ensure(drift <= DRIFT_TOL, format!("dihedral drift {drift:e}"))?;

    let diam = body.diam();
    let classes = dedup(&cands, TOL_DEDUP, diam);
    let reps: Vec<TrajectoryCandidate> = classes.iter().map(|c| c.representative.clone()).collect();
    let again = dedup(&reps, TOL_DEDUP, diam);
    ensure(
        again.len() == classes.len()
            && again
                .iter()
                .zip(&classes)
                .all(|(a, b)| a.representative == b.representative),
        "dedup not idempotent",
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut shuffled = cands.clone();
    for _ in 0..20 {
        shuffled.shuffle(&mut rng);
        ensure(
            dedup(&shuffled, TOL_DEDUP, diam) == classes,
            "dedup depends on input order",
        )?;
    }

    let first = run_search(&cfg).map_err(|e| e.to_string())?;
    let second = run_search(&cfg).map_err(|e| e.to_string())?;
    ensure(
        first.to_json_without_timing() == second.to_json_without_timing(),
        "reports differ between seeded runs",
    )?;
    ensure(
        billiards_cli::render_export(&first) == billiards_cli::render_export(&second),
        "exports differ between seeded runs",
    )?;
    Ok(format!(
        "drift {drift:.1e}, {} classes idempotent, 20 shuffles, reports byte-identical",
        classes.len()
    ))
}

fn guarded<T>(f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(e) => Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    }
}

fn main() {
    let mut results: BTreeMap<usize, Outcome> = BTreeMap::new();
    let mut reports = Vec::new();

    results.insert(1, guarded(criterion_1));
    results.insert(
        3,
        guarded(criterion_3).map(|(msg, r)| {
            reports.push(r);
            msg
        }),
    );
    results.insert(
        4,
        guarded(criterion_4).map(|(msg, rs)| {
            reports.extend(rs);
            msg
        }),
    );
    results.insert(
        5,
        guarded(criterion_5).map(|(msg, rs)| {
            reports.extend(rs);
            msg
        }),
    );
    results.insert(2, guarded(|| criterion_2(&reports)));
    results.insert(6, guarded(criterion_6));
    results.insert(7, guarded(criterion_7));

    let names = [
        "",
        "gradient oracle",
        "variational-dynamical equivalence",
        "p=2 ellipsoid tightness",
        "bound on the bumped ellipsoid",
        "sphere continuum detection",
        "cohomology oracles",
        "symmetry and determinism",
    ];
    let mut failed = 0;
    for (k, outcome) in &results {
        match outcome {
            Ok(msg) => println!("criterion {k} ({}): PASS  {msg}", names[*k]),
            Err(msg) => {
                failed += 1;
                println!("criterion {k} ({}): FAIL  {msg}", names[*k]);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
}
