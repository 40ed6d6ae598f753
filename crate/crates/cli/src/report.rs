//! Search and cohomology reports.

use std::time::Instant;

use billiards_core::cohomology::is_prime;
use billiards_core::{
    build_plane_conf_algebra, build_sphere_conf_algebra, closure_residual, closure_residual_of,
    dedup, index_and_bound, multistart_search, same_orbit, trajectory_bound, BettiTable, BodyModel,
    CandidateFlags, GradedAlgebra, IndexBound, SearchStats, TrajectoryCandidate, TOL_DEDUP,
};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Largest shooting defect accepted for a certified trajectory.
pub const CLOSURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INAPPLICABLE")]
    Inapplicable,
    #[serde(rename = "INAPPLICABLE-DEGENERATE")]
    InapplicableDegenerate,
}

impl Verdict {
    /// PASS exactly when `d ≥ 3`, `p` is an odd prime and `count ≥ B(d, p)`.
    /// Below the bound, a run that met continuum families is degenerate
    /// rather than failed.
    pub fn decide(d: usize, p: usize, count: usize, has_continuum: bool) -> Self {
        let applicable = d >= 3 && p > 2 && is_prime(p as u64);
        if !applicable {
            Verdict::Inapplicable
        } else if count >= trajectory_bound(d, p) {
            Verdict::Pass
        } else if has_continuum {
            Verdict::InapplicableDegenerate
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inapplicable => "INAPPLICABLE",
            Verdict::InapplicableDegenerate => "INAPPLICABLE-DEGENERATE",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Fail => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub perimeter: f64,
    pub vertices: Vec<Vec<f64>>,
    pub kkt_residual: f64,
    pub closure_residual: f64,
    pub members: usize,
    pub flags: CandidateFlags,
}

/// Continuum-flagged candidates grouped by perimeter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumFamily {
    pub perimeter: f64,
    pub members: usize,
    /// Lowest-residual member.
    pub vertices: Vec<Vec<f64>>,
    pub kkt_residual: f64,
    pub closure_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub d: usize,
    pub p: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merged_seeds: Vec<u64>,
    pub tol_dedup: f64,
    pub stats: SearchStats,
    /// Converged, non-continuum candidates whose shooting check failed.
    pub closure_rejected: usize,
    pub classes: Vec<ClassRecord>,
    pub continuum: Vec<ContinuumFamily>,
    pub certified_count: usize,
    pub bound: usize,
    pub verdict: Verdict,
    /// Wall-clock data; the only field that varies between identical runs.
    pub timing: Timing,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The report with `timing` zeroed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> String {
        RunReport {
            timing: Timing::default(),
            ..self.clone()
        }
        .to_json()
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("report: {e}")))
    }

    pub fn body(&self) -> Result<BodyModel, CliError> {
        self.config.body.build()
    }
}

fn coords(c: &TrajectoryCandidate) -> Vec<Vec<f64>> {
    c.vertices
        .iter()
        .map(|v| v.x.iter().copied().collect())
        .collect()
}

fn to_points(vertices: &[Vec<f64>]) -> Vec<DVector<f64>> {
    vertices
        .iter()
        .map(|v| DVector::from_column_slice(v))
        .collect()
}

fn group_continuum(
    body: &BodyModel,
    mut cands: Vec<(TrajectoryCandidate, usize)>,
) -> Vec<ContinuumFamily> {
    let gap = 2.0 * TOL_DEDUP * body.diam();
    cands.sort_by(|a, b| {
        a.0.perimeter
            .total_cmp(&b.0.perimeter)
            .then(a.0.kkt_residual.total_cmp(&b.0.kkt_residual))
    });
    let mut groups: Vec<Vec<(TrajectoryCandidate, usize)>> = Vec::new();
    for c in cands {
        match groups.last_mut() {
            Some(g) if c.0.perimeter - g.last().unwrap().0.perimeter <= gap => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let members = g.iter().map(|(_, m)| m).sum();
            let (best, _) = g
                .into_iter()
                .min_by(|a, b| {
                    a.0.kkt_residual
                        .total_cmp(&b.0.kkt_residual)
                        .then(a.0.perimeter.total_cmp(&b.0.perimeter))
                })
                .expect("non-empty group");
            ContinuumFamily {
                perimeter: best.perimeter,
                members,
                vertices: coords(&best),
                kkt_residual: best.kkt_residual,
                closure_residual: closure_residual(body, &best),
            }
        })
        .collect()
}

/// Turns deduplicated classes into records, dropping nothing.
fn class_records(body: &BodyModel, certified: &[TrajectoryCandidate]) -> Vec<ClassRecord> {
    dedup(certified, TOL_DEDUP, body.diam())
        .into_iter()
        .map(|cls| ClassRecord {
            perimeter: cls.perimeter,
            vertices: coords(&cls.representative),
            kkt_residual: cls.representative.kkt_residual,
            closure_residual: closure_residual(body, &cls.representative),
            members: cls.members,
            flags: cls.representative.flags,
        })
        .collect()
}

/// Multistart search, shooting check, dedup and bound comparison.
pub fn run_search(config: &ExperimentConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let started = Instant::now();
    let body = config.body.build()?;
    let (cands, stats) = multistart_search(&body, config.p, &config.solver)
        .map_err(|e| CliError::Config(format!("solver: {e}")))?;

    let mut certified = Vec::new();
    let mut continuum = Vec::new();
    let mut closure_rejected = 0;
    for c in cands {
        if c.flags.continuum_suspect {
            continuum.push((c, 1));
        } else if closure_residual(&body, &c) <= CLOSURE_TOL {
            certified.push(c);
        } else {
            closure_rejected += 1;
        }
    }
    let classes = class_records(&body, &certified);
    let continuum = group_continuum(&body, continuum);
    Ok(assemble(
        config.clone(),
        &body,
        stats,
        closure_rejected,
        classes,
        continuum,
        Vec::new(),
        started,
    ))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    config: ExperimentConfig,
    body: &BodyModel,
    stats: SearchStats,
    closure_rejected: usize,
    classes: Vec<ClassRecord>,
    continuum: Vec<ContinuumFamily>,
    merged_seeds: Vec<u64>,
    started: Instant,
) -> RunReport {
    let d = body.dimension();
    let p = config.p;
    let certified_count = classes.len();
    RunReport {
        d,
        p,
        seed: config.solver.rng_seed,
        merged_seeds,
        tol_dedup: TOL_DEDUP,
        stats,
        closure_rejected,
        certified_count,
        bound: trajectory_bound(d, p),
        verdict: Verdict::decide(d, p, certified_count, !continuum.is_empty()),
        classes,
        continuum,
        config,
        timing: Timing {
            wall_clock_secs: started.elapsed().as_secs_f64(),
        },
    }
}

/// Pools reports for the same body and `p` and re-deduplicates their classes.
/// The first report's config is echoed; all seeds are listed.
pub fn merge_reports(reports: &[RunReport]) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let first = reports
        .first()
        .ok_or_else(|| CliError::Config("nothing to merge".into()))?;
    for r in &reports[1..] {
        if r.config.body != first.config.body || r.p != first.p {
            return Err(CliError::Config(
                "reports describe different bodies or periods".into(),
            ));
        }
    }
    let body = first.body()?;
    let diam = body.diam();
    let rebuild = |vertices: &[Vec<f64>], flags: CandidateFlags| {
        TrajectoryCandidate::from_points(&body, &to_points(vertices))
            .map(|c| TrajectoryCandidate { flags, ..c })
            .map_err(|e| CliError::Config(format!("report vertices: {e}")))
    };

    let mut pooled = Vec::new();
    let mut weights = Vec::new();
    let mut continuum = Vec::new();
    let mut stats = SearchStats::default();
    let mut closure_rejected = 0;
    for r in reports {
        stats.starts += r.stats.starts;
        stats.refinements += r.stats.refinements;
        stats.converged += r.stats.converged;
        closure_rejected += r.closure_rejected;
        for c in &r.classes {
            pooled.push(rebuild(&c.vertices, c.flags)?);
            weights.push(c.members);
        }
        for f in &r.continuum {
            let flags = CandidateFlags {
                converged: true,
                continuum_suspect: true,
                ..Default::default()
            };
            continuum.push((rebuild(&f.vertices, flags)?, f.members));
        }
    }
    let mut classes = class_records(&body, &pooled);
    // Members count the original candidates, not the pooled representatives.
    for cls in &mut classes {
        let rep = to_points(&cls.vertices);
        cls.members = pooled
            .iter()
            .zip(&weights)
            .filter(|(c, _)| same_orbit(&c.points(), &rep, TOL_DEDUP, diam))
            .map(|(_, w)| w)
            .sum();
    }
    let continuum = group_continuum(&body, continuum);
    let mut config = first.config.clone();
    config.solver.n_starts = stats.starts;
    let seeds = reports.iter().map(|r| r.seed).collect();
    Ok(assemble(
        config,
        &body,
        stats,
        closure_rejected,
        classes,
        continuum,
        seeds,
        started,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSummary {
    pub betti: BettiTable,
    pub total_dim: usize,
    pub basis: Vec<Vec<String>>,
}

impl AlgebraSummary {
    fn of(a: &GradedAlgebra) -> Self {
        AlgebraSummary {
            betti: a.betti(),
            total_dim: a.total_dim(),
            basis: (0..=a.top_degree())
                .filter(|&n| a.dim(n) > 0)
                .map(|n| a.basis(n).iter().map(|m| a.monomial_name(m)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub expected: usize,
    pub computed: usize,
    pub ok: bool,
}

impl CrossCheck {
    fn new(name: &str, expected: usize, computed: usize) -> Self {
        CrossCheck {
            name: name.into(),
            expected,
            computed,
            ok: expected == computed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub d: usize,
    pub p: usize,
    pub plane: AlgebraSummary,
    pub sphere: Option<AlgebraSummary>,
    /// Present when `d ≥ 3` and `p` is an odd prime.
    pub bounds: Option<IndexBound>,
    pub trajectory_bound: usize,
    pub checks: Vec<CrossCheck>,
}

impl CohomologyReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Betti tables, index record and their cross-checks. The sphere algebra
/// and the index record are skipped outside `d ≥ 3`, `p` odd.
pub fn run_cohomology(d: usize, p: usize) -> Result<CohomologyReport, CliError> {
    let prime = u32::try_from(p).map_err(|_| CliError::Config(format!("p = {p} too large")))?;
    let plane_alg = build_plane_conf_algebra(d, prime).map_err(CliError::Cohomology)?;
    let plane = AlgebraSummary::of(&plane_alg);
    let hind_plane = (d - 1) * (p - 1);
    let mut checks = vec![
        CrossCheck::new("plane degree-0 dimension", 1, plane.betti.dim(0)),
        CrossCheck::new("plane top degree", hind_plane, plane.betti.top_degree),
        CrossCheck::new(
            "plane top-degree dimension",
            p - 1,
            plane.betti.dim(hind_plane),
        ),
        CrossCheck::new(
            "plane degree (d-1)p dimension",
            0,
            plane.betti.dim((d - 1) * p),
        ),
    ];
    let (sphere, bounds) = if d >= 3 && p > 2 {
        let alg = build_sphere_conf_algebra(d, prime).map_err(CliError::Cohomology)?;
        let summary = AlgebraSummary::of(&alg);
        let rec = index_and_bound(d, p).map_err(CliError::Cohomology)?;
        let total = if d % 2 == 0 { 2 * (p - 1) } else { p - 1 };
        checks.push(CrossCheck::new(
            "sphere top degree",
            rec.hind_sphere,
            summary.betti.top_degree,
        ));
        checks.push(CrossCheck::new(
            "sphere total dimension",
            total,
            summary.total_dim,
        ));
        checks.push(CrossCheck::new(
            "sphere degrees of dimension > 1",
            0,
            summary.betti.dims.values().filter(|&&v| v > 1).count(),
        ));
        (Some(summary), Some(rec))
    } else {
        (None, None)
    };
    Ok(CohomologyReport {
        d,
        p,
        plane,
        sphere,
        bounds,
        trajectory_bound: trajectory_bound(d, p),
        checks,
    })
}

/// Shooting defect of an exported record, re-evaluated on `body`.
pub fn record_closure(body: &BodyModel, vertices: &[Vec<f64>]) -> f64 {
    closure_residual_of(body, &to_points(vertices))
}
