//! Tab-separated trajectory export and its re-verification.
//!
//! ```text
//! # body {"kind":"ellipsoid","d":3,...}
//! kind  p  d  perimeter  kkt_residual  members  x1_1  x1_2  x1_3  x2_1  ...
//! class 2  3  4.0        0.0           12       1.0   0.0   0.0   -1.0  ...
//! ```
//!
//! Columns are separated by single tabs. Floats use the shortest round-trip
//! `Debug` form, so a re-export of the same report is byte-identical and the
//! coordinates reparse exactly.

use std::fmt::Write as _;
use std::path::Path;

use billiards_core::BodyModel;

use crate::config::BodySpec;
use crate::report::{record_closure, RunReport, CLOSURE_TOL};
use crate::CliError;

const BODY_PREFIX: &str = "# body ";

#[derive(Debug, Clone, PartialEq)]
pub struct ExportRecord {
    /// `class` for certified classes, `continuum` for continuum families.
    pub kind: String,
    pub perimeter: f64,
    pub kkt_residual: f64,
    pub members: usize,
    pub vertices: Vec<Vec<f64>>,
}

pub fn render_export(report: &RunReport) -> String {
    let (p, d) = (report.p, report.d);
    let mut out = String::new();
    let body = serde_json::to_string(&report.config.body).expect("body serializes");
    writeln!(out, "{BODY_PREFIX}{body}").unwrap();
    let mut header = vec!["kind", "p", "d", "perimeter", "kkt_residual", "members"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    for i in 1..=p {
        for j in 1..=d {
            header.push(format!("x{i}_{j}"));
        }
    }
    writeln!(out, "{}", header.join("\t")).unwrap();

    let rows = report
        .classes
        .iter()
        .map(|c| ("class", c.perimeter, c.kkt_residual, c.members, &c.vertices))
        .chain(report.continuum.iter().map(|f| {
            (
                "continuum",
                f.perimeter,
                f.kkt_residual,
                f.members,
                &f.vertices,
            )
        }));
    for (kind, perimeter, kkt, members, vertices) in rows {
        let mut fields = vec![
            kind.to_string(),
            p.to_string(),
            d.to_string(),
            format!("{perimeter:?}"),
            format!("{kkt:?}"),
            members.to_string(),
        ];
        fields.extend(vertices.iter().flatten().map(|x| format!("{x:?}")));
        writeln!(out, "{}", fields.join("\t")).unwrap();
    }
    out
}

pub fn export_trajectories(report: &RunReport, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, render_export(report))
        .map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("export line {line}: {msg}"))
}

/// Reads back the body descriptor and records of an export.
pub fn parse_export(text: &str) -> Result<(BodySpec, Vec<ExportRecord>), CliError> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let json = first
        .strip_prefix(BODY_PREFIX)
        .ok_or_else(|| bad(1, "missing body header"))?;
    let body: BodySpec = serde_json::from_str(json).map_err(|e| bad(1, e))?;
    lines
        .next()
        .ok_or_else(|| bad(2, "missing column header"))?;

    let mut records = Vec::new();
    for (idx, line) in lines {
        let n = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 6 {
            return Err(bad(n, "too few columns"));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(n, e));
        let float = |s: &str| s.parse::<f64>().map_err(|e| bad(n, e));
        let (p, d) = (int(fields[1])?, int(fields[2])?);
        if fields.len() != 6 + p * d {
            return Err(bad(n, format!("expected {} columns", 6 + p * d)));
        }
        let coords = fields[6..]
            .iter()
            .map(|s| float(s))
            .collect::<Result<Vec<_>, _>>()?;
        records.push(ExportRecord {
            kind: fields[0].to_string(),
            perimeter: float(fields[3])?,
            kkt_residual: float(fields[4])?,
            members: int(fields[5])?,
            vertices: coords.chunks(d).map(|c| c.to_vec()).collect(),
        });
    }
    Ok((body, records))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub closure: Vec<f64>,
    pub passed: bool,
}

/// Re-shoots every exported record on the described body.
pub fn verify_export(path: &Path) -> Result<VerifyOutcome, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let (spec, records) = parse_export(&text)?;
    let body: BodyModel = spec.build()?;
    let closure: Vec<f64> = records
        .iter()
        .map(|r| record_closure(&body, &r.vertices))
        .collect();
    let passed = closure.iter().all(|&c| c <= CLOSURE_TOL);
    Ok(VerifyOutcome { closure, passed })
}
