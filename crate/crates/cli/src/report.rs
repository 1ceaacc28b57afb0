//! Report serialization: the JSON record array, CSV radial profiles, and the
//! stdout table. Field order in the JSON is part of the output contract, so
//! records go through a serialization mirror rather than ad-hoc maps.

use curvlab_core::{InequalityReport, RadialProfile};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Serialize)]
struct JsonRecord<'a> {
    name: &'a str,
    lhs: f64,
    rhs: f64,
    slack: f64,
    rel_slack: f64,
    tolerance: f64,
    verdict: &'a str,
    grid: &'a [usize],
    params: &'a BTreeMap<String, f64>,
    refinement_estimate: f64,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    records: Vec<JsonRecord<'a>>,
}

pub fn to_json(reports: &[&InequalityReport]) -> String {
    let doc = JsonDocument {
        records: reports
            .iter()
            .map(|r| JsonRecord {
                name: &r.name,
                lhs: r.lhs,
                rhs: r.rhs,
                slack: r.slack,
                rel_slack: r.rel_slack,
                tolerance: r.tolerance,
                verdict: r.verdict.as_str(),
                grid: &r.grid,
                params: &r.params,
                refinement_estimate: r.refinement_estimate,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    text
}

pub fn profile_csv(p: &RadialProfile) -> String {
    let mut out = String::from("r,value,refinement_estimate\n");
    for k in 0..p.radii.len() {
        let _ = writeln!(out, "{},{},{}", p.radii[k], p.values[k], p.refinement[k]);
    }
    out
}

pub fn table_line(r: &InequalityReport) -> String {
    format!(
        "{:<20} {:<32} lhs={:<16.9e} rhs={:<16.9e} slack={:+.3e} tol={:.3e}",
        r.verdict.as_str(),
        r.name,
        r.lhs,
        r.rhs,
        r.slack,
        r.tolerance
    )
}

/// File stem for per-check artifacts: anything outside [A-Za-z0-9._-]
/// becomes an underscore so names stay portable.
pub fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '_' || c == '-' { c } else { '_' })
        .collect()
}
