//! Report documents emitted by the command-line front end.
//!
//! Field names mirror the core types. Point sets are rendered as labels;
//! witnesses keep their point indices, with `labels` alongside to decode them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use triperim_core::classifier::ClassificationReport;
use triperim_core::gallery::ClaimReport;
use triperim_core::metric::MetricValidationReport;
use triperim_core::solver::ChainVerdict;
use triperim_core::{FixedPointResult, ModulusReport, StrictVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Validate(ValidateReport),
    Classify(ClassifyReport),
    Solve(SolveReport),
    Gallery(GalleryReport),
    Error(ErrorReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub labels: Vec<String>,
    pub validation: MetricValidationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub labels: Vec<String>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub banach: ModulusReport,
    pub perimeter: ModulusReport,
    pub fg: Option<ModulusReport>,
    pub edelstein_contractive: StrictVerdict,
    pub edelstein_perimeter: StrictVerdict,
    pub period2_points: Vec<String>,
    pub fixed_points: Vec<String>,
    pub contractive_points: Vec<String>,
}

impl ClassifyReport {
    pub fn new(
        labels: &[String],
        fg_names: Option<(String, String)>,
        r: ClassificationReport,
    ) -> Self {
        let names = |idx: &[usize]| idx.iter().map(|&i| labels[i].clone()).collect();
        let (f, g) = fg_names.unzip();
        ClassifyReport {
            labels: labels.to_vec(),
            f,
            g,
            period2_points: names(&r.period2_points),
            fixed_points: names(&r.fixed_points),
            contractive_points: names(&r.contractive_points),
            banach: r.banach,
            perimeter: r.perimeter,
            fg: r.fg,
            edelstein_contractive: r.edelstein_contractive,
            edelstein_perimeter: r.edelstein_perimeter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub labels: Vec<String>,
    pub start: String,
    pub tol: f64,
    pub orbit: Vec<String>,
    pub fixed_point: Option<String>,
    /// Perimeter chain along the orbit; only checked when `alpha < 1`.
    pub chain: Option<ChainVerdict>,
    pub result: FixedPointResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryReport {
    pub name: String,
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub claims: ClaimReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// The input could not be read or does not match the schema.
    Input,
    /// The input is well formed but violates a mathematical requirement.
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub kind: ErrorKind,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<MetricValidationReport>,
}

impl Report {
    pub fn input_error(message: impl Into<String>) -> Self {
        Report::Error(ErrorReport {
            kind: ErrorKind::Input,
            message: message.into(),
            labels: Vec::new(),
            validation: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Validate(r) => write_validate(&mut out, r),
            Report::Classify(r) => write_classify(&mut out, r),
            Report::Solve(r) => write_solve(&mut out, r),
            Report::Gallery(r) => write_gallery(&mut out, r),
            Report::Error(r) => {
                let _ = writeln!(out, "error: {}", r.message);
                if let Some(v) = &r.validation {
                    write_violations(&mut out, v, &r.labels);
                }
            }
        }
        out
    }
}

fn names(labels: &[String], idx: &[usize]) -> String {
    let v: Vec<&str> = idx.iter().map(|&i| labels[i].as_str()).collect();
    format!("({})", v.join(", "))
}

fn write_violations(out: &mut String, v: &MetricValidationReport, labels: &[String]) {
    for x in &v.violations {
        let w =
            if labels.is_empty() { format!("{:?}", x.witness) } else { names(labels, &x.witness) };
        let _ = writeln!(out, "  {:?} violated at {w}, slack {:e}", x.axiom, x.slack);
    }
}

fn write_validate(out: &mut String, r: &ValidateReport) {
    let v = &r.validation;
    let status = if v.ok { "metric" } else { "NOT a metric" };
    let _ = writeln!(out, "{} points: {status} (tolerance {:e})", r.labels.len(), v.tolerance);
    write_violations(out, v, &r.labels);
}

fn write_modulus(out: &mut String, name: &str, labels: &[String], m: &ModulusReport) {
    let _ = writeln!(
        out,
        "{name:<22} {:<22} witness {} over {} tuples",
        m.modulus,
        names(labels, &m.witness),
        m.evaluated_count
    );
}

fn write_strict(out: &mut String, name: &str, labels: &[String], v: &StrictVerdict) {
    let flag = if v.holds { "yes" } else { "no" };
    let marginal = if v.marginal { " (marginal)" } else { "" };
    let _ = writeln!(
        out,
        "{name:<22} {flag:<22} witness {} slack {}{marginal}",
        names(labels, &v.witness),
        v.witness_slack
    );
}

fn write_classify(out: &mut String, r: &ClassifyReport) {
    let l = &r.labels;
    write_modulus(out, "banach modulus", l, &r.banach);
    write_modulus(out, "perimeter modulus", l, &r.perimeter);
    if let (Some(m), Some(f), Some(g)) = (&r.fg, &r.f, &r.g) {
        write_modulus(out, &format!("({f}, {g}) modulus"), l, m);
    }
    write_strict(out, "edelstein contractive", l, &r.edelstein_contractive);
    write_strict(out, "edelstein perimeter", l, &r.edelstein_perimeter);
    let _ = writeln!(out, "{:<22} {:?}", "fixed points", r.fixed_points);
    let _ = writeln!(out, "{:<22} {:?}", "period-2 points", r.period2_points);
    let _ = writeln!(out, "{:<22} {:?}", "contractive points", r.contractive_points);
}

fn write_solve(out: &mut String, r: &SolveReport) {
    let res = &r.result;
    let _ = writeln!(out, "start {} -> {:?} after {} steps", r.start, res.status, res.steps);
    let _ = writeln!(out, "orbit: {}", r.orbit.join(" -> "));
    if let Some(x) = &r.fixed_point {
        let _ = writeln!(out, "fixed point: {x}");
    }
    let _ = writeln!(out, "perimeter modulus alpha = {}", res.alpha);
    if let Some(b) = res.certified_bounds.last() {
        let _ = writeln!(out, "a priori bound at step {}: {:e}", b.step, b.bound);
    }
    if let Some(c) = &r.chain {
        let status = if c.holds { "holds" } else { "FAILS" };
        let _ = writeln!(out, "perimeter chain {status} on {} windows", c.windows_checked);
    }
}

fn write_gallery(out: &mut String, r: &GalleryReport) {
    let c = &r.claims;
    let _ = writeln!(out, "example {}", c.example);
    for claim in &c.claims {
        let status = if claim.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "  [{status}] {}: {}", claim.name, claim.detail);
        if !claim.witness.is_empty() {
            let _ = writeln!(out, "         witness ({})", claim.witness.join(", "));
        }
    }
    if !c.excluded_points.is_empty() {
        let _ = writeln!(
            out,
            "  excluded points {:?} ({} triples)",
            c.excluded_points, c.excluded_triples
        );
    }
}
