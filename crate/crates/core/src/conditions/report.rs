//! Report serialization: JSON, CSV and one line per identity as text.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use super::{ConditionReport, JET_ORDER};
use crate::error::{GeomError, Result};

/// Current JSON schema version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            other => Err(GeomError::Validation(vec![format!(
                "unknown format {other:?}; expected json, csv or text"
            )])),
        }
    }
}

/// Conventions needed to reproduce the numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conventions {
    pub inner_product: &'static str,
    pub two_forms: &'static str,
    pub curvature: &'static str,
    pub laplacian: &'static str,
    pub orientation: &'static str,
    pub frame_seed: [f64; 4],
    pub jet_order: usize,
    pub residual_scale: &'static str,
}

impl Conventions {
    pub fn current() -> Self {
        Conventions {
            inner_product: "<A,B> = 1/4 tr(A* B), A* = g^-1 A^T g",
            two_forms: "Omega_A(X,Y) = g(AX,Y)",
            curvature: "R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]; R(A) = sum_k R(A X_k, X^k)",
            laplacian: crate::curvature::LAPLACIAN_CONVENTION,
            orientation: "Omega_J wedge Omega_J is positive; (J, I, K) with K = IJ",
            frame_seed: super::FrameSeed::default().seed,
            jet_order: JET_ORDER,
            residual_scale:
                "max(largest term, c^p, 1e-14), c = max(|R|, |nabla J|^2, 1e-6 (|g^-1| |d2 g| + (|g^-1| |dg|)^2))",
        }
    }
}

/// JSON envelope shared by every command.
pub fn envelope(command: &str, payload: Value) -> Value {
    let mut v = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, payload) {
        dst.extend(src);
    }
    v
}

pub fn report_value(report: &ConditionReport) -> Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    if let Value::Object(m) = &mut v {
        m.insert("passed".into(), Value::Bool(report.passed()));
    }
    v
}

pub fn write_json(out: &mut dyn Write, command: &str, report: &ConditionReport) -> Result<()> {
    let v = envelope(command, report_value(report));
    let s = serde_json::to_string_pretty(&v).map_err(|e| GeomError::Io(e.to_string()))?;
    writeln!(out, "{s}").map_err(|e| GeomError::Io(e.to_string()))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6e}")).unwrap_or_default()
}

/// One row per identity × manifold.
pub fn write_csv(out: &mut dyn Write, reports: &[&ConditionReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| GeomError::Io(e.to_string());
    w.write_record([
        "manifold",
        "id",
        "kind",
        "applicability",
        "applicable_points",
        "max_rel_residual",
        "mean_rel_residual",
        "min_signed",
        "verdict",
    ])
    .map_err(io)?;
    for r in reports {
        for i in &r.identities {
            let kind = serde_json::to_value(i.kind)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            w.write_record([
                r.manifold.as_str(),
                i.id.as_str(),
                kind.as_str(),
                i.applicability.as_str(),
                &i.applicable_points.to_string(),
                &opt(i.max_rel_residual),
                &opt(i.mean_rel_residual),
                &opt(i.min_signed),
                i.verdict.as_str(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| GeomError::Io(e.to_string()))
}

/// One line per identity: id, quoted relation, max residual, verdict.
pub fn write_text(out: &mut dyn Write, report: &ConditionReport) -> Result<()> {
    let io = |e: std::io::Error| GeomError::Io(e.to_string());
    writeln!(
        out,
        "{}: {} points, seed {}, {} frame(s) per point, pass {:e}, fail {:e}",
        report.manifold,
        report.settings.points,
        report.settings.seed,
        report.settings.rotations,
        report.settings.tolerances.pass,
        report.settings.tolerances.fail
    )
    .map_err(io)?;
    for i in &report.identities {
        let r = i
            .max_rel_residual
            .map(|x| format!("{x:.3e}"))
            .unwrap_or_else(|| "-".into());
        writeln!(out, "{:<6} {:>10}  {:<40}  \"{}\"", i.id, r, i.verdict, i.anchor).map_err(io)?;
    }
    for t in &report.tags {
        if t.claimed {
            let mark = if t.confirmed { "confirmed" } else { "NOT confirmed" };
            writeln!(out, "tag {:<17} {:>10.3e}  {}", t.tag, t.residual, mark).map_err(io)?;
        }
    }
    writeln!(out, "classification: {}", report.classification.verdict).map_err(io)?;
    writeln!(out, "W+ support fraction: {:.3}", report.wplus_support_fraction).map_err(io)?;
    for e in &report.errors {
        writeln!(out, "error at {:?}: {}", e.point, e.message).map_err(io)?;
    }
    writeln!(out, "result: {}", if report.passed() { "pass" } else { "fail" }).map_err(io)
}
