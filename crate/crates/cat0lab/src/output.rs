//! Report and data-file writers: JSON summaries and plot-ready CSV.
//! Identical inputs and seeds produce byte-identical output.

use std::io::Write;

use serde::Serialize;

use cat0lab_core::{BoundCheckRecord, IterationTrace, ViolationReport, Witness};

use crate::config::OrderDto;
use crate::dto::PointDto;
use crate::spaces::SpaceHandle;

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessDto {
    pub label: String,
    pub points: Vec<PointDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl WitnessDto {
    pub fn from_witness(handle: &SpaceHandle, w: &Witness) -> Self {
        WitnessDto {
            label: w.label.clone(),
            points: w
                .points
                .iter()
                .map(|p| PointDto::from_point(handle, p))
                .collect(),
            t: w.t,
        }
    }
}

/// One audit report document.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReportDto {
    pub check: String,
    pub space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<OrderDto>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inconclusive: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimated_delta: Option<f64>,
    pub config_digest: String,
}

impl AuditReportDto {
    pub fn from_report(
        handle: &SpaceHandle,
        report: &ViolationReport,
        p: Option<OrderDto>,
        seed: u64,
        tol: f64,
        digest: &str,
    ) -> Self {
        AuditReportDto {
            check: report.check.clone(),
            space: handle.name.clone(),
            p,
            samples: report.checked,
            seed,
            tol,
            worst_residual: finite(report.worst_residual),
            max_residual: finite(report.max_residual),
            passed: report.passed,
            witness: report
                .witness
                .as_ref()
                .map(|w| WitnessDto::from_witness(handle, w)),
            inconclusive: None,
            epsilon: None,
            radius: None,
            estimated_delta: None,
            config_digest: digest.to_string(),
        }
    }
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn point_cell(handle: &SpaceHandle, p: &cat0lab_core::Point) -> String {
    serde_json::to_string(&PointDto::from_point(handle, p)).expect("points serialize")
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Bound-check records: `lhs, rhs, residual, n, t`, then the four input
/// payloads as JSON strings. `with_dist` prepends the blended distance
/// column used by decay traces.
pub fn write_bounds_csv<W: Write>(
    mut w: W,
    handle: &SpaceHandle,
    records: &[BoundCheckRecord],
    with_dist: bool,
) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(&mut w);
    let base = ["lhs", "rhs", "residual", "n", "t", "p", "q", "x", "y"];
    if with_dist {
        csv.write_record(std::iter::once("dist").chain(base))?;
    } else {
        csv.write_record(base)?;
    }
    for rec in records {
        let mut row: Vec<String> = Vec::with_capacity(10);
        if with_dist {
            row.push(num(rec.lhs.max(0.0).sqrt()));
        }
        row.push(num(rec.lhs));
        row.push(num(rec.rhs));
        row.push(num(rec.residual));
        row.push(rec.n.to_string());
        row.push(num(rec.t));
        for p in &rec.inputs {
            row.push(point_cell(handle, p));
        }
        csv.write_record(&row)?;
    }
    csv.flush()
}

/// Trace rows: `n, t_n, point, step_dist, theta, rho, step_bound_residual,
/// monotone_residual`. Undefined certificates leave empty cells.
pub fn write_trace_csv<W: Write>(
    mut w: W,
    handle: &SpaceHandle,
    trace: &IterationTrace,
) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(&mut w);
    csv.write_record([
        "n",
        "t_n",
        "point",
        "step_dist",
        "theta",
        "rho",
        "step_bound_residual",
        "monotone_residual",
    ])?;
    let sd = &trace.step_dists;
    for (n, point) in trace.points.iter().enumerate() {
        let step_bound = trace
            .rhos
            .get(n + 1)
            .copied()
            .flatten()
            .and_then(|rho| {
                (n + 2 < sd.len()).then(|| {
                    rho * (sd[n + 1] * sd[n + 1]).max(sd[n] * sd[n]) - sd[n + 2] * sd[n + 2]
                })
            });
        let monotone = (n + 2 < sd.len()).then(|| sd[n] - sd[n + 2]);
        csv.write_record([
            n.to_string(),
            trace.ts.get(n).copied().map(num).unwrap_or_default(),
            point_cell(handle, point),
            sd.get(n).copied().map(num).unwrap_or_default(),
            opt_num(trace.thetas.get(n).copied().flatten()),
            opt_num(trace.rhos.get(n).copied().flatten()),
            opt_num(step_bound),
            opt_num(monotone),
        ])?;
    }
    csv.flush()
}
