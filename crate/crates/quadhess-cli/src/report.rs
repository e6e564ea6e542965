//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

use quadhess::identity::{VerificationReport, VerifyOutcome};
use quadhess::quadric::BranchSign;

use crate::io::{render_point, RenderScalar};

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub mode: String,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    /// `verified`, `failed` or `skipped`.
    pub status: String,
    pub mode: String,
    pub branch: String,
    pub point: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<CheckpointJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CheckpointJson {
    pub label: String,
    pub value: serde_json::Value,
}

#[derive(Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub verified: usize,
    pub skipped: usize,
    pub failed: usize,
}

pub fn summarize(records: &[Record]) -> Summary {
    let mut summary = Summary::default();
    for r in records {
        match r.status.as_str() {
            "verified" => summary.verified += 1,
            "skipped" => summary.skipped += 1,
            _ => summary.failed += 1,
        }
    }
    summary
}

fn branch_name(branch: BranchSign) -> String {
    branch.to_string()
}

pub fn record_from_report<S: RenderScalar>(index: usize, r: &VerificationReport<S>) -> Record {
    Record {
        index,
        status: if r.passed { "verified" } else { "failed" }.into(),
        mode: r.mode.to_string(),
        branch: branch_name(r.branch),
        point: render_point(&r.point),
        lhs: Some(r.lhs.to_json()),
        rhs: Some(r.rhs.to_json()),
        discrepancy: Some(r.discrepancy.to_json()),
        reason: None,
        checkpoints: r
            .checkpoints
            .iter()
            .map(|c| CheckpointJson {
                label: c.label.to_string(),
                value: c.value.to_json(),
            })
            .collect(),
    }
}

pub fn record_from_outcome<S: RenderScalar>(
    index: usize,
    mode_name: &str,
    outcome: &VerifyOutcome<S>,
) -> Record {
    match outcome {
        VerifyOutcome::Report(r) => record_from_report(index, r),
        VerifyOutcome::Skipped { point, branch, reason } => Record {
            index,
            status: "skipped".into(),
            mode: mode_name.into(),
            branch: branch_name(*branch),
            point: render_point(point),
            lhs: None,
            rhs: None,
            discrepancy: None,
            reason: Some(reason.to_string()),
            checkpoints: Vec::new(),
        },
    }
}

pub fn write_report(path: &std::path::Path, report: &ReportFile) -> Result<(), crate::CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| crate::CliError::Parse(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| crate::CliError::Parse(format!("cannot write {}: {e}", path.display())))
}
