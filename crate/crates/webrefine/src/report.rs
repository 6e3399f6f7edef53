//! Stage accounting and its rendering as a table or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use webrefine_core::stats::{kept_rates, StatsError};
use webrefine_core::{RejectReason, StageStats};

use crate::candidates::SkipCounts;

/// Name of the tokenizer behind token counts, shown in reports.
pub const TOKENIZER: &str = "whitespace words after dedup normalization";

/// One stage's counts, with its removals broken down.
///
/// `docs_in - docs_out` equals the sum of `rejected` plus `malformed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    #[serde(flatten)]
    pub stats: StageStats,
    #[serde(default)]
    pub rejected: BTreeMap<RejectReason, u64>,
    /// Documents removed because they could not be processed at all.
    #[serde(default)]
    pub malformed: u64,
}

impl StageReport {
    pub fn new(stage: &str) -> Self {
        Self { stats: StageStats::new(stage), rejected: BTreeMap::new(), malformed: 0 }
    }

    pub fn rejected_total(&self) -> u64 {
        self.rejected.values().sum()
    }

    pub fn balanced(&self) -> bool {
        self.stats.docs_in >= self.stats.docs_out
            && self.stats.docs_in - self.stats.docs_out == self.rejected_total() + self.malformed
    }
}

/// A problem tied to one document or input position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub stage: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub message: String,
}

/// What was read from the archives before any stage ran.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub files: u64,
    pub warc_records: u64,
    /// Records that were not HTML responses.
    pub skipped: SkipCounts,
    /// HTML responses across all parts.
    pub candidates: u64,
    /// Records that could not be parsed; each ends its file.
    pub unreadable: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub part: usize,
    pub parts: usize,
    pub tokenizer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<IngestSummary>,
    pub stages: Vec<StageReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub issues: Vec<Issue>,
}

impl Report {
    pub fn new(part: usize, parts: usize) -> Self {
        Self { part, parts, tokenizer: TOKENIZER.into(), input: None, stages: Vec::new(), issues: Vec::new() }
    }

    pub fn ingested(&self) -> u64 {
        self.stages.first().map_or(0, |s| s.stats.docs_in)
    }

    pub fn survivors(&self) -> u64 {
        self.stages.last().map_or(0, |s| s.stats.docs_out)
    }

    pub fn rejected(&self) -> u64 {
        self.stages.iter().map(StageReport::rejected_total).sum()
    }

    pub fn malformed(&self) -> u64 {
        self.stages.iter().map(|s| s.malformed).sum()
    }

    pub fn rejections_by_reason(&self) -> BTreeMap<RejectReason, u64> {
        let mut out = BTreeMap::new();
        for s in &self.stages {
            for (r, n) in &s.rejected {
                *out.entry(*r).or_insert(0) += n;
            }
        }
        out
    }

    /// Survivors plus rejections plus malformed equals what came in, and
    /// every stage balances on its own.
    pub fn accounting_balanced(&self) -> bool {
        self.stages.iter().all(StageReport::balanced)
            && self.survivors() + self.rejected() + self.malformed() == self.ingested()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Documents,
    Tokens,
}

/// Kept rates of one stage. `step` and `cumulative` are in `unit`: stages
/// that count tokens switch the headline to tokens, carrying the
/// document-based cumulative rate over from before.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub stage: String,
    pub unit: Unit,
    pub step: f64,
    pub cumulative: f64,
    pub step_docs: f64,
    pub cumulative_docs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_tokens: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("stage statistics do not chain: {0}")]
    ChainBroken(StatsError),
    #[error("report JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn rates(stages: &[StageReport]) -> Result<Vec<RateRow>, ReportError> {
    let stats: Vec<StageStats> = stages.iter().map(|s| s.stats.clone()).collect();
    let docs = kept_rates(&stats).map_err(ReportError::ChainBroken)?;
    let mut cumulative = 1.0;
    Ok(stages
        .iter()
        .zip(docs)
        .map(|(s, d)| {
            let step_tokens = match (s.stats.tokens_in, s.stats.tokens_out) {
                (Some(i), Some(o)) if i > 0 => Some(o as f64 / i as f64),
                (Some(0), Some(0)) => Some(0.0),
                _ => None,
            };
            let (unit, step) = match step_tokens {
                Some(t) => (Unit::Tokens, t),
                None => (Unit::Documents, d.step.value()),
            };
            cumulative *= step;
            RateRow {
                stage: s.stats.stage.clone(),
                unit,
                step,
                cumulative,
                step_docs: d.step.value(),
                cumulative_docs: d.cumulative.value(),
                step_tokens,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Human,
    Json,
}

/// A report with its rates, as written in the JSON format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedReport {
    #[serde(flatten)]
    pub report: Report,
    pub rates: Vec<RateRow>,
}

/// Parses JSON written by [`emit_report`]; the `rates` field may be absent.
pub fn parse_report(json: &str) -> Result<Report, ReportError> {
    Ok(serde_json::from_str(json)?)
}

pub fn parse_rendered(json: &str) -> Result<RenderedReport, ReportError> {
    Ok(serde_json::from_str(json)?)
}

/// Four significant digits.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (3 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn pct(x: f64) -> String {
    format!("{}%", sig4(x * 100.0))
}

pub fn emit_report(report: &Report, format: ReportFormat) -> Result<String, ReportError> {
    let rows = rates(&report.stages)?;
    match format {
        ReportFormat::Json => {
            let rendered = RenderedReport { report: report.clone(), rates: rows };
            let mut s = serde_json::to_string_pretty(&rendered)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Human => Ok(human(report, &rows)),
    }
}

fn human(report: &Report, rows: &[RateRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "part {} of {}; tokens are {}", report.part, report.parts, report.tokenizer);
    if let Some(i) = &report.input {
        let _ = writeln!(
            out,
            "input: {} files, {} WARC records, {} HTML responses, {} skipped, {} unreadable",
            i.files,
            i.warc_records,
            i.candidates,
            i.skipped.total(),
            i.unreadable
        );
    }
    let _ = writeln!(
        out,
        "{:<18} {:>10} {:>10} {:>10} {:>10} {:>9} {:>10} {:>11}",
        "stage", "in", "out", "removed", "malformed", "unit", "step kept", "cumulative"
    );
    for (s, r) in report.stages.iter().zip(rows) {
        let (din, dout) = match (r.unit, s.stats.tokens_in, s.stats.tokens_out) {
            (Unit::Tokens, Some(i), Some(o)) => (i, o),
            _ => (s.stats.docs_in, s.stats.docs_out),
        };
        let unit = match r.unit {
            Unit::Documents => "docs",
            Unit::Tokens => "tokens",
        };
        let _ = writeln!(
            out,
            "{:<18} {:>10} {:>10} {:>10} {:>10} {:>9} {:>10} {:>11}",
            s.stats.stage,
            din,
            dout,
            s.rejected_total(),
            s.malformed,
            unit,
            pct(r.step),
            pct(r.cumulative)
        );
    }
    let _ = writeln!(
        out,
        "documents: {} in, {} kept ({}), {} rejected, {} malformed",
        report.ingested(),
        report.survivors(),
        pct(rows.last().map_or(0.0, |r| r.cumulative_docs)),
        report.rejected(),
        report.malformed()
    );
    for (reason, n) in report.rejections_by_reason() {
        let _ = writeln!(out, "  {reason:<24} {n}");
    }
    if !report.issues.is_empty() {
        let _ = writeln!(out, "issues: {}", report.issues.len());
    }
    out
}
