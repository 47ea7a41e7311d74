//! Verification reports: per-sample residual rows, a verdict, and writers for
//! the JSON-lines stream and the aggregate CSV.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub sample: usize,
    pub point: Vec<f64>,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Residuals of one identity over one sample set.
/// Which side of the tolerance a residual must fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// `residual ≤ tolerance`.
    AtMost,
    /// `residual ≥ tolerance`, used for margins that must stay away from zero.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub identity: String,
    pub fixture: String,
    pub tolerance: f64,
    pub bound: Bound,
    pub rows: Vec<ReportRow>,
    pub metadata: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new(identity: impl Into<String>, fixture: impl Into<String>, tolerance: f64) -> Self {
        VerificationReport {
            identity: identity.into(),
            fixture: fixture.into(),
            tolerance,
            bound: Bound::AtMost,
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    /// A report whose rows must reach at least `threshold`.
    pub fn at_least(identity: impl Into<String>, fixture: impl Into<String>, threshold: f64) -> Self {
        VerificationReport {
            bound: Bound::AtLeast,
            ..VerificationReport::new(identity, fixture, threshold)
        }
    }

    pub fn set_meta(&mut self, key: &str, value: &str) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn push(&mut self, point: &[f64], residual: f64) {
        let sample = self.rows.len();
        self.rows.push(ReportRow {
            sample,
            point: point.to_vec(),
            residual,
            error: None,
        });
    }

    pub fn push_error(&mut self, point: &[f64], err: &Error) {
        let sample = self.rows.len();
        self.rows.push(ReportRow {
            sample,
            point: point.to_vec(),
            residual: f64::NAN,
            error: Some(err.to_string()),
        });
    }

    pub fn push_result(&mut self, point: &[f64], r: Result<f64>) {
        match r {
            Ok(v) => self.push(point, v),
            Err(e) => self.push_error(point, &e),
        }
    }

    /// Appends the rows of another report on the same identity.
    pub fn merge(&mut self, other: VerificationReport) {
        for mut row in other.rows {
            row.sample = self.rows.len();
            self.rows.push(row);
        }
    }

    pub fn n_samples(&self) -> usize {
        self.rows.len()
    }

    /// Largest residual; NaN if any sample failed to evaluate or there are
    /// no samples.
    pub fn max_residual(&self) -> f64 {
        if self.rows.is_empty() {
            return f64::NAN;
        }
        self.rows.iter().fold(f64::NEG_INFINITY, |m, r| {
            if r.residual.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(r.residual)
            }
        })
    }

    /// Smallest residual; NaN if any sample failed to evaluate or there are
    /// no samples.
    pub fn min_residual(&self) -> f64 {
        if self.rows.is_empty() {
            return f64::NAN;
        }
        self.rows.iter().fold(f64::INFINITY, |m, r| {
            if r.residual.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.min(r.residual)
            }
        })
    }

    /// The residual that decides the verdict: the max for upper bounds, the
    /// min for lower bounds.
    pub fn worst_residual(&self) -> f64 {
        match self.bound {
            Bound::AtMost => self.max_residual(),
            Bound::AtLeast => self.min_residual(),
        }
    }

    pub fn row_passes(&self, row: &ReportRow) -> bool {
        row.error.is_none()
            && match self.bound {
                Bound::AtMost => row.residual <= self.tolerance,
                Bound::AtLeast => row.residual >= self.tolerance,
            }
    }

    /// Pass iff there is at least one sample and every row passes.
    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| self.row_passes(r))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !self.row_passes(r))
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    suite: &'a str,
    fixture: &'a str,
    identity: &'a str,
    sample: usize,
    point: &'a [f64],
    residual: Option<f64>,
    tolerance: f64,
    bound: Bound,
    verdict: &'static str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub identity: String,
    pub fixture: String,
    pub n_samples: usize,
    pub worst_residual: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub pass: bool,
}

impl From<&VerificationReport> for AggregateRow {
    fn from(r: &VerificationReport) -> Self {
        AggregateRow {
            identity: r.identity.clone(),
            fixture: r.fixture.clone(),
            n_samples: r.n_samples(),
            worst_residual: r.worst_residual(),
            bound: r.bound,
            tolerance: r.tolerance,
            pass: r.passed(),
        }
    }
}

/// Serialises reports as one JSON object per sample row.
pub fn write_jsonl<W: Write>(out: &mut W, suite: &str, seed: u64, report: &VerificationReport) -> Result<()> {
    for row in &report.rows {
        let json = JsonRow {
            suite,
            fixture: &report.fixture,
            identity: &report.identity,
            sample: row.sample,
            point: &row.point,
            residual: row.residual.is_finite().then_some(row.residual),
            tolerance: report.tolerance,
            bound: report.bound,
            verdict: if report.row_passes(row) { "pass" } else { "fail" },
            seed,
            error: row.error.as_deref(),
        };
        serde_json::to_writer(&mut *out, &json).map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Aggregate CSV: identity, fixture, n_samples, worst_residual, bound,
/// tolerance, pass.
pub fn write_aggregate_csv<W: Write>(out: W, reports: &[VerificationReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(AggregateRow::from(r))
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<dir>/report.jsonl` and `<dir>/summary.csv`.
pub fn write_report_files(dir: &Path, suite: &str, seed: u64, reports: &[VerificationReport]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut jsonl = BufWriter::new(File::create(dir.join("report.jsonl"))?);
    for r in reports {
        write_jsonl(&mut jsonl, suite, seed, r)?;
    }
    jsonl.flush()?;
    write_aggregate_csv(File::create(dir.join("summary.csv"))?, reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_max_residual() {
        let mut r = VerificationReport::new("id", "fx", 1e-3);
        assert!(!r.passed());
        r.push(&[0.0], 1e-4);
        assert!(r.passed());
        r.push(&[1.0], 2e-3);
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn error_rows_fail() {
        let mut r = VerificationReport::new("id", "fx", 1.0);
        r.push(&[0.0], 0.0);
        r.push_error(&[1.0], &Error::SingularMetric { point: vec![1.0] });
        assert!(r.max_residual().is_nan());
        assert!(!r.passed());
    }

    #[test]
    fn lower_bound_reports() {
        let mut r = VerificationReport::at_least("margin", "fx", 0.01);
        r.push(&[0.0], 0.5);
        r.push(&[1.0], 0.02);
        assert!(r.passed());
        assert_eq!(r.worst_residual(), 0.02);
        r.push(&[2.0], 0.001);
        assert!(!r.passed());
    }

    #[test]
    fn negative_residuals_keep_their_sign() {
        let mut r = VerificationReport::new("sign", "fx", 0.0);
        r.push(&[0.0], -0.5);
        r.push(&[1.0], -0.25);
        assert_eq!(r.max_residual(), -0.25);
        assert!(r.passed());
        assert!(VerificationReport::new("empty", "fx", 1.0).max_residual().is_nan());
    }

    #[test]
    fn jsonl_and_csv_shapes() {
        let mut r = VerificationReport::new("partial-fraction", "n=3", 1e-10);
        r.push(&[1.0, 2.0], 0.0);
        let mut buf = Vec::new();
        write_jsonl(&mut buf, "sympoly-identities", 7, &r).unwrap();
        let line = String::from_utf8(buf).unwrap();
        let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(v["seed"], 7);
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["suite"], "sympoly-identities");

        let mut csv_buf = Vec::new();
        write_aggregate_csv(&mut csv_buf, &[r]).unwrap();
        let text = String::from_utf8(csv_buf).unwrap();
        assert!(text.starts_with("identity,fixture,n_samples,worst_residual,bound,tolerance,pass"));
    }
}
