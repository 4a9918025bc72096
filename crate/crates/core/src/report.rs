//! Verification reports and their JSON / CSV serialisation.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::constants::HardyParams;
use crate::error::{HardyError, Result};
use crate::hardyfn::LemmaConfig;
use crate::quadrature::Estimate;

/// Multiple of the quadrature error allowed below zero.
pub const SLACK_ERROR_FACTOR: f64 = 10.0;

/// One inequality evaluation: `slack = lhs - rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub quad_error: f64,
    pub params: Option<HardyParams>,
    pub passed: bool,
}

impl SlackReport {
    pub fn new(case: String, lhs: Estimate, rhs: Estimate, params: Option<HardyParams>) -> Self {
        let slack = lhs.value - rhs.value;
        let quad_error = lhs.error + rhs.error;
        SlackReport {
            case,
            lhs: lhs.value,
            rhs: rhs.value,
            slack,
            quad_error,
            params,
            passed: slack >= -SLACK_ERROR_FACTOR * quad_error,
        }
    }
}

/// Result of a pointwise condition checked over an `s`-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub check: String,
    pub p: f64,
    pub k: usize,
    pub big_d: f64,
    pub b: f64,
    pub points: usize,
    /// grid point where `worst_value` occurs
    pub worst_s: f64,
    pub worst_value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl GridReport {
    pub(crate) fn new(
        check: &str,
        cfg: &LemmaConfig,
        worst_s: f64,
        worst_value: f64,
        tolerance: f64,
        passed: bool,
    ) -> Self {
        GridReport {
            check: check.to_string(),
            p: cfg.p,
            k: cfg.k,
            big_d: cfg.big_d,
            b: cfg.b,
            points: cfg.grid.len(),
            worst_s,
            worst_value,
            tolerance,
            passed,
        }
    }
}

#[derive(Debug, Serialize)]
struct SlackRow<'a> {
    case: &'a str,
    lhs: f64,
    rhs: f64,
    slack: f64,
    quad_error: f64,
    n: Option<usize>,
    p: Option<f64>,
    k: Option<usize>,
    big_d: Option<f64>,
    diam: Option<f64>,
    passed: bool,
}

/// Output encoding for report files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = HardyError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(HardyError::Unsupported(format!("format {other}"))),
        }
    }
}

/// Pretty JSON array, one object per item.
pub fn to_json<T: Serialize>(items: &[T]) -> Result<String> {
    serde_json::to_string_pretty(items).map_err(|e| HardyError::Io(e.to_string()))
}

/// One CSV row per slack report.
pub fn slack_reports_to_csv(reports: &[SlackReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        let hp = r.params.as_ref();
        w.serialize(SlackRow {
            case: &r.case,
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            quad_error: r.quad_error,
            n: hp.map(|h| h.n),
            p: hp.map(|h| h.p),
            k: hp.map(|h| h.k),
            big_d: hp.map(|h| h.big_d),
            diam: hp.map(|h| h.diam),
            passed: r.passed,
        })
        .map_err(|e| HardyError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HardyError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HardyError::Io(e.to_string()))
}

/// Flat records (no nested fields) to CSV.
pub fn records_to_csv<T: Serialize>(items: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for it in items {
        w.serialize(it).map_err(|e| HardyError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HardyError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HardyError::Io(e.to_string()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_and_pass_rule() {
        let r = SlackReport::new("x".into(), Estimate::new(1.0, 0.01), Estimate::new(1.05, 0.0), None);
        assert_eq!(r.slack, 1.0 - 1.05);
        assert!(r.passed);
        let r = SlackReport::new("x".into(), Estimate::new(1.0, 0.001), Estimate::new(1.05, 0.0), None);
        assert!(!r.passed);
    }

    #[test]
    fn csv_and_json() {
        let hp = HardyParams::new(2, 2.0, 0, 1.0, 2.0).unwrap();
        let r = SlackReport::new("disk".into(), Estimate::exact(3.0), Estimate::exact(1.0), Some(hp));
        let csv = slack_reports_to_csv(std::slice::from_ref(&r)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "case,lhs,rhs,slack,quad_error,n,p,k,big_d,diam,passed"
        );
        assert!(lines
            .next()
            .unwrap()
            .starts_with("disk,3.0,1.0,2.0,0.0,2,2.0,0,1.0,2.0,true"));
        let json = to_json(std::slice::from_ref(&r)).unwrap();
        let back: Vec<SlackReport> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0], r);
    }
}
