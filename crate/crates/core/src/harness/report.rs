use serde::Serialize;
use std::collections::BTreeMap;

use super::catalogue::IdentityId;

/// One parameter point; keys are the coordinate names used by the identity
/// (x, t, m, alpha, beta, row).
pub type Point = BTreeMap<String, f64>;

pub(crate) fn point_from(pairs: &[(&str, f64)]) -> Point {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Compact "k=v;k=v" rendering used by the CSV flattening and summaries.
pub fn format_point(point: &Point) -> String {
    point
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// One verification sample: an identity evaluated at a parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCase {
    pub identity: IdentityId,
    pub point: Point,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol_used: f64,
    pub pass: bool,
    pub diagnostics: String,
}

impl IdentityCase {
    /// Mixed absolute/relative pass criterion:
    /// abs_err <= tol * max(1, |rhs|). Sub-evaluation failures force fail.
    pub(crate) fn build(
        identity: IdentityId,
        point: Point,
        lhs: f64,
        rhs: f64,
        tol_used: f64,
        sub_converged: bool,
        diagnostics: String,
    ) -> Self {
        let abs_err = (lhs - rhs).abs();
        let denom = lhs.abs().max(rhs.abs());
        let rel_err = if abs_err == 0.0 {
            0.0
        } else {
            abs_err / denom
        };
        let pass = sub_converged && abs_err.is_finite() && abs_err <= tol_used * rhs.abs().max(1.0);
        Self {
            identity,
            point,
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol_used,
            pass,
            diagnostics,
        }
    }

    pub(crate) fn failed_eval(
        identity: IdentityId,
        point: Point,
        tol_used: f64,
        message: String,
    ) -> Self {
        Self {
            identity,
            point,
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tol_used,
            pass: false,
            diagnostics: format!("evaluation error: {message}"),
        }
    }
}

/// A grid point removed by a domain or cancellation guard, kept so coverage
/// stays auditable.
#[derive(Debug, Clone, Serialize)]
pub struct ExcludedPoint {
    pub identity: IdentityId,
    pub point: Point,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySummary {
    pub count: usize,
    pub passed: usize,
    pub max_rel_err: f64,
    pub worst_point: Point,
}

/// Aggregated verification run. The JSON rendering of this struct is the
/// canonical report schema (schema_version "1"); field names are stable.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub generated_for: Vec<IdentityId>,
    pub cases: Vec<IdentityCase>,
    pub summary: BTreeMap<String, IdentitySummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<ExcludedPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn empty() -> Self {
        Self {
            schema_version: "1".to_string(),
            generated_for: Vec::new(),
            cases: Vec::new(),
            summary: BTreeMap::new(),
            excluded: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub(crate) fn assemble(
        generated_for: Vec<IdentityId>,
        mut cases: Vec<IdentityCase>,
        mut excluded: Vec<ExcludedPoint>,
        mut notes: Vec<String>,
    ) -> Self {
        let sort_key = |id: IdentityId, p: &Point| {
            (
                id.index(),
                serde_json::to_string(p).unwrap_or_default(),
            )
        };
        cases.sort_by_key(|c| sort_key(c.identity, &c.point));
        excluded.sort_by_key(|e| sort_key(e.identity, &e.point));
        notes.sort();

        let mut summary: BTreeMap<String, IdentitySummary> = BTreeMap::new();
        for case in &cases {
            let entry = summary
                .entry(case.identity.to_string())
                .or_insert_with(|| IdentitySummary {
                    count: 0,
                    passed: 0,
                    max_rel_err: 0.0,
                    worst_point: case.point.clone(),
                });
            entry.count += 1;
            if case.pass {
                entry.passed += 1;
            }
            // NaN (failed evaluation) outranks every finite residual
            let worse = case.rel_err.is_nan() && !entry.max_rel_err.is_nan()
                || case.rel_err > entry.max_rel_err;
            if worse {
                entry.max_rel_err = case.rel_err;
                entry.worst_point = case.point.clone();
            }
        }

        Self {
            schema_version: "1".to_string(),
            generated_for,
            cases,
            summary,
            excluded,
            notes,
        }
    }
}

/// Output encodings for [`render_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            other => Err(format!("unknown format '{other}' (expected json, csv or markdown)")),
        }
    }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Render a report; json is the canonical schema, csv flattens cases,
/// markdown renders the per-identity summary tables.
pub fn render_report(report: &VerificationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string(report).expect("report serializes"),
        ReportFormat::Csv => {
            let mut out = String::from(
                "identity,point,lhs,rhs,abs_err,rel_err,tol_used,pass,diagnostics\n",
            );
            for c in &report.cases {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    c.identity,
                    csv_quote(&format_point(&c.point)),
                    c.lhs,
                    c.rhs,
                    c.abs_err,
                    c.rel_err,
                    c.tol_used,
                    c.pass,
                    csv_quote(&c.diagnostics)
                ));
            }
            out
        }
        ReportFormat::Markdown => {
            let mut out = String::from("# Identity verification report\n\n");
            out.push_str("| identity | cases | passed | max rel err | worst point |\n");
            out.push_str("|---|---|---|---|---|\n");
            for (id, s) in &report.summary {
                out.push_str(&format!(
                    "| {} | {} | {} | {:.3e} | {} |\n",
                    id,
                    s.count,
                    s.passed,
                    s.max_rel_err,
                    format_point(&s.worst_point)
                ));
            }
            if !report.excluded.is_empty() {
                out.push_str("\n## Excluded points\n\n");
                for e in &report.excluded {
                    out.push_str(&format!(
                        "- {} at {}: {}\n",
                        e.identity,
                        format_point(&e.point),
                        e.reason
                    ));
                }
            }
            if !report.notes.is_empty() {
                out.push_str("\n## Notes\n\n");
                for n in &report.notes {
                    out.push_str(&format!("- {n}\n"));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_canonical_json() {
        let r = VerificationReport::empty();
        assert_eq!(
            render_report(&r, ReportFormat::Json),
            r#"{"schema_version":"1","cases":[],"summary":{}}"#
        );
    }

    fn one_case_report() -> VerificationReport {
        let case = IdentityCase::build(
            IdentityId::E26,
            point_from(&[("x", 1.0)]),
            0.267_120_196_2,
            0.267_120_196_2,
            1e-10,
            true,
            String::new(),
        );
        VerificationReport::assemble(vec![IdentityId::E26], vec![case], vec![], vec![])
    }

    #[test]
    fn csv_has_nine_columns() {
        let text = render_report(&one_case_report(), ReportFormat::Csv);
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert_eq!(header.split(',').count(), 9);
        let row = lines.next().unwrap();
        // quoted fields carry no inner commas here, so a plain split works
        assert_eq!(row.split(',').count(), 9);
        assert!(row.starts_with("E26,"));
    }

    #[test]
    fn markdown_lists_max_rel_err() {
        let text = render_report(&one_case_report(), ReportFormat::Markdown);
        assert!(text.contains("| E26 | 1 | 1 |"));
        assert!(text.contains("max rel err"));
    }

    #[test]
    fn mixed_criterion() {
        // big rhs: relative; small rhs: absolute floor
        let c = IdentityCase::build(
            IdentityId::E28,
            point_from(&[("x", 20.0)]),
            1e8,
            1e8 + 0.001,
            1e-10,
            true,
            String::new(),
        );
        assert!(c.pass);
        let c = IdentityCase::build(
            IdentityId::E26,
            point_from(&[("x", 0.1)]),
            1e-13,
            3e-12,
            1e-10,
            true,
            String::new(),
        );
        assert!(c.pass);
        let c = IdentityCase::build(
            IdentityId::E26,
            point_from(&[("x", 0.1)]),
            1e-3,
            2e-3,
            1e-10,
            true,
            String::new(),
        );
        assert!(!c.pass);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("json".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert!("yaml".parse::<ReportFormat>().is_err());
    }
}
