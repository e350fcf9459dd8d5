use std::fmt::Write as _;

use serde::Serialize;

use super::registry::{CheckResult, DimensionPolicy};
use crate::quantities::Quantity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub waived: usize,
}

impl Summary {
    pub fn tally(results: &[CheckResult]) -> Self {
        let passed = results.iter().filter(|r| r.passed).count();
        Self {
            total: results.len(),
            passed,
            failed: results.len() - passed,
            waived: results
                .iter()
                .filter(|r| r.dimension_policy == DimensionPolicy::Waived)
                .count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub timestamp: String,
    pub constants_fingerprint: String,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
}

pub const CSV_HEADER: &str = "id,lhs,rhs,gap_decades,tolerance,dimension_ok,passed";

fn opt_value(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn short(q: Option<Quantity>) -> String {
    match q {
        None => "-".into(),
        Some(q) if q.dim().is_dimensionless() => format!("{:.3e}", q.magnitude()),
        Some(q) => format!("{:.3e} {}", q.magnitude(), q.dim()),
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    id: &'a str,
    lhs: Option<f64>,
    rhs: Option<f64>,
    gap_decades: Option<f64>,
    tolerance: f64,
    dimension_ok: bool,
    passed: bool,
    lhs_unit: Option<String>,
    rhs_unit: Option<String>,
    dimension_policy: DimensionPolicy,
    notes: &'a str,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    timestamp: &'a str,
    constants_fingerprint: &'a str,
    summary: Summary,
    results: Vec<JsonRow<'a>>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn result(&self, id: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<[String; 7]> = self
            .results
            .iter()
            .map(|r| {
                [
                    r.id.clone(),
                    short(r.lhs_value),
                    short(r.rhs_value),
                    r.gap_decades
                        .map(|g| format!("{g:.3}"))
                        .unwrap_or_else(|| "-".into()),
                    format!("{}", r.tolerance_decades),
                    r.dimension_policy.to_string(),
                    if r.passed { "PASS" } else { "FAIL" }.to_string(),
                ]
            })
            .collect();
        let header = ["id", "lhs", "rhs", "gap", "tol", "dims", "status"].map(String::from);
        let mut widths = header.clone().map(|h| h.len());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "constants {}", self.constants_fingerprint);
        let _ = writeln!(out, "generated {}", self.timestamp);
        let line = |cells: &[String; 7], out: &mut String| {
            let joined: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", joined.join("  ").trim_end());
        };
        line(&header, &mut out);
        for (row, r) in rows.iter().zip(&self.results) {
            line(row, &mut out);
            if !r.passed && !r.notes.is_empty() {
                let _ = writeln!(out, "    {}", r.notes);
            }
        }
        let s = self.summary;
        let _ = writeln!(
            out,
            "{} relations: {} passed, {} failed, {} waived",
            s.total, s.passed, s.failed, s.waived
        );
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.results {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&r.id),
                opt_value(r.lhs_value.map(|q| q.magnitude())),
                opt_value(r.rhs_value.map(|q| q.magnitude())),
                r.gap_decades.map(|g| g.to_string()).unwrap_or_default(),
                r.tolerance_decades,
                r.dimension_ok,
                r.passed
            );
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = JsonReport {
            timestamp: &self.timestamp,
            constants_fingerprint: &self.constants_fingerprint,
            summary: self.summary,
            results: self
                .results
                .iter()
                .map(|r| JsonRow {
                    id: &r.id,
                    lhs: r.lhs_value.map(|q| q.magnitude()),
                    rhs: r.rhs_value.map(|q| q.magnitude()),
                    gap_decades: r.gap_decades,
                    tolerance: r.tolerance_decades,
                    dimension_ok: r.dimension_ok,
                    passed: r.passed,
                    lhs_unit: r.lhs_value.map(|q| q.dim().to_string()),
                    rhs_unit: r.rhs_value.map(|q| q.dim().to_string()),
                    dimension_policy: r.dimension_policy,
                    notes: &r.notes,
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::quantities::ConstantsTable;
    use crate::relations::run_registry;

    fn report() -> Report {
        run_registry(&ConstantsTable::builtin(), None, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn summary_matches_results() {
        let r = report();
        assert_eq!(r.summary.total, 21);
        assert_eq!(r.summary.passed + r.summary.failed, r.summary.total);
        assert_eq!(r.summary, Summary::tally(&r.results));
        assert_eq!(r.summary.waived, 3);
    }

    #[test]
    fn csv_shape() {
        let csv = report().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        for l in lines.clone() {
            assert_eq!(l.split(',').count(), 7, "{l}");
        }
        assert_eq!(lines.count(), 21);
    }

    #[test]
    fn json_rows_carry_csv_keys() {
        let v: serde_json::Value = serde_json::from_str(&report().to_json()).unwrap();
        let rows = v["results"].as_array().unwrap();
        assert_eq!(rows.len(), 21);
        for key in CSV_HEADER.split(',') {
            assert!(rows[0].get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn deterministic_apart_from_timestamp() {
        let mut a = report();
        let mut b = report();
        a.timestamp.clear();
        b.timestamp.clear();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_text(), b.to_text());
    }
}
