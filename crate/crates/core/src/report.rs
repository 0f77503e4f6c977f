//! Serializable run reports: verdict rows for summary tables, named line
//! series for plotting, and deterministic JSON round-trips.
//!
//! Reports carry no timestamps or machine identifiers; the same inputs with
//! the same seeds serialize to the same bytes.

use crate::criteria::CriterionReport;
use crate::densities::DensityEstimate;
use crate::error::{Error, Result};
use crate::orbits::VisitRecord;
use crate::proxy::CheckVerdict;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One line of the verdict table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub stage: String,
    pub claim: String,
    pub verdict: CheckVerdict,
    pub detail: String,
}

/// A named polyline for the plotter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

/// Top-level report document: verdict rows, plottable series, and the full
/// per-criterion evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    /// Criterion id or preset name the run was about.
    pub subject: String,
    pub seed: u64,
    /// Echo of the experiment configuration that produced the run.
    pub config: Value,
    pub verdict: CheckVerdict,
    pub rows: Vec<VerdictRow>,
    pub series: Vec<Series>,
    /// Criterion reports keyed by id; sorted keys keep the bytes stable.
    pub evidence: Value,
}

impl RunReport {
    pub fn new(subject: impl Into<String>, seed: u64, config: Value) -> Self {
        RunReport {
            tool: concat!("sectorlab ", env!("CARGO_PKG_VERSION")).into(),
            subject: subject.into(),
            seed,
            config,
            verdict: CheckVerdict::Supported,
            rows: Vec::new(),
            series: Vec::new(),
            evidence: Value::Object(serde_json::Map::new()),
        }
    }

    /// Append a row and fold its verdict into the overall one.
    pub fn push_row(
        &mut self,
        stage: impl Into<String>,
        claim: impl Into<String>,
        verdict: CheckVerdict,
        detail: impl Into<String>,
    ) {
        self.rows.push(VerdictRow {
            stage: stage.into(),
            claim: claim.into(),
            verdict,
            detail: detail.into(),
        });
        self.refold();
    }

    /// Append one row per condition of a criterion run and file its full
    /// evidence under the criterion id.
    pub fn add_criterion(&mut self, stage: impl Into<String>, report: &CriterionReport) -> Result<()> {
        let stage = stage.into();
        for c in &report.conditions {
            let mut detail = String::new();
            if !c.evidence.is_empty() {
                detail.push_str(&format!("evidence {:?}", c.evidence));
            }
            for note in &c.notes {
                if !detail.is_empty() {
                    detail.push_str("; ");
                }
                detail.push_str(note);
            }
            self.rows.push(VerdictRow {
                stage: stage.clone(),
                claim: c.label.clone(),
                verdict: c.verdict,
                detail,
            });
        }
        match &mut self.evidence {
            Value::Object(map) => {
                map.insert(report.id.clone(), serde_json::to_value(report)?);
            }
            _ => return Err(Error::Argument("evidence slot is not an object".into())),
        }
        self.refold();
        Ok(())
    }

    fn refold(&mut self) {
        self.verdict = crate::criteria::conjunction(self.rows.iter().map(|r| r.verdict));
    }

    /// Pretty JSON with a trailing newline; byte-deterministic for equal data.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `stage,claim,verdict,detail` rows, RFC-4180 quoting.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("stage,claim,verdict,detail\n");
        for r in &self.rows {
            let verdict = match r.verdict {
                CheckVerdict::Supported => "supported",
                CheckVerdict::Refuted => "refuted",
                CheckVerdict::Inconclusive => "inconclusive",
            };
            out.push_str(&format!(
                "{},{},{verdict},{}\n",
                csv_field(&r.stage),
                csv_field(&r.claim),
                csv_field(&r.detail)
            ));
        }
        out
    }
}

/// Quote a CSV field when it holds separators, quotes, or newlines.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Exit code contract: 0 supported, 2 refuted, 3 inconclusive (1 is reserved
/// for errors before any verdict exists).
pub fn exit_code(verdict: CheckVerdict) -> i32 {
    match verdict {
        CheckVerdict::Supported => 0,
        CheckVerdict::Refuted => 2,
        CheckVerdict::Inconclusive => 3,
    }
}

/// Density trajectory as a plottable series.
pub fn density_series(name: impl Into<String>, x_label: impl Into<String>, d: &DensityEstimate) -> Series {
    Series {
        name: name.into(),
        x_label: x_label.into(),
        y_label: "ratio".into(),
        points: d.trajectory.clone(),
    }
}

/// Orbit distance trace as a plottable series.
pub fn distance_series(name: impl Into<String>, record: &VisitRecord) -> Series {
    Series {
        name: name.into(),
        x_label: "t".into(),
        y_label: "distance".into(),
        points: record
            .times
            .iter()
            .zip(&record.distances)
            .map(|(t, d)| (*t, *d))
            .collect(),
    }
}

/// Partial-sum ladder as a plottable series.
pub fn ladder_series(name: impl Into<String>, ladder: &[usize], partials: &[f64]) -> Series {
    Series {
        name: name.into(),
        x_label: "terms".into(),
        y_label: "partial sum".into(),
        points: ladder
            .iter()
            .zip(partials)
            .map(|(n, p)| (*n as f64, *p))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::ConditionReport;

    fn sample_report() -> RunReport {
        let mut report = RunReport::new("dov", 7, serde_json::json!({"q": 2.0, "s": 1.0}));
        report.push_row("weights", "admissible on the sector", CheckVerdict::Supported, "64 samples");
        report.push_row("series", "backward tails under budget", CheckVerdict::Supported, "");
        report
    }

    #[test]
    fn report_json_round_trips_byte_identically() {
        let report = sample_report();
        let first = report.to_json().unwrap();
        let second = RunReport::from_json(&first).unwrap().to_json().unwrap();
        assert_eq!(first, second);
        assert!(first.ends_with('\n'));
    }

    #[test]
    fn summary_csv_quotes_embedded_commas() {
        let mut report = sample_report();
        report.push_row("orbit", "hits at 17, 65, 145", CheckVerdict::Refuted, "tail \"heavy\"");
        let csv = report.summary_csv();
        assert!(csv.starts_with("stage,claim,verdict,detail\n"));
        assert!(csv.contains("\"hits at 17, 65, 145\""));
        assert!(csv.contains("\"tail \"\"heavy\"\"\""));
        assert!(csv.contains(",refuted,"));
    }

    #[test]
    fn rows_fold_into_the_overall_verdict() {
        let mut report = sample_report();
        assert_eq!(report.verdict, CheckVerdict::Supported);
        report.push_row("series", "forward tails", CheckVerdict::Inconclusive, "");
        assert_eq!(report.verdict, CheckVerdict::Inconclusive);
        report.push_row("series", "displaced tails", CheckVerdict::Refuted, "");
        assert_eq!(report.verdict, CheckVerdict::Refuted);
    }

    #[test]
    fn criterion_conditions_become_rows() {
        let criterion = CriterionReport::new(
            "qwea",
            vec![
                ConditionReport::new("ray 0.0000", CheckVerdict::Supported),
                ConditionReport::new("ray 0.7854", CheckVerdict::Refuted)
                    .with_note("weight does not decay"),
            ],
        );
        let mut report = RunReport::new("I1", 7, Value::Null);
        report.add_criterion("rays", &criterion).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[1].detail, "weight does not decay");
        assert_eq!(report.verdict, CheckVerdict::Refuted);
        assert!(report.evidence.get("qwea").is_some());
    }

    #[test]
    fn exit_codes_partition_the_outcomes() {
        assert_eq!(exit_code(CheckVerdict::Supported), 0);
        assert_eq!(exit_code(CheckVerdict::Refuted), 2);
        assert_eq!(exit_code(CheckVerdict::Inconclusive), 3);
    }

    #[test]
    fn series_builders_copy_the_data() {
        let ladder = [64usize, 128, 256];
        let partials = [1.0, 1.5, 1.75];
        let s = ladder_series("backward tail", &ladder, &partials);
        assert_eq!(s.points, vec![(64.0, 1.0), (128.0, 1.5), (256.0, 1.75)]);
        assert_eq!(s.x_label, "terms");
    }
}
