//! End-to-end experiments and their machine-readable reports.
//!
//! Every runner returns an [`ExperimentReport`]; verdicts are decided on
//! exact values (integers, exact fractions) that are embedded in the case.

mod prop12;
mod rigidity_scan;
mod selftest;
mod sieve_run;
pub mod suites;
mod warmup;

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::cm::HilbertOptions;
use crate::error::{Error, Result};

pub use prop12::run_prop_approximate;
pub use rigidity_scan::run_rigidity_scan;
pub use selftest::run_selftest;
pub use sieve_run::run_sieve;
pub use warmup::{find_warmup_prime, gross_zagier_sum, run_warmup_2adic, WarmupPrime};

/// Settings shared by every experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Working `p`-adic precision in digits.
    pub precision: u32,
    pub cache_dir: Option<PathBuf>,
    pub max_abs_d: u64,
    /// Replacement directory for the modular polynomial tables (selftest).
    pub phi_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            precision: 20,
            cache_dir: None,
            max_abs_d: crate::cm::hilbert::DEFAULT_MAX_ABS_D,
            phi_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn hilbert_options(&self) -> HilbertOptions {
        HilbertOptions {
            max_abs_d: self.max_abs_d,
            cache_dir: self.cache_dir.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub id: String,
    pub inputs: Value,
    pub values: Value,
    pub verdict: Verdict,
    pub notes: String,
}

impl CaseResult {
    pub fn new(
        id: impl Into<String>,
        inputs: Value,
        values: Value,
        verdict: Verdict,
    ) -> CaseResult {
        CaseResult {
            id: id.into(),
            inputs,
            values,
            verdict,
            notes: String::new(),
        }
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> CaseResult {
        self.notes = notes.into();
        self
    }

    /// A case that could not be evaluated; errors never become passes.
    pub fn from_error(id: impl Into<String>, inputs: Value, err: &Error) -> CaseResult {
        let verdict = match err {
            Error::Resource(_)
            | Error::SearchExhausted(_)
            | Error::PrecisionExhausted(_)
            | Error::Inconclusive(_) => Verdict::Skipped,
            _ => Verdict::Fail,
        };
        CaseResult::new(id, inputs, Value::Object(Default::default()), verdict)
            .with_notes(err.to_string())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: Value,
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
    pub timing_ms: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: Value) -> ExperimentReport {
        ExperimentReport {
            experiment: experiment.to_string(),
            config,
            cases: Vec::new(),
            summary: Summary::default(),
            timing_ms: None,
        }
    }

    pub fn push(&mut self, case: CaseResult) {
        match case.verdict {
            Verdict::Pass => self.summary.pass += 1,
            Verdict::Fail => self.summary.fail += 1,
            Verdict::Skipped => self.summary.skipped += 1,
        }
        self.cases.push(case);
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn case(&self, id: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per case; `inputs` and `values` are embedded as JSON text.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["experiment", "id", "verdict", "inputs", "values", "notes"])
            .map_err(io)?;
        for c in &self.cases {
            let verdict = serde_json::to_value(c.verdict).expect("verdict serializes");
            w.write_record([
                self.experiment.as_str(),
                c.id.as_str(),
                verdict.as_str().unwrap_or_default(),
                &c.inputs.to_string(),
                &c.values.to_string(),
                c.notes.as_str(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => Ok(self.to_json()),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn write_to(&self, out: &mut impl Write, format: OutputFormat) -> Result<()> {
        out.write_all(self.render(format)?.as_bytes())?;
        Ok(())
    }
}

fn elapsed_ms(start: std::time::Instant) -> Option<u64> {
    Some(start.elapsed().as_millis() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn summary_counts_and_formats() {
        let mut r = ExperimentReport::new("demo", json!({"p": 5}));
        r.push(CaseResult::new(
            "a",
            json!({}),
            json!({"v": "3/2"}),
            Verdict::Pass,
        ));
        r.push(
            CaseResult::new("b", json!({}), json!({}), Verdict::Skipped).with_notes("cap, reached"),
        );
        assert_eq!(
            r.summary,
            Summary {
                pass: 1,
                fail: 0,
                skipped: 1
            }
        );
        assert!(!r.has_failures());
        let j: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(j["cases"][0]["verdict"], "PASS");
        assert_eq!(j["timing_ms"], Value::Null);
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("\"cap, reached\""));
        let e = CaseResult::from_error("c", json!({}), &Error::Resource("big".into()));
        assert_eq!(e.verdict, Verdict::Skipped);
    }
}
