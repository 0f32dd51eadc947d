//! Run reports: a deterministic structured-text document per run, plus an
//! optional CSV table. The body is byte-identical across runs with the same
//! config and seed; timestamp and runtime live in the footer only.

use falsify_core::numerics::{to_f64, Rational};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One checked inequality or identity, named by its check tag.
#[derive(Debug, Clone)]
pub struct AssertionRecord {
    pub tag: &'static str,
    pub detail: String,
    /// Slack remaining in the inequality; negative means violated.
    pub margin: f64,
    pub pass: bool,
}

impl AssertionRecord {
    pub fn new(tag: &'static str, detail: String, margin: f64, pass: bool) -> Self {
        AssertionRecord {
            tag,
            detail,
            margin,
            pass,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub subcommand: String,
    pub scenario: String,
    pub seed: Option<u64>,
    /// Machine identifier, present on program-machine runs.
    pub machine_id: Option<&'static str>,
    pub config_text: String,
    pub rows: Vec<String>,
    pub assertions: Vec<AssertionRecord>,
    pub csv: Option<CsvTable>,
}

impl Report {
    pub fn new(subcommand: &str, scenario: &str, seed: Option<u64>, config_text: &str) -> Self {
        Report {
            subcommand: subcommand.to_string(),
            scenario: scenario.to_string(),
            seed,
            machine_id: None,
            config_text: config_text.to_string(),
            rows: Vec::new(),
            assertions: Vec::new(),
            csv: None,
        }
    }

    pub fn row(&mut self, line: impl Into<String>) {
        self.rows.push(line.into());
    }

    pub fn assert_record(&mut self, record: AssertionRecord) {
        self.assertions.push(record);
    }

    pub fn failures(&self) -> usize {
        self.assertions.iter().filter(|a| !a.pass).count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures() == 0 {
            0
        } else {
            1
        }
    }

    /// The deterministic report body: inputs, measures, and assertion
    /// outcomes with margins.
    pub fn body(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("subcommand: {}\n", self.subcommand));
        out.push_str(&format!("scenario: {}\n", self.scenario));
        match self.seed {
            Some(seed) => out.push_str(&format!("seed: {seed}\n")),
            None => out.push_str("seed: none\n"),
        }
        if let Some(id) = self.machine_id {
            out.push_str(&format!("machine-id: {id}\n"));
        }
        out.push_str("config:\n");
        for line in self.config_text.lines() {
            out.push_str("  | ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("rows:\n");
        for line in &self.rows {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("assertions:\n");
        for a in &self.assertions {
            out.push_str(&format!(
                "  [{}] {} margin={} {}\n",
                a.tag,
                a.detail,
                fmt_f64(a.margin),
                if a.pass { "PASS" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "summary: {} assertions, {} failed\n",
            self.assertions.len(),
            self.failures()
        ));
        out
    }

    /// Full document: versioned header, body, and a footer with the
    /// wall-clock fields excluded from reproducibility comparisons.
    pub fn render(&self, runtime_ms: u128, timestamp_unix: u64) -> String {
        let mut out = String::new();
        out.push_str(&format!("artifact: falsify {ARTIFACT_VERSION}\n"));
        out.push_str("--- body ---\n");
        out.push_str(&self.body());
        out.push_str("--- footer ---\n");
        out.push_str(&format!("timestamp-unix: {timestamp_unix}\n"));
        out.push_str(&format!("runtime-ms: {runtime_ms}\n"));
        out
    }
}

/// Deterministic decimal rendering used everywhere in reports.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.9}")
}

/// Exact fraction plus a decimal rendering.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{} ({})", r, fmt_f64(to_f64(r)))
}

/// Fraction-only rendering for CSV cells; parses back losslessly.
pub fn csv_rational(r: &Rational) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use falsify_core::numerics::rat;
    use std::str::FromStr;

    #[test]
    fn body_is_deterministic_and_footer_is_not_in_it() {
        let mut report = Report::new("verify", "slt", Some(1), "scenario=\"slt\"");
        report.row("F=1/2");
        report.assert_record(AssertionRecord::new("D", "chain".into(), 0.5, true));
        let body1 = report.body();
        let body2 = report.body();
        assert_eq!(body1, body2);
        assert!(!report.render(12, 99).contains("runtime-ms: 13"));
        assert!(report.render(12, 99).contains(&body1));
    }

    #[test]
    fn csv_cells_round_trip() {
        let r = rat(22, 7);
        let cell = csv_rational(&r);
        assert_eq!(Rational::from_str(&cell).unwrap(), r);
    }
}
