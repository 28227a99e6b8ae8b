//! Named verification suites, reports and sample export.

mod config;
mod experiments;
mod export;
pub mod oracle;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats::TestReport;

pub use config::{ExperimentConfig, OutputFormat, Suite, DEFAULT_SEED};
pub use experiments::{run_criterion, Criterion};
pub use export::{histogram_csv, sample_export, ExportSummary, HISTOGRAM_BINS};

/// Outcome of one numbered acceptance criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub cases: Vec<TestReport>,
    pub pass: bool,
    pub runtime_ms: u64,
}

impl CriterionReport {
    pub fn summary_line(&self) -> String {
        let failed: Vec<&str> = self.cases.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{verdict} criterion {:>2} {} ({} cases, {:.1} s)",
            self.id,
            self.title,
            self.cases.len(),
            self.runtime_ms as f64 / 1000.0
        );
        if !failed.is_empty() {
            line.push_str(&format!(" failing: {}", failed.join(", ")));
        }
        line
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: serde_json::Value,
    pub cases: Vec<TestReport>,
    pub pass: bool,
    pub wall_time_ms: u64,
}

impl SuiteReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One line per case: `name,statistic,threshold,p_value,pass,n,seed,runtime_ms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,statistic,threshold,p_value,pass,n,seed,runtime_ms\n");
        for c in &self.cases {
            let n: Vec<String> = c.n.iter().map(ToString::to_string).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.name,
                c.statistic,
                c.threshold,
                c.p_value.map_or(String::new(), |p| p.to_string()),
                c.pass,
                n.join(";"),
                c.seed.map_or(String::new(), |s| s.to_string()),
                c.runtime_ms
            ));
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => Ok(self.to_csv()),
        }
    }
}

/// Run every criterion belonging to the configured suite.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let mut cases = Vec::new();
    for &criterion in config.suite.criteria() {
        cases.extend(run_criterion(criterion, config)?.cases);
    }
    let pass = cases.iter().all(|c| c.pass);
    Ok(SuiteReport {
        suite: config.suite.name().to_string(),
        config: serde_json::to_value(config)?,
        cases,
        pass,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}
