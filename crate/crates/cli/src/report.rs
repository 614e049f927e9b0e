//! Run reports and their CSV/JSON forms.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use bergman_core::kernel::KernelDiagnostics;
use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;

/// Bumped whenever a report field is added, removed, or renamed.
pub const SCHEMA_VERSION: u32 = 1;

/// A checked claim. Exploratory reports carry none.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictLine {
    pub check: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl VerdictLine {
    /// `value ≤ threshold`.
    pub fn at_most(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            check: check.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: format!("{value:.6e} <= {threshold:.6e}"),
        }
    }

    /// `value ≥ threshold`.
    pub fn at_least(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            check: check.into(),
            passed: value >= threshold,
            value,
            threshold,
            detail: format!("{value:.6e} >= {threshold:.6e}"),
        }
    }

    pub fn flag(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            passed,
            value: if passed { 1.0 } else { 0.0 },
            threshold: 1.0,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map(|x| format!("{x:e}")).unwrap_or_else(|| n.to_string()),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedDiagnostics {
    pub label: String,
    pub diagnostics: KernelDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub name: String,
    pub experiment: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub exploratory: bool,
    /// Absent on exploratory runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Vec<VerdictLine>>,
    /// Probe reports (with witnesses) keyed by label.
    pub probes: Vec<(String, Value)>,
    pub diagnostics: Vec<NamedDiagnostics>,
    pub tables: Vec<Table>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: config.name.clone(),
            experiment: config.experiment.kind().into(),
            seed: config.seed,
            config: config.clone(),
            exploratory: false,
            verdicts: Some(Vec::new()),
            probes: Vec::new(),
            diagnostics: Vec::new(),
            tables: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn exploratory(config: &ExperimentConfig) -> Self {
        Self {
            exploratory: true,
            verdicts: None,
            ..Self::new(config)
        }
    }

    pub fn verdict(&mut self, line: VerdictLine) {
        self.verdicts
            .as_mut()
            .expect("exploratory reports carry no verdicts")
            .push(line);
    }

    pub fn probe(&mut self, label: &str, report: &impl Serialize) -> Result<()> {
        self.probes.push((label.into(), serde_json::to_value(report)?));
        Ok(())
    }

    /// True when every asserted verdict passed; exploratory runs always pass.
    pub fn passed(&self) -> bool {
        self.verdicts.as_ref().map_or(true, |v| v.iter().all(|l| l.passed))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<name>.json` and `<name>-<table>.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join(format!("{}.json", self.name)), self.to_json()? + "\n")?;
        for t in &self.tables {
            let path = dir.join(format!("{}-{}.csv", self.name, t.name));
            t.write_csv(std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?)?;
        }
        Ok(())
    }

    /// One line per verdict, for terminals.
    pub fn summary(&self) -> String {
        let mut s = format!("{} ({})", self.name, self.experiment);
        match &self.verdicts {
            None => s.push_str(" exploratory, open question, no verdict\n"),
            Some(lines) => {
                s.push_str(if self.passed() { " PASS\n" } else { " FAIL\n" });
                for l in lines {
                    s.push_str(&format!(
                        "  [{}] {}: {}\n",
                        if l.passed { "ok" } else { "FAIL" },
                        l.check,
                        l.detail
                    ));
                }
            }
        }
        s
    }
}

/// Combined table for `suite`.
pub fn suite_table(reports: &[RunReport]) -> Table {
    let mut t = Table::new("summary", &["name", "experiment", "status", "verdicts", "failed", "wall_time_s"]);
    for r in reports {
        let (n, failed) = r
            .verdicts
            .as_ref()
            .map_or((0, 0), |v| (v.len(), v.iter().filter(|l| !l.passed).count()));
        let status = if r.exploratory {
            "exploratory"
        } else if r.passed() {
            "pass"
        } else {
            "fail"
        };
        t.push(vec![
            r.name.clone().into(),
            r.experiment.clone().into(),
            status.into(),
            n.into(),
            failed.into(),
            r.wall_time_s.into(),
        ]);
    }
    t
}
