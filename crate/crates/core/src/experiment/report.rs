//! Threshold checks, row tables and report files.

use serde::Serialize;
use std::fs;
use std::path::PathBuf;

use super::config::{ExperimentConfig, Format};
use crate::error::Result;

/// One acceptance threshold applied to a measured value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: "<=",
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: ">=",
            threshold,
            passed: value >= threshold,
        }
    }

    /// A pass/fail flag recorded as `1 >= 1` or `0 >= 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

/// A CSV-shaped table of stringified values.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Column names `prefix_0, prefix_1, ...`.
pub fn coord_names(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|i| format!("{prefix}_{i}")).collect()
}

pub fn fmt_vec(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Shared interface of the experiment reports.
pub trait Report: Serialize {
    fn checks(&self) -> &[Check];
    fn table(&self) -> Table;

    fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }
}

#[derive(Serialize)]
struct Document<'a, R: Serialize> {
    experiment: &'a str,
    config: &'a ExperimentConfig,
    passed: bool,
    checks: &'a [Check],
    result: &'a R,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<&'a Table>,
}

/// Writes the report under `cfg.out_dir` and returns the file paths.
pub fn write_report<R: Report>(cfg: &ExperimentConfig, report: &R) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out_dir)?;
    let stem = cfg.experiment.stem();
    let table = report.table();
    let mut files = Vec::new();
    if cfg.format == Format::Csv {
        let path = cfg.out_dir.join(format!("{stem}.csv"));
        write_csv(&path, &table)?;
        files.push(path);
    }
    let doc = Document {
        experiment: cfg.experiment.name(),
        config: cfg,
        passed: report.passed(),
        checks: report.checks(),
        result: report,
        table: (cfg.format == Format::Json).then_some(&table),
    };
    let path = cfg.out_dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(&path, text)?;
    files.push(path);
    Ok(files)
}

pub fn write_csv(path: &std::path::Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
