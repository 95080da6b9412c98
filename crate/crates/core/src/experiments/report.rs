use std::fmt::Write as _;

use crate::stats::{summarize, Summary};

/// Per-seed values of one metric and their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub name: String,
    pub values: Vec<f64>,
    /// `None` with fewer than two seeds.
    pub summary: Option<Summary>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        let summary = summarize(&values).ok();
        Self { name: name.into(), values, summary }
    }

    pub fn mean(&self) -> f64 {
        self.summary.map_or_else(|| self.values.iter().sum::<f64>() / self.values.len().max(1) as f64, |s| s.mean)
    }
}

/// One configuration (a table row) and its metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub config: String,
    pub metrics: Vec<MetricSeries>,
}

impl ReportRow {
    pub fn metric(&self, name: &str) -> Option<&MetricSeries> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// Short name, e.g. `thm1`.
    pub name: String,
    pub title: String,
    /// Header for the configuration column.
    pub config_label: String,
    pub seeds: Vec<u64>,
    pub rows: Vec<ReportRow>,
    /// Metrics shown by [`ExperimentReport::render_table`]; all of them go to CSV.
    pub displayed: Vec<String>,
    pub runtime_seconds: f64,
    /// `(key, value)` pairs describing the run configuration.
    pub config_echo: Vec<(String, String)>,
    /// Set by composite reports that check a band.
    pub verdict: Option<bool>,
}

impl ExperimentReport {
    pub fn row(&self, config: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.config == config)
    }

    pub fn metric(&self, config: &str, metric: &str) -> Option<&MetricSeries> {
        self.row(config)?.metric(metric)
    }

    /// `config,seed,metric,value`, rows in report order, then seed order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("config,seed,metric,value\n");
        for row in &self.rows {
            for (i, seed) in self.seeds.iter().enumerate() {
                for metric in &row.metrics {
                    if let Some(value) = metric.values.get(i) {
                        let _ = writeln!(out, "{},{seed},{},{value}", csv_field(&row.config), csv_field(&metric.name));
                    }
                }
            }
        }
        out
    }

    pub fn render_table(&self) -> String {
        let mut header = vec![self.config_label.clone()];
        for name in &self.displayed {
            header.push(format!("{name} mean"));
            header.push("std".into());
            header.push("95% CI".into());
        }
        let mut cells = vec![header];
        for row in &self.rows {
            let mut line = vec![row.config.clone()];
            for name in &self.displayed {
                match row.metric(name) {
                    Some(series) => {
                        line.push(format!("{:.4}", series.mean()));
                        match series.summary {
                            Some(s) => {
                                line.push(format!("{:.4}", s.std));
                                line.push(format!("±{:.4}", s.ci95));
                            }
                            None => line.extend(["-".to_string(), "-".to_string()]),
                        }
                    }
                    None => line.extend(["-".to_string(), "-".to_string(), "-".to_string()]),
                }
            }
            cells.push(line);
        }
        let columns = cells[0].len();
        let widths: Vec<usize> =
            (0..columns).map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = format!("{} ({} seeds, {:.1}s)\n", self.title, self.seeds.len(), self.runtime_seconds);
        for (i, line) in cells.iter().enumerate() {
            let padded: Vec<String> =
                line.iter().zip(&widths).map(|(cell, &w)| format!("{cell:>w$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
            if i == 0 {
                let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (columns - 1)));
            }
        }
        if let Some(pass) = self.verdict {
            let _ = writeln!(out, "verdict: {}", if pass { "PASS" } else { "FAIL" });
        }
        out
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
