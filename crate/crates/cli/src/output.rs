//! Deterministic CSV tables and the run manifest.

use std::collections::BTreeMap;

use causal_probe_core::harness::{CompareRow, Scenario, SignalingReport, SweepReport};
use causal_probe_core::NumericPolicy;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// 17 significant digits, `-0` printed as `0`.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// RFC 4180 quoting, LF line endings.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

pub fn report_tables(report: &SignalingReport) -> Vec<Table> {
    let mut values = Table::new(
        "values",
        &["scheme", "parameter", "observable", "before", "after"],
    );
    for (i, l) in report.grid.iter().enumerate() {
        for s in &report.series {
            values.rows.push(vec![
                report.scheme.clone(),
                format_value(*l),
                s.observable.clone(),
                format_value(s.before[i]),
                format_value(s.after[i]),
            ]);
        }
    }
    let mut signaling = Table::new(
        "signaling",
        &["scheme", "observable", "derivative", "max_deviation"],
    );
    for s in &report.series {
        signaling.rows.push(vec![
            report.scheme.clone(),
            s.observable.clone(),
            format_value(s.derivative),
            format_value(s.max_deviation),
        ]);
    }
    let mut tables = vec![values, signaling];
    if !report.comparison.is_empty() {
        tables.push(compare_table(&report.comparison));
    }
    if let Some(sw) = &report.sweep {
        tables.extend(sweep_tables(sw));
    }
    tables
}

pub fn compare_table(rows: &[CompareRow]) -> Table {
    let mut t = Table::new(
        "compare",
        &["scheme", "observable", "before", "after", "derivative"],
    );
    for r in rows {
        t.rows.push(vec![
            r.scheme.clone(),
            r.observable.clone(),
            format_value(r.before),
            format_value(r.after),
            format_value(r.derivative),
        ]);
    }
    t
}

pub fn sweep_tables(sw: &SweepReport) -> Vec<Table> {
    let obs = sw.observable.clone().unwrap_or_default();
    let mut points = Table::new(
        "sweep",
        &["axis", "value", "cutoff", "metric", "observable", "measure"],
    );
    for ((v, c), m) in sw.values.iter().zip(&sw.cutoffs).zip(&sw.measures) {
        points.rows.push(vec![
            sw.axis.clone(),
            format_value(*v),
            format_value(*c),
            sw.metric.clone(),
            obs.clone(),
            format_value(*m),
        ]);
    }
    let mut fits = Table::new(
        "sweep_fit",
        &[
            "axis",
            "metric",
            "observable",
            "fit",
            "slope",
            "intercept",
            "r2",
        ],
    );
    let mut push = |name: &str, f: &causal_probe_core::harness::Fit| {
        fits.rows.push(vec![
            sw.axis.clone(),
            sw.metric.clone(),
            obs.clone(),
            name.to_string(),
            format_value(f.slope),
            format_value(f.intercept),
            format_value(f.r2),
        ]);
    };
    if let Some(f) = &sw.log_log {
        push("log_log", f);
    }
    push("linear", &sw.linear);
    vec![points, fits]
}

/// Key-sorted compact JSON of the scenario.
pub fn canonical_json(s: &Scenario) -> String {
    fn sort(v: serde_json::Value) -> serde_json::Value {
        match v {
            serde_json::Value::Object(m) => {
                let sorted: BTreeMap<String, serde_json::Value> =
                    m.into_iter().map(|(k, v)| (k, sort(v))).collect();
                serde_json::Value::Object(sorted.into_iter().collect())
            }
            serde_json::Value::Array(a) => {
                serde_json::Value::Array(a.into_iter().map(sort).collect())
            }
            other => other,
        }
    }
    sort(serde_json::to_value(s).expect("scenario serializes")).to_string()
}

pub fn scenario_digest(s: &Scenario) -> String {
    hex::encode(Sha256::digest(canonical_json(s).as_bytes()))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub scenario_digest: String,
    pub policy: NumericPolicy,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    pub outputs: BTreeMap<String, String>,
}
