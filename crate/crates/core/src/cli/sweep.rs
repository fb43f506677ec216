//! Parameter sweeps: one config, one dotted parameter path, a list of values,
//! every seed of the config per value.

use std::io::Write;

use rayon::prelude::*;

use crate::cli::config::{config_from_table, ScenarioConfig};
use crate::cli::presets::{free_locations, grid_location};
use crate::error::{Error, Result};
use crate::sim::{run_scenario, summary_csv_record, to_dbm, RunMetrics, SUMMARY_CSV_HEADER};

/// Pseudo-parameter placing the single secondary receiver at a grid
/// location id.
pub const GRID_RECEIVER_PARAM: &str = "grid.secondary_receiver";

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub scheme: String,
    pub metrics: RunMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Sample mean and (n−1) standard deviation; NaN entries are skipped.
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = xs.into_iter().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return MeanStd { mean: f64::NAN, std: f64::NAN };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std =
            if v.len() > 1 { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
        MeanStd { mean, std }
    }
}

#[derive(Debug, Clone)]
pub struct SweepAggregate {
    pub value: String,
    pub runs: usize,
    pub primary: MeanStd,
    pub secondary: MeanStd,
    pub aggregate: MeanStd,
    pub jain: MeanStd,
    pub leakage_dbm: MeanStd,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub param: String,
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<SweepAggregate>,
}

/// Splits a comma-separated value list, ignoring commas nested in brackets,
/// braces or quotes.
pub fn split_values(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut quoted = false;
    let mut cur = String::new();
    for ch in list.chars() {
        match ch {
            '"' => quoted = !quoted,
            '[' | '{' if !quoted => depth += 1,
            ']' | '}' if !quoted => depth -= 1,
            ',' if depth == 0 && !quoted => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Expands the value list; `free` under [`GRID_RECEIVER_PARAM`] stands for
/// every free grid location of the scenario.
pub fn expand_values(cfg: &ScenarioConfig, param: &str, list: &str) -> Vec<String> {
    if param == GRID_RECEIVER_PARAM && list.trim() == "free" {
        return free_locations(cfg).iter().map(u8::to_string).collect();
    }
    split_values(list)
}

/// Parses a TOML literal; bare words fall back to strings.
fn parse_literal(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let invalid = || Error::config(path, "invalid parameter path");
    let mut parts = path.split('.').peekable();
    let mut cur = table;
    while let Some(key) = parts.next() {
        if parts.peek().is_none() {
            let slot = cur.get_mut(key).ok_or_else(invalid)?;
            if slot.is_table() {
                return Err(Error::config(path, "path names a table, not a value"));
            }
            *slot = value;
            return Ok(());
        }
        cur = cur.get_mut(key).and_then(toml::Value::as_table_mut).ok_or_else(invalid)?;
    }
    Err(invalid())
}

/// Config with `param` set to `raw`.
pub fn apply_override(cfg: &ScenarioConfig, param: &str, raw: &str) -> Result<ScenarioConfig> {
    let mut table = toml::Table::try_from(cfg).expect("config serializes");
    if param == GRID_RECEIVER_PARAM {
        let id: u8 = raw
            .parse()
            .ok()
            .filter(|id| (1..=16).contains(id))
            .ok_or_else(|| Error::config(param, format!("`{raw}` is not a grid location 1..=16")))?;
        let p = grid_location(id);
        let receivers = toml::Value::try_from(vec![p]).expect("position serializes");
        set_path(&mut table, "geometry.secondary_receivers", receivers)?;
    } else {
        set_path(&mut table, param, parse_literal(raw))?;
    }
    config_from_table(table)
}

pub fn run_sweep(cfg: &ScenarioConfig, param: &str, values: &[String]) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::config("--values", "no sweep values given"));
    }
    let configs =
        values.iter().map(|v| apply_override(cfg, param, v).map(|c| (v.clone(), c))).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> =
        configs.iter().enumerate().flat_map(|(i, (_, c))| c.run.seeds.iter().map(move |&s| (i, s))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let (value, c) = &configs[i];
            run_scenario::<std::io::Sink>(c, seed, None).map(|metrics| SweepRow {
                value: value.clone(),
                scheme: c.run.scheme.to_string(),
                metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let aggregates = configs
        .iter()
        .map(|(value, _)| {
            let group: Vec<&RunMetrics> = rows.iter().filter(|r| &r.value == value).map(|r| &r.metrics).collect();
            SweepAggregate {
                value: value.clone(),
                runs: group.len(),
                primary: MeanStd::of(group.iter().map(|m| m.primary_throughput())),
                secondary: MeanStd::of(group.iter().map(|m| m.secondary_throughput())),
                aggregate: MeanStd::of(group.iter().map(|m| m.aggregate_throughput)),
                jain: MeanStd::of(group.iter().map(|m| m.jain_index.unwrap_or(f64::NAN))),
                leakage_dbm: MeanStd::of(group.iter().map(|m| {
                    if m.secondary_active_slots > 0 {
                        to_dbm(m.mean_interference_at_primary)
                    } else {
                        f64::NAN
                    }
                })),
            }
        })
        .collect();
    Ok(SweepResult { param: param.to_string(), rows, aggregates })
}

pub fn write_sweep_rows<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["value"];
    header.extend(SUMMARY_CSV_HEADER);
    w.write_record(&header)?;
    for row in &result.rows {
        let mut rec = vec![row.value.clone()];
        rec.extend(summary_csv_record(&row.scheme, &row.metrics));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<sweep csv>", e))?;
    Ok(())
}

pub const AGGREGATE_CSV_HEADER: [&str; 12] = [
    "value",
    "runs",
    "primary_mean",
    "primary_std",
    "secondary_mean",
    "secondary_std",
    "aggregate_mean",
    "aggregate_std",
    "jain_mean",
    "jain_std",
    "leakage_dbm_mean",
    "leakage_dbm_std",
];

fn cell(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.6}")
    }
}

pub fn write_sweep_aggregates<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_CSV_HEADER)?;
    for a in &result.aggregates {
        let mut rec = vec![a.value.clone(), a.runs.to_string()];
        for ms in [a.primary, a.secondary, a.aggregate, a.jain, a.leakage_dbm] {
            rec.push(cell(ms.mean));
            rec.push(cell(ms.std));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<aggregate csv>", e))?;
    Ok(())
}
