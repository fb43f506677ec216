//! Tables and plot data from summary or sweep CSV files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::cli::sweep::MeanStd;
use crate::error::{Error, Result};

/// Runs sharing a scheme (and sweep value, for sweep files).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportGroup {
    pub label: String,
    pub runs: usize,
    pub primary: MeanStd,
    pub secondary: MeanStd,
    pub aggregate: MeanStd,
    pub jain: MeanStd,
    pub leakage_dbm: MeanStd,
    /// Aggregate throughput relative to the baseline group, percent.
    pub gain_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub baseline: String,
    pub groups: Vec<ReportGroup>,
}

/// Percent gain of `x` over `base`: `(100, 222)` gives `122`.
pub fn gain_percent(base: f64, x: f64) -> f64 {
    100.0 * (x - base) / base
}

#[derive(Default)]
struct Columns {
    value: Option<usize>,
    scheme: usize,
    primary: usize,
    secondary: usize,
    aggregate: usize,
    jain: usize,
    leakage: usize,
}

fn locate(headers: &csv::StringRecord) -> Result<Columns> {
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Malformed(format!("missing column `{name}`")))
    };
    Ok(Columns {
        value: headers.iter().position(|h| h == "value"),
        scheme: find("scheme")?,
        primary: find("primary_throughput")?,
        secondary: find("secondary_throughput")?,
        aggregate: find("aggregate_throughput")?,
        jain: find("jain")?,
        leakage: find("mean_leakage_dbm")?,
    })
}

fn number(rec: &csv::StringRecord, idx: usize, line: u64) -> Result<f64> {
    let raw = rec.get(idx).ok_or_else(|| Error::Malformed(format!("line {line}: short record")))?;
    if raw.is_empty() {
        return Ok(f64::NAN);
    }
    raw.parse().map_err(|_| Error::Malformed(format!("line {line}: `{raw}` is not a number")))
}

pub fn build_report<R: Read>(input: R) -> Result<Report> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Malformed(e.to_string()))?.clone();
    let cols = locate(&headers)?;
    let mut order: Vec<String> = Vec::new();
    let mut samples: BTreeMap<String, [Vec<f64>; 5]> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::Malformed(e.to_string()))?;
        let scheme = rec.get(cols.scheme).ok_or_else(|| Error::Malformed(format!("line {line}: short record")))?;
        let label = match cols.value.and_then(|v| rec.get(v)) {
            Some(v) => format!("{scheme}@{v}"),
            None => scheme.to_string(),
        };
        let vals =
            [cols.primary, cols.secondary, cols.aggregate, cols.jain, cols.leakage].map(|c| number(&rec, c, line));
        let entry = samples.entry(label.clone()).or_insert_with(|| {
            order.push(label.clone());
            Default::default()
        });
        for (dst, v) in entry.iter_mut().zip(vals) {
            dst.push(v?);
        }
    }
    if order.is_empty() {
        return Err(Error::Malformed("no data rows".into()));
    }
    let baseline = order.iter().find(|l| *l == "omni" || l.starts_with("omni@")).unwrap_or(&order[0]).clone();
    let base_aggregate = MeanStd::of(samples[&baseline][2].iter().copied()).mean;
    let groups = order
        .iter()
        .map(|label| {
            let s = &samples[label];
            let stat = |k: usize| MeanStd::of(s[k].iter().copied());
            let aggregate = stat(2);
            ReportGroup {
                label: label.clone(),
                runs: s[0].len(),
                primary: stat(0),
                secondary: stat(1),
                aggregate,
                jain: stat(3),
                leakage_dbm: stat(4),
                gain_pct: gain_percent(base_aggregate, aggregate.mean),
            }
        })
        .collect();
    Ok(Report { baseline, groups })
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    build_report(file)
}

impl Report {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<14} {:>5} {:>12} {:>12} {:>12} {:>7} {:>12} {:>9}",
            "scheme", "runs", "primary/s", "secondary/s", "aggregate/s", "jain", "leak dBm", "gain %"
        );
        for g in &self.groups {
            let _ = writeln!(
                out,
                "{:<14} {:>5} {:>12.2} {:>12.2} {:>12.2} {:>7.4} {:>12.2} {:>+9.1}",
                g.label,
                g.runs,
                g.primary.mean,
                g.secondary.mean,
                g.aggregate.mean,
                g.jain.mean,
                g.leakage_dbm.mean,
                g.gain_pct
            );
        }
        let _ = writeln!(out, "gain relative to `{}`", self.baseline);
        out
    }

    /// Whitespace-separated columns for gnuplot, one row per group.
    pub fn gnuplot_data(&self) -> String {
        let mut out = String::from(
            "# idx label runs primary primary_sd secondary secondary_sd aggregate aggregate_sd jain jain_sd leak_dbm leak_dbm_sd gain_pct\n",
        );
        for (i, g) in self.groups.iter().enumerate() {
            let _ = write!(out, "{i} \"{}\" {}", g.label, g.runs);
            for ms in [g.primary, g.secondary, g.aggregate, g.jain, g.leakage_dbm] {
                let _ = write!(out, " {} {}", ms.mean, ms.std);
            }
            let _ = writeln!(out, " {}", g.gain_pct);
        }
        out
    }
}
