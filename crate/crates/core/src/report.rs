//! Per-snapshot analysis reports and their CSV form.
//!
//! Undefined statistics (a snapshot without butterflies, a zero-mean sample)
//! are stored as NaN and written as `NaN`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::butterfly::butterfly_report;
use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::metrics::{describe, f_vector, pearson_assortativity, strength_deltas};
use crate::stream::{fold_snapshots, sample_timeline, segment_bursts, StreamLog};

/// One sampled snapshot. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n_bursts: usize,
    /// Records in the snapshot prefix.
    pub edges: usize,
    pub butterflies: u64,
    pub rate: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub r_s: f64,
    pub pearson_r: f64,
    pub mu_delta: f64,
    pub cv_delta: f64,
    pub y2_delta: f64,
    pub mu_i: f64,
    pub cv_i: f64,
    pub y2_i: f64,
    pub mu_j: f64,
    pub cv_j: f64,
    pub y2_j: f64,
}

/// Mean absolute errors of the localization factor and F elements against
/// a reference report, over rows where both sides are defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mae {
    pub r_s: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub rows: Vec<ReportRow>,
    pub rate_mean: f64,
    pub rate_std: f64,
    pub mae: Option<Mae>,
}

/// Moments as (mean, cv, excess kurtosis), NaN where undefined.
fn triple(values: &[f64]) -> (f64, f64, f64) {
    match describe(values) {
        None => (f64::NAN, f64::NAN, f64::NAN),
        Some(d) => (d.mean, d.cv.unwrap_or(f64::NAN), d.excess_kurtosis.unwrap_or(f64::NAN)),
    }
}

/// Analyzes `k` evenly spaced snapshots over the first `max_bursts` bursts
/// (all bursts when `None`).
pub fn analyze_stream(stream: &StreamLog, k: usize, max_bursts: Option<usize>) -> Result<AnalysisReport> {
    let bursts = segment_bursts(stream.records());
    let total = max_bursts.map_or(bursts.len(), |m| m.min(bursts.len()));
    let points = sample_timeline(total, k)?;
    let mut rows = Vec::with_capacity(k);
    let mut failure = None;
    fold_snapshots(stream.records(), &bursts, &points, |n_bursts, prefix, g| {
        let rep = butterfly_report(g);
        let deltas = match strength_deltas(g, &rep.butterfly_edges) {
            Ok(d) => d,
            Err(e) => {
                failure.get_or_insert(e);
                return;
            }
        };
        let f = f_vector(&deltas).map(|f| f.as_array()).unwrap_or([f64::NAN; 4]);
        let pearson_r = pearson_assortativity(g, &rep.butterfly_edges).unwrap_or(f64::NAN);
        let (mu_delta, cv_delta, y2_delta) = triple(&deltas);
        let si: Vec<f64> = rep
            .butterfly_i_vertices
            .iter()
            .map(|&v| g.strength(Partition::I, v) as f64)
            .collect();
        let sj: Vec<f64> = rep
            .butterfly_j_vertices
            .iter()
            .map(|&v| g.strength(Partition::J, v) as f64)
            .collect();
        let (mu_i, cv_i, y2_i) = triple(&si);
        let (mu_j, cv_j, y2_j) = triple(&sj);
        rows.push(ReportRow {
            n_bursts,
            edges: prefix.len(),
            butterflies: rep.count,
            rate: rep.count as f64 / prefix.len() as f64,
            f1: f[0],
            f2: f[1],
            f3: f[2],
            f4: f[3],
            r_s: f[0] - 0.5,
            pearson_r,
            mu_delta,
            cv_delta,
            y2_delta,
            mu_i,
            cv_i,
            y2_i,
            mu_j,
            cv_j,
            y2_j,
        });
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let rates: Vec<f64> = rows.iter().map(|r| r.rate).collect();
    let d = describe(&rates).expect("k >= 1 rows");
    Ok(AnalysisReport {
        rows,
        rate_mean: d.mean,
        rate_std: d.std,
        mae: None,
    })
}

/// Row-by-row MAE of `r_s` and `f1..f4`. Reports must have the same length.
pub fn mae(rows: &[ReportRow], reference: &[ReportRow]) -> Result<Mae> {
    if rows.len() != reference.len() {
        return Err(Error::Domain(format!(
            "reference has {} rows, report has {}",
            reference.len(),
            rows.len()
        )));
    }
    let mut acc = [0.0f64; 5];
    let mut n = 0;
    for (a, b) in rows.iter().zip(reference) {
        let xs = [a.r_s, a.f1, a.f2, a.f3, a.f4];
        let ys = [b.r_s, b.f1, b.f2, b.f3, b.f4];
        if xs.iter().chain(&ys).any(|v| v.is_nan()) {
            continue;
        }
        for k in 0..5 {
            acc[k] += (xs[k] - ys[k]).abs();
        }
        n += 1;
    }
    let avg = |s: f64| if n == 0 { f64::NAN } else { s / n as f64 };
    Ok(Mae {
        r_s: avg(acc[0]),
        f1: avg(acc[1]),
        f2: avg(acc[2]),
        f3: avg(acc[3]),
        f4: avg(acc[4]),
        rows: n,
    })
}

impl AnalysisReport {
    pub fn compare_to(&mut self, reference: &[ReportRow]) -> Result<Mae> {
        let m = mae(&self.rows, reference)?;
        self.mae = Some(m);
        Ok(m)
    }

    /// Writes the rows as CSV followed by `#` summary lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        {
            let mut w = csv::Writer::from_writer(&mut out);
            for row in &self.rows {
                w.serialize(row)?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        let io = |e| Error::from(csv::Error::from(e));
        writeln!(out, "# rate_mean={} rate_std={}", self.rate_mean, self.rate_std).map_err(io)?;
        if let Some(m) = &self.mae {
            writeln!(
                out,
                "# mae_r_s={} mae_f1={} mae_f2={} mae_f3={} mae_f4={} mae_rows={}",
                m.r_s, m.f1, m.f2, m.f3, m.f4, m.rows
            )
            .map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Reads report rows back, skipping `#` lines.
pub fn read_report_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<ReportRow>, _>>()?;
    Ok(rows)
}

/// `(burst size, frequency)` pairs, largest size first.
pub fn burst_histogram(stream: &StreamLog) -> Vec<(usize, usize)> {
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for b in segment_bursts(stream.records()) {
        *hist.entry(b.len).or_default() += 1;
    }
    hist.into_iter().rev().collect()
}
