//! Trial results, their CSV and JSON-lines forms, and aggregate tables.
//!
//! Averages of times, costs and expansions are taken over successful trials
//! only; failed trials count towards the success and timeout rates.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::scenario::BenchError;

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub map: String,
    pub preset: String,
    pub trial: usize,
    pub success: bool,
    pub timeout: bool,
    #[serde(rename = "T_i_ms")]
    pub t_i_ms: Option<f64>,
    #[serde(rename = "T_f_ms")]
    pub t_f_ms: Option<f64>,
    pub c_i: Option<f64>,
    pub c_f: Option<f64>,
    pub expansions: u64,
    pub iterations: u32,
}

/// One published solution on a convergence curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub bound: f64,
    pub cost: f64,
    pub time_ms: Option<f64>,
    pub expansions: u64,
}

/// A row plus its curve and, for failed runs, the reason.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub row: TrialRow,
    pub curve: Vec<CurvePoint>,
    pub error: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CurveLine {
    map: String,
    preset: String,
    trial: usize,
    points: Vec<CurvePoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    error: Option<String>,
}

fn io_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Io(e.to_string())
}

/// Writes the CSV, optionally preceded by `#`-prefixed header comment lines.
pub fn write_csv<W: Write>(mut out: W, comments: &[String], results: &[TrialResult]) -> Result<(), BenchError> {
    for c in comments {
        writeln!(out, "# {c}").map_err(io_err)?;
    }
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(&r.row).map_err(io_err)?;
    }
    if results.is_empty() {
        w.write_record([
            "map",
            "preset",
            "trial",
            "success",
            "timeout",
            "T_i_ms",
            "T_f_ms",
            "c_i",
            "c_f",
            "expansions",
            "iterations",
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads rows written by [`write_csv`]. Only the `#` lines before the
/// header are comments, so any map name survives the round trip.
pub fn read_csv<R: std::io::Read>(mut input: R) -> Result<Vec<TrialRow>, BenchError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(io_err)?;
    let mut start = 0;
    while bytes[start..].starts_with(b"#") {
        start += bytes[start..].iter().position(|&b| b == b'\n').map_or(bytes.len() - start, |i| i + 1);
    }
    let mut r = csv::Reader::from_reader(&bytes[start..]);
    r.deserialize().map(|row| row.map_err(io_err)).collect()
}

pub fn write_curves<W: Write>(mut out: W, results: &[TrialResult]) -> Result<(), BenchError> {
    for r in results {
        let line = CurveLine {
            map: r.row.map.clone(),
            preset: r.row.preset.clone(),
            trial: r.row.trial,
            points: r.curve.clone(),
            error: r.error.clone(),
        };
        serde_json::to_writer(&mut out, &line).map_err(io_err)?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    Ok(())
}

/// Convergence curves keyed by `(map, preset, trial)`.
pub type Curves = BTreeMap<(String, String, usize), Vec<CurvePoint>>;

/// `(map, preset, trial) -> points` from a JSON-lines curve file. Lines
/// starting with `#` are comments.
pub fn read_curves<R: BufRead>(input: R) -> Result<Curves, BenchError> {
    let mut out = BTreeMap::new();
    for line in input.lines() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let c: CurveLine = serde_json::from_str(&line).map_err(io_err)?;
        out.insert((c.map, c.preset, c.trial), c.points);
    }
    Ok(out)
}

/// Mean and sample standard deviation; `None` when empty.
pub fn mean_sd(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Some((mean, var.sqrt()))
}

/// Aggregates for one `(map, preset)` group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub map: String,
    pub preset: String,
    pub trials: usize,
    pub success_pct: f64,
    pub timeout_pct: f64,
    pub t_i_ms: Option<(f64, f64)>,
    pub t_f_ms: Option<(f64, f64)>,
    pub c_i: Option<(f64, f64)>,
    pub c_f: Option<(f64, f64)>,
    pub expansions: Option<(f64, f64)>,
    /// Mean of each metric divided by the AMRA* mean on the same map, in
    /// the order `T_i, T_f, c_i, c_f, expansions`.
    pub ratios: [Option<f64>; 5],
}

type Metric<'a> = &'a dyn Fn(&TrialRow) -> Option<f64>;

/// Groups rows by `(map, preset)` in first-appearance order.
pub fn summarize(rows: &[TrialRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), Vec<&TrialRow>> = BTreeMap::new();
    for r in rows {
        let k = (r.map.clone(), r.preset.clone());
        if !groups.contains_key(&k) {
            order.push(k.clone());
        }
        groups.entry(k).or_default().push(r);
    }
    let stat = |g: &[&TrialRow], f: &dyn Fn(&TrialRow) -> Option<f64>| {
        mean_sd(&g.iter().filter(|r| r.success).filter_map(|r| f(r)).collect::<Vec<_>>())
    };
    let metrics: [Metric; 5] = [&|r| r.t_i_ms, &|r| r.t_f_ms, &|r| r.c_i, &|r| r.c_f, &|r| Some(r.expansions as f64)];
    let means = |g: &[&TrialRow]| metrics.map(|m| stat(g, m));
    let mut out = Vec::new();
    for k in order {
        let g = &groups[&k];
        let n = g.len();
        let m = means(g);
        let base = groups.get(&(k.0.clone(), "amra".to_string())).map(|b| means(b));
        let mut ratios = [None; 5];
        if let Some(base) = base {
            for i in 0..5 {
                if let (Some((a, _)), Some((b, _))) = (m[i], base[i]) {
                    if b != 0.0 {
                        ratios[i] = Some(a / b);
                    }
                }
            }
        }
        out.push(SummaryRow {
            map: k.0.clone(),
            preset: k.1.clone(),
            trials: n,
            success_pct: 100.0 * g.iter().filter(|r| r.success).count() as f64 / n as f64,
            timeout_pct: 100.0 * g.iter().filter(|r| r.timeout).count() as f64 / n as f64,
            t_i_ms: m[0],
            t_f_ms: m[1],
            c_i: m[2],
            c_f: m[3],
            expansions: m[4],
            ratios,
        });
    }
    out
}

fn cell(v: Option<(f64, f64)>) -> String {
    v.map_or_else(|| "-".to_string(), |(m, s)| format!("{m:.2} ± {s:.2}"))
}

fn ratio(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |r| format!("{r:.2}x"))
}

/// Human-readable table: raw numbers for `amra`, ratios for the others.
pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut s = String::from("map\tpreset\ttrials\tsuccess%\ttimeout%\tT_i_ms\tT_f_ms\tc_i\tc_f\texpansions\n");
    for r in rows {
        let cols: Vec<String> = if r.preset == "amra" || r.ratios.iter().all(Option::is_none) {
            vec![cell(r.t_i_ms), cell(r.t_f_ms), cell(r.c_i), cell(r.c_f), cell(r.expansions)]
        } else {
            r.ratios.iter().map(|&x| ratio(x)).collect()
        };
        s.push_str(&format!(
            "{}\t{}\t{}\t{:.0}\t{:.0}\t{}\n",
            r.map,
            r.preset,
            r.trials,
            r.success_pct,
            r.timeout_pct,
            cols.join("\t")
        ));
    }
    s
}
