//! CSV and JSON writers. CSV floats use 17 significant digits; JSON uses the
//! shortest representation that parses back to the same bits.

use std::fmt::Write as _;
use std::path::Path;

use drsub::algorithms::Trace;
use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, Result};
use crate::experiments::{ExperimentRow, OnlineRun, StabilityRun};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub f_value: f64,
    pub estimate: Option<f64>,
    pub elapsed_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterate: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub s: f64,
    pub algorithm: String,
    pub final_value: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub mu: f64,
    pub c_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineRow {
    pub t: usize,
    pub reward: f64,
    pub cumulative_regret: f64,
    pub bound: f64,
    pub elapsed_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rows", rename_all = "lowercase")]
pub enum Rows {
    Trace(Vec<TraceRow>),
    Table(Vec<TableRow>),
    Online(Vec<OnlineRow>),
}

/// Everything written by one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub seed: u64,
    pub config: RunConfig,
    #[serde(flatten)]
    pub rows: Rows,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub summary: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RowOptions {
    pub dump_iterates: bool,
    pub timing: bool,
}

pub fn trace_rows(trace: &Trace<f64>, options: RowOptions) -> Vec<TraceRow> {
    (0..trace.len())
        .map(|i| TraceRow {
            iter: trace.step_index[i],
            f_value: trace.values[i],
            estimate: None,
            elapsed_s: options.timing.then(|| trace.elapsed[i]),
            iterate: options.dump_iterates.then(|| trace.iterates[i].to_f64_vec()),
        })
        .collect()
}

pub fn stability_rows(run: &StabilityRun, n: usize, options: RowOptions) -> Vec<TraceRow> {
    let iterates = options.dump_iterates.then(|| run.iterates(n));
    (0..run.estimates.len())
        .map(|k| TraceRow {
            iter: k,
            f_value: run.values[k],
            estimate: Some(run.estimates[k]),
            elapsed_s: options.timing.then(|| {
                run.components.iter().map(|c| c.trace.elapsed[k]).sum()
            }),
            iterate: iterates.as_ref().map(|it| it[k].clone()),
        })
        .collect()
}

pub fn table_rows(rows: &[ExperimentRow]) -> Vec<TableRow> {
    rows.iter()
        .map(|r| TableRow {
            s: r.s,
            algorithm: r.algorithm.clone(),
            final_value: r.final_value,
            k: r.k,
            l: r.l,
            mu: r.mu,
            c_f: r.c_f,
        })
        .collect()
}

pub fn online_rows(run: &OnlineRun, options: RowOptions) -> Vec<OnlineRow> {
    (0..run.trace.len())
        .map(|i| OnlineRow {
            t: i + 1,
            reward: run.trace.values[i],
            cumulative_regret: run.regrets[i],
            bound: run.bounds[i],
            elapsed_s: options.timing.then(|| run.trace.elapsed[i]),
        })
        .collect()
}

fn num(out: &mut String, v: f64) {
    if v.is_finite() {
        let _ = write!(out, "{v:.16e}");
    } else {
        let _ = write!(out, "{v}");
    }
}

fn opt_num(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        num(out, v);
    }
}

pub fn to_csv(rows: &Rows) -> String {
    let mut out = String::new();
    match rows {
        Rows::Trace(rows) => {
            let with_iterates = rows.iter().any(|r| r.iterate.is_some());
            out.push_str("iter,f_value,estimate,elapsed_s");
            out.push_str(if with_iterates { ",iterate\n" } else { "\n" });
            for r in rows {
                let _ = write!(out, "{},", r.iter);
                num(&mut out, r.f_value);
                out.push(',');
                opt_num(&mut out, r.estimate);
                out.push(',');
                opt_num(&mut out, r.elapsed_s);
                if with_iterates {
                    out.push(',');
                    for (j, &v) in r.iterate.iter().flatten().enumerate() {
                        if j > 0 {
                            out.push(';');
                        }
                        num(&mut out, v);
                    }
                }
                out.push('\n');
            }
        }
        Rows::Table(rows) => {
            out.push_str("s,algorithm,final_value,K,L,mu,c_f\n");
            for r in rows {
                num(&mut out, r.s);
                let _ = write!(out, ",{},", r.algorithm);
                num(&mut out, r.final_value);
                let _ = write!(out, ",{},", r.k);
                num(&mut out, r.l);
                out.push(',');
                num(&mut out, r.mu);
                out.push(',');
                opt_num(&mut out, r.c_f);
                out.push('\n');
            }
        }
        Rows::Online(rows) => {
            out.push_str("t,reward,cumulative_regret,bound,elapsed_s\n");
            for r in rows {
                let _ = write!(out, "{},", r.t);
                num(&mut out, r.reward);
                out.push(',');
                num(&mut out, r.cumulative_regret);
                out.push(',');
                num(&mut out, r.bound);
                out.push(',');
                opt_num(&mut out, r.elapsed_s);
                out.push('\n');
            }
        }
    }
    out
}

pub fn render(output: &Output, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Csv => to_csv(&output.rows),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(output)?;
            s.push('\n');
            s
        }
    })
}

/// Writes to `path`, or stdout when `path` is `None`.
pub fn emit(output: &Output, format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let text = render(output, format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => write_stdout(&text),
    }
}

pub fn write_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
}

pub fn read_json(path: &Path) -> Result<Output> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn output(rows: Rows) -> Output {
        Output { seed: 3, config: RunConfig::default(), rows, summary: Default::default() }
    }

    fn row(i: usize, v: f64) -> TraceRow {
        TraceRow { iter: i, f_value: v, estimate: None, elapsed_s: None, iterate: None }
    }

    #[test]
    fn empty_trace_is_header_only() {
        assert_eq!(to_csv(&Rows::Trace(vec![])), "iter,f_value,estimate,elapsed_s\n");
    }

    #[test]
    fn three_steps_three_rows() {
        let csv = to_csv(&Rows::Trace(vec![row(0, 0.0), row(1, 0.5), row(2, 0.75)]));
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv.lines().nth(2).unwrap(), "1,5.0000000000000000e-1,,");
    }

    #[test]
    fn csv_floats_round_trip() {
        let v = 0.1 + 0.2;
        let csv = to_csv(&Rows::Trace(vec![row(0, v)]));
        let field = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap();
        assert_eq!(field.parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let values = [std::f64::consts::PI, 1.0 / 3.0, 1e-300, -2.5e17, 0.1 + 0.2];
        let rows: Vec<TraceRow> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| TraceRow { iterate: Some(vec![v, -v]), estimate: Some(v / 7.0), ..row(i, v) })
            .collect();
        let out = output(Rows::Trace(rows));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        emit(&out, OutputFormat::Json, Some(&path)).unwrap();
        let back = read_json(&path).unwrap();
        assert_eq!(back, out);
    }

    #[test]
    fn table_json_keeps_column_names() {
        let out = output(Rows::Table(vec![TableRow {
            s: 1.0,
            algorithm: "sdrfw".into(),
            final_value: 2.0,
            k: 3,
            l: 4.0,
            mu: 5.0,
            c_f: None,
        }]));
        let json: serde_json::Value = serde_json::from_str(&render(&out, OutputFormat::Json).unwrap()).unwrap();
        assert_eq!(json["kind"], "table");
        assert_eq!(json["rows"][0]["K"], 3);
        assert_eq!(json["seed"], 3);
    }

    #[test]
    fn io_errors_carry_the_path() {
        let out = output(Rows::Trace(vec![]));
        let err = emit(&out, OutputFormat::Csv, Some(Path::new("/nonexistent/dir/out.csv"))).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/out.csv"));
    }
}
