//! Command-line surface. Flags override the matching config keys.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use drsub::algorithms::{fw_baseline, pga, sdrfw, sdrfw_iterations};
use drsub::smoothness::{smoothness_constant, SmoothnessMode};
use drsub::Objective;
use serde_json::{json, Map, Value};

use crate::config::{AlgorithmKind, OutputFormat, RunConfig, StartSpec, DEFAULT_STABILITY_ITERATIONS};
use crate::emit::{emit, write_stdout, online_rows, stability_rows, table_rows, trace_rows, Output, RowOptions, Rows};
use crate::error::{CliError, Result};
use crate::experiments::{run_online, run_quadratic_experiment, run_stability};
use crate::families::{family_curvature, run_suites, shipped_families, SuiteResult};
use crate::graph_io::parse_graph;

pub const DEFAULT_QUADRATIC_N: usize = 25;
pub const CHECK_SAMPLES: usize = 500;

#[derive(Debug, Parser)]
#[command(name = "drsub", version, about = "Maximize monotone strongly DR-submodular functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one algorithm on a configured problem, or the SDRFW / Frank-Wolfe /
    /// PGA comparison when the config lists `s_values`.
    Maximize(Common),
    /// Estimate the stability number of a graph with PGA.
    Stability(StabilityArgs),
    /// Print the smoothness constant of the configured problem as JSON.
    Smoothness(Common),
    /// Online gradient ascent on a seeded stream of quadratics.
    Online(Common),
    /// Run the sampled property suites on the configured problem, or on every
    /// shipped objective family.
    Check(Common),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    #[arg(long, value_parser = ["constant", "corner", "gp"])]
    pub mode: Option<String>,
    /// Add each iterate to the trace output.
    #[arg(long)]
    pub dump_iterates: bool,
    /// Record wall-clock time per step (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value = "edgelist", value_parser = ["edgelist", "dimacs"])]
    pub graph_format: String,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// `uniform` or a comma-separated starting point.
    #[arg(long)]
    pub x1: Option<String>,
}

impl Common {
    /// Loads the config file (if any) and applies the flag overrides.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = Some(seed);
        }
        if let Some(out) = &self.out {
            config.output = Some(out.clone());
        }
        if let Some(f) = &self.format {
            config.format = Some(if f == "json" { OutputFormat::Json } else { OutputFormat::Csv });
        }
        if let Some(m) = &self.mode {
            config.mode = Some(m.clone());
        }
        Ok(config)
    }

    fn row_options(&self) -> RowOptions {
        RowOptions { dump_iterates: self.dump_iterates, timing: self.timing }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Maximize(c) => maximize(&c),
        Command::Stability(a) => stability(&a),
        Command::Smoothness(c) => smoothness(&c),
        Command::Online(c) => online(&c),
        Command::Check(c) => check(&c),
    }
}

fn write(config: RunConfig, rows: Rows, summary: Map<String, Value>) -> Result<()> {
    let format = config.format();
    let path = config.output.clone();
    let output = Output { seed: config.seed(), config, rows, summary };
    emit(&output, format, path.as_deref())
}

fn default_mode(obj: &dyn Objective<f64>) -> SmoothnessMode {
    if obj.hessian_is_constant() {
        SmoothnessMode::Constant
    } else {
        SmoothnessMode::Corner
    }
}

fn maximize(common: &Common) -> Result<()> {
    let config = common.resolve()?;
    if let Some(s_values) = &config.s_values {
        let n = config.n.unwrap_or(DEFAULT_QUADRATIC_N);
        let table = run_quadratic_experiment(n, s_values, config.seed())?;
        let mut summary = Map::new();
        summary.insert(
            "monotone".into(),
            json!(table
                .monotonicity
                .iter()
                .map(|m| json!({"s": m.s, "passed": m.passed, "min_derivative": m.min_derivative}))
                .collect::<Vec<_>>()),
        );
        return write(config, Rows::Table(table_rows(&table.rows)), summary);
    }

    let (objective, set) = config.build_problem()?;
    let (obj, set_ref) = (objective.as_dyn(), set.as_dyn());
    let mu = config.mu.unwrap_or_else(|| obj.strong_dr_param());
    let mode = config.mode()?.unwrap_or_else(|| default_mode(obj));
    let l = match config.l.and_then(|l| l.value()) {
        Some(l) => l,
        None => smoothness_constant(obj, set_ref, mode)?.l,
    };
    let k = match config.k.and_then(|k| k.value()) {
        Some(k) => k,
        None if mu > 0.0 => sdrfw_iterations(l, mu),
        None => return Err(CliError::Config("\"K\": \"auto\" needs μ > 0".into())),
    };
    let algorithm = config.algorithm.unwrap_or(AlgorithmKind::Sdrfw);
    let trace = match algorithm {
        AlgorithmKind::Sdrfw => sdrfw(obj, set_ref, mu, l, Some(k))?,
        AlgorithmKind::Fw => fw_baseline(obj, set_ref, k)?,
        AlgorithmKind::Pga => pga(obj, set_ref, &config.start_point(&set)?, l, k)?,
    };
    let mut summary = Map::new();
    summary.insert("algorithm".into(), json!(trace.meta.algorithm));
    summary.insert("K".into(), json!(k));
    summary.insert("L".into(), json!(l));
    summary.insert("mu".into(), json!(mu));
    summary.insert("c_f".into(), json!(family_curvature(obj, set_ref)));
    summary.insert("final_value".into(), json!(trace.final_value()));
    write(config, Rows::Trace(trace_rows(&trace, common.row_options())), summary)
}

fn stability(args: &StabilityArgs) -> Result<()> {
    let mut config = args.common.resolve()?;
    if let Some(g) = &args.graph {
        config.graph = Some(g.clone());
        config.graph_format = Some(args.graph_format.clone());
    }
    if let Some(it) = args.iterations {
        config.iterations = Some(it);
    }
    if let Some(x1) = &args.x1 {
        config.x1 = Some(if x1 == "uniform" {
            StartSpec::Named(crate::config::StartName::Uniform)
        } else {
            let point = x1
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad --x1 entry '{t}'"))))
                .collect::<Result<Vec<_>>>()?;
            StartSpec::Point(point)
        });
    }
    let path = config.graph.clone().ok_or_else(|| CliError::Config("stability needs --graph".into()))?;
    let graph = parse_graph(&path, config.graph_format()?)?;
    let iterations = config.iterations.unwrap_or(DEFAULT_STABILITY_ITERATIONS);
    let mode = config.mode()?.unwrap_or(SmoothnessMode::Constant);
    let run = run_stability(&graph, iterations, &config.stability_start(), mode)?;
    let mut summary = Map::new();
    summary.insert("vertices".into(), json!(graph.vertex_count()));
    summary.insert("edges".into(), json!(graph.edge_count()));
    summary.insert("components".into(), json!(run.components.len()));
    summary.insert("L".into(), json!(run.components.iter().map(|c| c.l).collect::<Vec<_>>()));
    summary.insert("final_estimate".into(), json!(run.estimates.last()));
    summary.insert("min_sampled_value".into(), json!(run.min_sampled_value));
    let rows = stability_rows(&run, graph.vertex_count(), args.common.row_options());
    write(config, Rows::Trace(rows), summary)
}

fn smoothness(common: &Common) -> Result<()> {
    let config = common.resolve()?;
    let (objective, set) = config.build_problem()?;
    let obj = objective.as_dyn();
    let mode = config.mode()?.unwrap_or_else(|| default_mode(obj));
    let est = smoothness_constant(obj, set.as_dyn(), mode)?;
    let mut text = serde_json::to_string_pretty(&json!({
        "L": est.l,
        "mode": est.mode.to_string(),
        "residual": est.residual,
        "iterations": est.iterations,
    }))?;
    text.push('\n');
    match &config.output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => write_stdout(&text),
    }
}

fn online(common: &Common) -> Result<()> {
    let config = common.resolve()?;
    let run = run_online(&config.online()?)?;
    let mut summary = Map::new();
    summary.insert("alpha".into(), json!(run.alpha));
    summary.insert("c".into(), json!(run.c));
    summary.insert("beta".into(), json!(run.beta));
    summary.insert("R".into(), json!(run.r));
    summary.insert("opt_point".into(), json!(run.opt_point.to_f64_vec()));
    let rows = online_rows(&run, common.row_options());
    write(config, Rows::Online(rows), summary)
}

fn check(common: &Common) -> Result<()> {
    let config = common.resolve()?;
    let seed = config.seed();
    let mut results: Vec<SuiteResult> = Vec::new();
    if config.objective.is_some() || config.hessian.is_some() {
        let (objective, set) = config.build_problem()?;
        results.extend(run_suites(objective.as_dyn().name(), &objective, set.as_dyn(), CHECK_SAMPLES, seed)?);
    } else {
        for fam in shipped_families(seed)? {
            results.extend(run_suites(fam.name, &fam.objective, fam.set(), CHECK_SAMPLES, seed)?);
        }
    }
    let mut text = serde_json::to_string_pretty(&json!({ "seed": seed, "results": results }))?;
    text.push('\n');
    match &config.output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e))?,
        None => write_stdout(&text)?,
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| r.applicable && !r.passed)
        .map(|r| format!("{}/{}", r.family, r.suite))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("failed suites: {}", failed.join(", "))))
    }
}

/// Renders an error as the JSON written to stderr.
pub fn error_json(err: &CliError) -> String {
    json!({ "error": err.kind(), "message": err.to_string() }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"seed": 1, "format": "csv", "mode": "gp"}"#).unwrap();
        let common = Common {
            config: Some(path),
            seed: Some(9),
            format: Some("json".into()),
            ..Default::default()
        };
        let c = common.resolve().unwrap();
        assert_eq!(c.seed(), 9);
        assert_eq!(c.format(), OutputFormat::Json);
        assert_eq!(c.mode.as_deref(), Some("gp"));
    }

    #[test]
    fn error_json_is_machine_readable() {
        let v: Value = serde_json::from_str(&error_json(&CliError::Config("x".into()))).unwrap();
        assert_eq!(v["error"], "config");
    }
}
