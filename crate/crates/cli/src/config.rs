//! Flat JSON run configuration. Every key is optional; command-line flags
//! override the matching keys.
//!
//! ```json
//! {
//!   "objective": "random_quadratic",
//!   "n": 4,
//!   "set": "budget_box",
//!   "budget": 2.0,
//!   "algorithm": "sdrfw",
//!   "mu": 1.0,
//!   "L": "auto",
//!   "K": "auto",
//!   "seed": 7
//! }
//! ```

use std::path::{Path, PathBuf};

use drsub::objectives::{AnyObjective, QuadraticObjective, StabilityObjective};
use drsub::sets::{AnySet, BoxSet, BudgetBoxSet, SimplexSet};
use drsub::smoothness::SmoothnessMode;
use drsub::{DenseVector, SplitRng, SymMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::experiments::{random_centered_quadratic, random_monotone_quadratic, OnlineConfig, OnlineRule, StartPoint};
use crate::graph_io::{parse_graph, GraphFormat};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_STABILITY_ITERATIONS: usize = 50;

/// A number or the string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr<T> {
    Value(T),
    Auto(Auto),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

impl<T: Copy> AutoOr<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            AutoOr::Value(v) => Some(*v),
            AutoOr::Auto(_) => None,
        }
    }
}

/// `"zero"`, `"uniform"`, or an explicit point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartSpec {
    Named(StartName),
    Point(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartName {
    Zero,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Explicit `hessian`, `linear`, `offset`.
    Quadratic,
    /// Seeded monotone quadratic with strong parameter `mu` on the set's box.
    RandomQuadratic,
    /// Seeded `(½x − 1)ᵀHx` with entries in `[−10, −5)`.
    CenteredQuadratic,
    /// Stability objective of the graph at `graph`.
    Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Box,
    Simplex,
    BudgetBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Sdrfw,
    Fw,
    Pga,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    StronglyConvex,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hessian: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_format: Option<String>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<SetKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<AlgorithmKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<AutoOr<f64>>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<AutoOr<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1: Option<StartSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,

    /// Runs the SDRFW / Frank-Wolfe / PGA comparison table instead of a single trace.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,

    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_stream: Option<bool>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or(OutputFormat::Csv)
    }

    pub fn mode(&self) -> Result<Option<SmoothnessMode>> {
        self.mode.as_deref().map(|m| m.parse::<SmoothnessMode>().map_err(CliError::from)).transpose()
    }

    pub fn graph_format(&self) -> Result<GraphFormat> {
        self.graph_format.as_deref().unwrap_or("edgelist").parse()
    }

    fn require_n(&self) -> Result<usize> {
        self.n
            .or(self.linear.as_ref().map(Vec::len))
            .or(self.hessian.as_ref().map(Vec::len))
            .or(self.upper.as_ref().map(Vec::len))
            .ok_or_else(|| CliError::Config("dimension unknown: set \"n\"".into()))
    }

    /// The configured set; defaults to the unit box.
    pub fn build_set(&self, n: usize) -> Result<AnySet<f64>> {
        let upper = match &self.upper {
            Some(u) => DenseVector::new(u.clone())?,
            None => DenseVector::ones(n),
        };
        let set: AnySet<f64> = match self.set.unwrap_or(SetKind::Box) {
            SetKind::Box => {
                let lower = match &self.lower {
                    Some(l) => DenseVector::new(l.clone())?,
                    None => DenseVector::zeros(n),
                };
                BoxSet::new(lower, upper)?.into()
            }
            SetKind::Simplex => SimplexSet::new(n, self.radius.unwrap_or(1.0))?.into(),
            SetKind::BudgetBox => {
                let budget = self.budget.ok_or_else(|| CliError::Config("budget_box needs \"budget\"".into()))?;
                BudgetBoxSet::new(budget, upper)?.into()
            }
        };
        let dim = set.as_dyn().dim();
        if dim != n {
            return Err(drsub::Error::DimensionMismatch { expected: n, found: dim }.into());
        }
        Ok(set)
    }

    /// Objective and set. Random objectives draw from `seed`.
    pub fn build_problem(&self) -> Result<(AnyObjective<f64>, AnySet<f64>)> {
        match self.objective.unwrap_or(ObjectiveKind::Quadratic) {
            ObjectiveKind::Quadratic => {
                let n = self.require_n()?;
                let h = match &self.hessian {
                    Some(rows) => SymMatrix::from_rows(rows)?,
                    None => SymMatrix::zeros(n),
                };
                let linear = match &self.linear {
                    Some(v) => DenseVector::new(v.clone())?,
                    None => DenseVector::zeros(n),
                };
                let obj = QuadraticObjective::new(h, linear, self.offset.unwrap_or(0.0))?;
                Ok((AnyObjective::Quadratic(obj), self.build_set(n)?))
            }
            ObjectiveKind::RandomQuadratic => {
                let n = self.require_n()?;
                let set = self.build_set(n)?;
                let mut rng = SplitRng::new(self.seed());
                let upper = set.as_dyn().upper_corner();
                let obj = random_monotone_quadratic(n, self.mu.unwrap_or(1.0), &upper, &mut rng)?;
                Ok((AnyObjective::Quadratic(obj), set))
            }
            ObjectiveKind::CenteredQuadratic => {
                let n = self.require_n()?;
                let mut rng = SplitRng::new(self.seed());
                let obj = random_centered_quadratic(n, -10.0, -5.0, &mut rng)?;
                Ok((AnyObjective::Quadratic(obj), self.build_set(n)?))
            }
            ObjectiveKind::Stability => {
                let path = self.graph.as_ref().ok_or_else(|| CliError::Config("stability needs \"graph\"".into()))?;
                let graph = parse_graph(path, self.graph_format()?)?;
                let n = graph.vertex_count();
                let set = match self.set {
                    None => SimplexSet::standard(n)?.into(),
                    Some(_) => self.build_set(n)?,
                };
                Ok((AnyObjective::Stability(StabilityObjective::new(&graph)?), set))
            }
        }
    }

    pub fn start_point(&self, set: &AnySet<f64>) -> Result<DenseVector<f64>> {
        let set = set.as_dyn();
        let n = set.dim();
        match self.x1.as_ref().unwrap_or(&StartSpec::Named(StartName::Zero)) {
            StartSpec::Named(StartName::Zero) => Ok(DenseVector::zeros(n)),
            StartSpec::Named(StartName::Uniform) => {
                let u = set.upper_corner();
                Ok(set.project(&u.scale(1.0 / n as f64))?)
            }
            StartSpec::Point(p) => Ok(DenseVector::new(p.clone())?),
        }
    }

    pub fn stability_start(&self) -> StartPoint {
        match &self.x1 {
            Some(StartSpec::Point(p)) => StartPoint::Custom(p.clone()),
            _ => StartPoint::Uniform,
        }
    }

    pub fn online(&self) -> Result<OnlineConfig> {
        let rule = match self.rule.unwrap_or(RuleKind::StronglyConvex) {
            RuleKind::StronglyConvex => OnlineRule::StronglyConvex,
            RuleKind::Fixed => OnlineRule::Fixed,
        };
        let mu = self.mu.unwrap_or(match rule {
            OnlineRule::StronglyConvex => 1.0,
            OnlineRule::Fixed => 0.0,
        });
        Ok(OnlineConfig {
            n: self.n.unwrap_or(3),
            horizon: self.horizon.unwrap_or(1000),
            mu,
            rule,
            seed: self.seed(),
            constant: self.constant_stream.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_and_numbers_parse() {
        let c = RunConfig::from_json(r#"{"L": "auto", "K": 12, "x1": "uniform", "mu": 2}"#).unwrap();
        assert_eq!(c.l, Some(AutoOr::Auto(Auto::Auto)));
        assert_eq!(c.k.and_then(|k| k.value()), Some(12));
        assert_eq!(c.x1, Some(StartSpec::Named(StartName::Uniform)));
        let c = RunConfig::from_json(r#"{"L": 3.5, "x1": [0.1, 0.2]}"#).unwrap();
        assert_eq!(c.l.and_then(|l| l.value()), Some(3.5));
        assert_eq!(c.x1, Some(StartSpec::Point(vec![0.1, 0.2])));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"objectiv": "quadratic"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"L": "sometimes"}"#).is_err());
    }

    #[test]
    fn explicit_quadratic_builds() {
        let c = RunConfig::from_json(
            r#"{"hessian": [[-2, -1], [-1, -2]], "linear": [3, 3], "set": "budget_box", "budget": 1}"#,
        )
        .unwrap();
        let (obj, set) = c.build_problem().unwrap();
        assert_eq!(obj.as_dyn().dim(), 2);
        assert!(set.as_dyn().contains(&DenseVector::from_f64_slice(&[0.5, 0.5]).unwrap(), 0.0));
    }

    #[test]
    fn echo_round_trips() {
        let c = RunConfig::from_json(r#"{"objective": "random_quadratic", "n": 3, "seed": 9, "T": 5}"#).unwrap();
        let again = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }
}
