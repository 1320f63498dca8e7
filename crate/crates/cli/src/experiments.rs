//! The three experiment drivers plus the seeded instance generators they share
//! with the test suites.

use drsub::algorithms::{
    alpha_regret_prefixes, fw_baseline, oga, oga_regret_bound_fixed, oga_regret_bound_strong, pga, sdrfw,
    sdrfw_iterations, StepRule, Trace,
};
use drsub::objectives::{curvature, QuadraticObjective, StabilityObjective};
use drsub::oracles::{monotonicity_check, reference_maximum, sample_feasible};
use drsub::sets::{BoxSet, BudgetBoxSet, FeasibleSet, SimplexSet};
use drsub::smoothness::{smoothness_constant, SmoothnessMode};
use drsub::{DenseVector, Graph, Objective, SplitRng, SymMatrix};

use crate::error::{CliError, Result};

/// Fig.-1-style random quadratic `(½x − 1)ᵀHx` with `Hᵢⱼ ~ U[low, high)`,
/// drawn row by row.
pub fn random_centered_quadratic(n: usize, low: f64, high: f64, rng: &mut SplitRng) -> Result<QuadraticObjective<f64>> {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.uniform(low, high)).collect()).collect();
    Ok(QuadraticObjective::from_centered_form(&rows)?)
}

/// Monotone DR-submodular quadratic with `f(0) = 0`: off-diagonal Hessian
/// entries in `[−2, 0)`, diagonal in `[−(μ + 3), −μ)` (or zero when `μ = 0`),
/// and linear term `−H·ū + slack` so that `∇f(ū) = slack ≻ 0`.
pub fn random_monotone_quadratic(
    n: usize,
    mu: f64,
    upper: &DenseVector<f64>,
    rng: &mut SplitRng,
) -> Result<QuadraticObjective<f64>> {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        rows[i][i] = if mu > 0.0 { -rng.uniform(mu, mu + 3.0) } else { 0.0 };
        for j in (i + 1)..n {
            let v = -rng.uniform(0.0, 2.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    let h = SymMatrix::from_rows(&rows)?;
    let hu = h.mul_vec(upper)?;
    let linear = DenseVector::from_fn(n, |i| -hu[i] + rng.uniform(0.1, 1.0));
    Ok(QuadraticObjective::new(h, linear, 0.0)?)
}

/// Default `L`: the constant mode when the Hessian does not vary, else the
/// box-corner bound.
pub fn auto_smoothness(obj: &dyn Objective<f64>, set: &dyn FeasibleSet<f64>) -> Result<f64> {
    let mode = if obj.hessian_is_constant() { SmoothnessMode::Constant } else { SmoothnessMode::Corner };
    Ok(smoothness_constant(obj, set, mode)?.l)
}

// ---------------------------------------------------------------------------
// Quadratic experiment

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub s: f64,
    pub algorithm: String,
    pub final_value: f64,
    pub k: usize,
    pub l: f64,
    pub mu: f64,
    pub c_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityOutcome {
    pub s: f64,
    pub passed: bool,
    pub min_derivative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
    pub monotonicity: Vec<MonotonicityOutcome>,
}

pub const QUADRATIC_MU: f64 = 5.0;

/// Runs SDRFW, Frank-Wolfe and PGA (from `0`) with `K = ⌈L/μ⌉` on one
/// seeded random quadratic over `{1ᵀx ≤ s, 0 ⪯ x ⪯ 1}` for each `s`.
/// Rows are sorted by `s`, then algorithm name.
pub fn run_quadratic_experiment(n: usize, s_values: &[f64], seed: u64) -> Result<ExperimentTable> {
    let mut rng = SplitRng::new(seed);
    let obj = random_centered_quadratic(n, -10.0, -5.0, &mut rng)?;
    let mu = QUADRATIC_MU;
    let mut s_sorted = s_values.to_vec();
    s_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite budgets"));
    let mut rows = Vec::new();
    let mut monotonicity = Vec::new();
    for (idx, &s) in s_sorted.iter().enumerate() {
        let set = BudgetBoxSet::unit_capped(n, s)?;
        let l = smoothness_constant(&obj, &set, SmoothnessMode::Constant)?.l;
        let k = sdrfw_iterations(l, mu);
        let c_f = curvature(&obj, &set).ok();
        let runs = [
            ("fw", fw_baseline(&obj, &set, k)?),
            ("pga", pga(&obj, &set, &DenseVector::zeros(n), l, k)?),
            ("sdrfw", sdrfw(&obj, &set, mu, l, Some(k))?),
        ];
        for (name, trace) in runs {
            rows.push(ExperimentRow {
                s,
                algorithm: name.to_string(),
                final_value: trace.final_value().expect("nonempty trace"),
                k,
                l,
                mu,
                c_f,
            });
        }
        let report = monotonicity_check(&obj, &set, 200, seed ^ (idx as u64 + 1))?;
        monotonicity.push(MonotonicityOutcome { s, passed: report.passed(), min_derivative: report.min_derivative });
    }
    Ok(ExperimentTable { rows, monotonicity })
}

// ---------------------------------------------------------------------------
// Stability experiment

#[derive(Debug, Clone, PartialEq)]
pub enum StartPoint {
    /// `(1/n)·1` on each component.
    Uniform,
    /// Full-length point; each component's block is projected onto its simplex.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRun {
    /// 0-based vertex ids.
    pub vertices: Vec<usize>,
    pub l: f64,
    pub trace: Trace<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRun {
    pub components: Vec<ComponentRun>,
    /// Per iteration, `Σ_components 1/(2 − f_c(x_k))`.
    pub estimates: Vec<f64>,
    /// Per iteration, summed objective values.
    pub values: Vec<f64>,
    /// Smallest objective value over the trace and 200 sampled simplex points
    /// per component.
    pub min_sampled_value: f64,
}

impl StabilityRun {
    /// Iterates of the whole graph, assembled from the component blocks.
    pub fn iterates(&self, n: usize) -> Vec<Vec<f64>> {
        let steps = self.estimates.len();
        let mut out = vec![vec![0.0; n]; steps];
        for comp in &self.components {
            for (k, x) in comp.trace.iterates.iter().enumerate() {
                for (local, &v) in comp.vertices.iter().enumerate() {
                    out[k][v] = x[local];
                }
            }
        }
        out
    }
}

pub fn run_stability(graph: &Graph, iterations: usize, start: &StartPoint, mode: SmoothnessMode) -> Result<StabilityRun> {
    let n = graph.vertex_count();
    if n == 0 {
        return Err(CliError::Config("graph has no vertices".into()));
    }
    if let StartPoint::Custom(x) = start {
        if x.len() != n {
            return Err(drsub::Error::DimensionMismatch { expected: n, found: x.len() }.into());
        }
    }
    let mut rng = SplitRng::new(0x5EED);
    let mut components = Vec::new();
    let mut min_sampled_value = f64::INFINITY;
    for vertices in graph.components() {
        let sub = graph.induced(&vertices);
        let obj = StabilityObjective::<f64>::new(&sub)?;
        let set = SimplexSet::<f64>::standard(vertices.len())?;
        let l = smoothness_constant(&obj, &set, mode)?.l;
        let x1 = match start {
            StartPoint::Uniform => set.barycenter(),
            StartPoint::Custom(x) => set.project(&DenseVector::new(vertices.iter().map(|&v| x[v]).collect())?)?,
        };
        let trace = pga(&obj, &set, &x1, l, iterations)?;
        for &v in &trace.values {
            min_sampled_value = min_sampled_value.min(v);
        }
        for _ in 0..200 {
            if let Some(p) = sample_feasible(&obj, &set, &mut rng)? {
                min_sampled_value = min_sampled_value.min(obj.value(&p)?);
            }
        }
        components.push(ComponentRun { vertices, l, trace });
    }
    let steps = iterations + 1;
    let mut estimates = vec![0.0; steps];
    let mut values = vec![0.0; steps];
    for comp in &components {
        for (k, &f) in comp.trace.values.iter().enumerate() {
            estimates[k] += 1.0 / (2.0 - f);
            values[k] += f;
        }
    }
    Ok(StabilityRun { components, estimates, values, min_sampled_value })
}

// ---------------------------------------------------------------------------
// Online experiment

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OnlineRule {
    /// `η_t = 1/(μt)`.
    StronglyConvex,
    /// `η = R/(β√T)` on `μ = 0` streams.
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineConfig {
    pub n: usize,
    pub horizon: usize,
    /// Strong parameter of every streamed quadratic; `0` for plain DR streams.
    pub mu: f64,
    pub rule: OnlineRule,
    pub seed: u64,
    /// Repeat the first function `T` times instead of drawing fresh ones.
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineRun {
    pub trace: Trace<f64>,
    /// `α`-regret after each round, against the best fixed point for the
    /// whole horizon.
    pub regrets: Vec<f64>,
    /// Regret bound after each round.
    pub bounds: Vec<f64>,
    pub alpha: f64,
    pub c: f64,
    pub beta: f64,
    pub r: f64,
    pub opt_point: DenseVector<f64>,
}

/// Seeded stream of monotone quadratics on `[0, 1]ⁿ`.
pub fn online_stream(config: &OnlineConfig) -> Result<Vec<QuadraticObjective<f64>>> {
    let rng = SplitRng::new(config.seed);
    let upper = DenseVector::ones(config.n);
    let mut stream: Vec<QuadraticObjective<f64>> = Vec::with_capacity(config.horizon);
    for t in 0..config.horizon {
        if config.constant && t > 0 {
            stream.push(stream[0].clone());
            continue;
        }
        let mut child = rng.split(t as u64);
        stream.push(random_monotone_quadratic(config.n, config.mu, &upper, &mut child)?);
    }
    Ok(stream)
}

/// Runs OGA from the origin and measures `(1/(1+c))`-regret with
/// `c = max_t c_{f_t}` and `β = max_t ‖∇f_t(0)‖`, which bounds every
/// gradient norm on the box for monotone DR-submodular `f_t`.
pub fn run_online(config: &OnlineConfig) -> Result<OnlineRun> {
    if config.horizon == 0 {
        return Err(CliError::Config("horizon must be positive".into()));
    }
    let stream = online_stream(config)?;
    let set = BoxSet::unit(config.n);
    let origin = DenseVector::zeros(config.n);
    let mut c: f64 = 0.0;
    let mut beta: f64 = 0.0;
    for f in &stream {
        c = c.max(curvature(f, &set)?);
        beta = beta.max(f.gradient(&origin)?.norm2());
    }
    let r = set.diameter();
    let rule = match config.rule {
        OnlineRule::StronglyConvex => StepRule::strongly_convex(config.mu)?,
        OnlineRule::Fixed => StepRule::fixed(r, beta, config.horizon)?,
    };
    let refs: Vec<&dyn Objective<f64>> = stream.iter().map(|f| f as &dyn Objective<f64>).collect();
    let trace = oga(&refs, &set, &origin, rule)?;

    let total = stream[1..].iter().try_fold(stream[0].clone(), |acc, f| acc.plus(f))?;
    let opt_point = best_fixed_point(&total, &set)?;
    let alpha = 1.0 / (1.0 + c);
    let regrets = alpha_regret_prefixes(&trace, &refs, &set, alpha, &opt_point)?;
    let bounds = (1..=config.horizon)
        .map(|t| match config.rule {
            OnlineRule::StronglyConvex => oga_regret_bound_strong(beta, config.mu, c, t),
            OnlineRule::Fixed => oga_regret_bound_fixed(r, beta, c, config.horizon),
        })
        .collect();
    Ok(OnlineRun { trace, regrets, bounds, alpha, c, beta, r, opt_point })
}

/// The upper corner when the objective is nondecreasing there (hence
/// everywhere on the box, by order reversal); otherwise a polished grid search.
pub fn best_fixed_point(total: &QuadraticObjective<f64>, set: &BoxSet<f64>) -> Result<DenseVector<f64>> {
    let corner = set.upper_corner();
    if total.gradient(&corner)?.min_entry() >= 0.0 {
        return Ok(corner);
    }
    let l = auto_smoothness(total, set)?.max(1e-12);
    Ok(reference_maximum(total, set, 1.0 / 50.0, l, 200)?.point)
}
