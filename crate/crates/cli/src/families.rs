//! Seeded representatives of every shipped objective family, and the sampled
//! property suites run on them by `check`.

use drsub::objectives::{
    curvature, curvature_no_origin, AnyObjective, DiagonalTerm, Interaction, MeanFieldKLObjective,
    NegativeDependencePoly, StabilityObjective,
};
use drsub::oracles::{
    lemma1_check, lemma2_check, monotonicity_check, order_reversal_check, sampling_box, smoothness_check,
    InequalityReport,
};
use drsub::sets::{AnySet, BoxSet, BudgetBoxSet, FeasibleSet, SimplexSet};
use drsub::{DenseVector, Objective, SplitRng};
use serde::Serialize;

use crate::error::Result;
use crate::experiments::{auto_smoothness, random_monotone_quadratic};
use crate::graph_io::{parse_graph_str, GraphFormat, EXAMPLE_GRAPH};

#[derive(Debug, Clone)]
pub struct Family {
    pub name: &'static str,
    pub objective: AnyObjective<f64>,
    pub set: AnySet<f64>,
}

impl Family {
    pub fn obj(&self) -> &dyn Objective<f64> {
        self.objective.as_dyn()
    }

    pub fn set(&self) -> &dyn FeasibleSet<f64> {
        self.set.as_dyn()
    }
}

/// Curvature when the set contains the origin, the box-corner estimate
/// otherwise, and `1` when both are undefined.
pub fn family_curvature(obj: &dyn Objective<f64>, set: &dyn FeasibleSet<f64>) -> f64 {
    let c = if set.contains_origin() { curvature(obj, set) } else { curvature_no_origin(obj, set) };
    c.unwrap_or(1.0)
}

/// `L` from the smoothness subsystem, or the mean-field objective's own
/// Hessian bound, which has no posynomial form.
pub fn family_smoothness(obj: &AnyObjective<f64>, set: &dyn FeasibleSet<f64>) -> Result<f64> {
    match obj {
        AnyObjective::MeanField(kl) => Ok(kl.smoothness_bound()),
        other => auto_smoothness(other.as_dyn(), set),
    }
}

pub fn shipped_families(seed: u64) -> Result<Vec<Family>> {
    let rng = SplitRng::new(seed);
    let mut out = Vec::new();

    let set = BudgetBoxSet::unit_capped(4, 2.0)?;
    let q = random_monotone_quadratic(4, 1.0, &set.upper_corner(), &mut rng.split(0))?;
    out.push(Family { name: "quadratic", objective: AnyObjective::Quadratic(q), set: set.into() });

    let graph = parse_graph_str(EXAMPLE_GRAPH, GraphFormat::EdgeList)?;
    out.push(Family {
        name: "stability",
        objective: AnyObjective::Stability(StabilityObjective::new(&graph)?),
        set: SimplexSet::standard(graph.vertex_count())?.into(),
    });

    let mut r = rng.split(1);
    let diagonal = (0..4).map(|_| DiagonalTerm::Quadratic { a: r.uniform(4.0, 6.0), b: r.uniform(0.5, 1.5) }).collect();
    let interactions = vec![
        Interaction { indices: vec![0, 1], theta: -r.uniform(0.1, 0.5) },
        Interaction { indices: vec![1, 2, 3], theta: -r.uniform(0.1, 0.5) },
        Interaction { indices: vec![0, 2], theta: -r.uniform(0.1, 0.5) },
    ];
    out.push(Family {
        name: "negative_dependence",
        objective: AnyObjective::NegativeDependence(NegativeDependencePoly::new(diagonal, interactions, 0.5, None)?),
        set: BudgetBoxSet::unit_capped(4, 2.5)?.into(),
    });

    let upper = DenseVector::ones(3);
    let power = NegativeDependencePoly::new(
        vec![
            DiagonalTerm::Power { a: 1.0, p: 0.5 },
            DiagonalTerm::Quadratic { a: 3.0, b: 0.5 },
            DiagonalTerm::Power { a: 2.0, p: 0.5 },
        ],
        vec![Interaction { indices: vec![0, 1, 2], theta: -0.3 }],
        0.25,
        Some(upper.clone()),
    )?;
    out.push(Family {
        name: "negative_dependence_power",
        objective: AnyObjective::NegativeDependence(power),
        set: BoxSet::new(DenseVector::filled(3, 0.05), upper)?.into(),
    });

    // F(S) = √|S| is submodular
    let kl = MeanFieldKLObjective::from_fn(3, 0.05, |s| (s.count_ones() as f64).sqrt())?;
    out.push(Family {
        name: "mean_field_kl",
        objective: AnyObjective::MeanField(kl),
        set: BoxSet::uniform(3, 0.05, 0.95)?.into(),
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub family: String,
    pub suite: String,
    /// False when the suite's preconditions (monotone, nonnegative) fail on
    /// the family; the result is then reported but not gated on.
    pub applicable: bool,
    pub passed: bool,
    pub checked: usize,
    pub skipped: usize,
    pub worst: f64,
}

impl SuiteResult {
    fn from_report(family: &str, report: &InequalityReport, applicable: bool) -> Self {
        Self {
            family: family.to_string(),
            suite: report.name.to_string(),
            applicable,
            passed: report.passed(),
            checked: report.checked,
            skipped: report.skipped,
            worst: report.worst,
        }
    }
}

/// Strong order reversal, the strong concavity bound along nonnegative
/// directions, the smoothness lower bound, and both curvature-aware bounds,
/// at the family's declared `μ` and computed curvature.
pub fn run_suites(
    name: &str,
    objective: &AnyObjective<f64>,
    set: &dyn FeasibleSet<f64>,
    samples: usize,
    seed: u64,
) -> Result<Vec<SuiteResult>> {
    let obj = objective.as_dyn();
    let mu = obj.strong_dr_param();
    let (lower, upper) = sampling_box(obj, set)?;
    let c = family_curvature(obj, set);
    let l = family_smoothness(objective, set)?;
    let mono = monotonicity_check(obj, set, samples, seed ^ 0x11)?;
    let lemma2 = lemma2_check(obj, set, c, mu, samples, seed ^ 0x22)?;
    let main_applicable = mono.passed() && lemma2.negative_values == 0;
    Ok(vec![
        SuiteResult::from_report(name, &order_reversal_check(obj, &lower, &upper, mu, samples, seed)?, true),
        SuiteResult::from_report(name, &lemma1_check(obj, &lower, &upper, mu, samples, seed ^ 0x33)?, true),
        SuiteResult::from_report(name, &smoothness_check(obj, set, l, samples, seed ^ 0x44)?, true),
        SuiteResult::from_report(name, &lemma2.intermediate, true),
        SuiteResult::from_report(name, &lemma2.main, main_applicable),
    ])
}
