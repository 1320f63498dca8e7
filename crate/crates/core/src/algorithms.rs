//! SDRFW, the classic Frank-Wolfe variant, projected gradient ascent, online
//! gradient ascent, and regret accounting.

use std::time::Instant;

use crate::error::{check_dims, Error, Result};
use crate::numeric::DenseVector;
use crate::objectives::{curvature, curvature_no_origin, ell_vector, Objective};
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;

/// Feasibility tolerance for starting points and iterates.
pub const FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta<T: Scalar> {
    pub algorithm: String,
    /// Iteration count `K` (or horizon `T` for online runs).
    pub k: usize,
    pub mu: T,
    pub l: T,
    pub c_f: Option<T>,
    /// Multiplicative ratio of the run's guarantee against `OPT`.
    pub ratio: Option<T>,
    /// Guarantee value, once an `OPT` estimate is known.
    pub guarantee: Option<T>,
    /// `f(0)` subtracted by SDRFW's normalization.
    pub f_origin: Option<T>,
}

impl<T: Scalar> TraceMeta<T> {
    fn new(algorithm: &str, k: usize, mu: T, l: T) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            k,
            mu,
            l,
            c_f: None,
            ratio: None,
            guarantee: None,
            f_origin: None,
        }
    }
}

/// Per-step record of a run. Entry `i` holds the iterate, its objective value
/// (the reward for online runs), its step index, and the wall time spent
/// producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T: Scalar> {
    pub iterates: Vec<DenseVector<T>>,
    pub values: Vec<T>,
    pub step_index: Vec<usize>,
    pub elapsed: Vec<f64>,
    pub meta: TraceMeta<T>,
}

impl<T: Scalar> Trace<T> {
    fn with_meta(meta: TraceMeta<T>) -> Self {
        Self { iterates: Vec::new(), values: Vec::new(), step_index: Vec::new(), elapsed: Vec::new(), meta }
    }

    fn record(&mut self, step: usize, x: DenseVector<T>, value: T, elapsed: f64) {
        self.step_index.push(step);
        self.iterates.push(x);
        self.values.push(value);
        self.elapsed.push(elapsed);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn final_point(&self) -> Option<&DenseVector<T>> {
        self.iterates.last()
    }

    pub fn final_value(&self) -> Option<T> {
        self.values.last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule<T: Scalar> {
    /// `η_t = 1/(μt)`.
    StronglyConvex { mu: T },
    /// `η = R/(β√T)`.
    Fixed { r: T, beta: T, horizon: usize },
}

impl<T: Scalar> StepRule<T> {
    pub fn strongly_convex(mu: T) -> Result<Self> {
        if !(mu > T::zero()) {
            return Err(Error::InvalidArgument(format!("step rule needs μ > 0, got {mu}")));
        }
        Ok(Self::StronglyConvex { mu })
    }

    pub fn fixed(r: T, beta: T, horizon: usize) -> Result<Self> {
        if !(r > T::zero() && beta > T::zero()) || horizon == 0 {
            return Err(Error::InvalidArgument(format!(
                "fixed step needs R, β, T > 0, got R = {r}, β = {beta}, T = {horizon}"
            )));
        }
        Ok(Self::Fixed { r, beta, horizon })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            StepRule::StronglyConvex { mu } => Self::strongly_convex(mu).map(|_| ()),
            StepRule::Fixed { r, beta, horizon } => Self::fixed(r, beta, horizon).map(|_| ()),
        }
    }

    /// Step size for round `t ≥ 1`.
    pub fn eta(&self, t: usize) -> T {
        match *self {
            StepRule::StronglyConvex { mu } => T::one() / (mu * T::from_usize_lossy(t)),
            StepRule::Fixed { r, beta, horizon } => r / (beta * T::from_usize_lossy(horizon).sqrt()),
        }
    }
}

fn require_origin<T: Scalar>(set: &dyn FeasibleSet<T>, algorithm: &str) -> Result<()> {
    if set.contains_origin() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{algorithm} starts from the origin, which is not in the {} set",
            set.name()
        )))
    }
}

fn require_feasible<T: Scalar>(set: &dyn FeasibleSet<T>, x: &DenseVector<T>) -> Result<()> {
    check_dims(set.dim(), x.dim())?;
    if set.contains(x, T::lit(FEAS_TOL)) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("initial point is not in the {} set", set.name())))
    }
}

/// `⌈L/μ⌉`, at least 1.
pub fn sdrfw_iterations<T: Scalar>(l: T, mu: T) -> usize {
    (l / mu).ceil().as_f64().max(1.0) as usize
}

/// Strongly DR-submodular Frank-Wolfe.
///
/// Records `x₀ = 0, …, x_K`; the output is `x_K`. Values are raw `f(x_k)`;
/// the normalization constant `f(0)` is kept in `meta.f_origin`.
pub fn sdrfw<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    mu: T,
    l: T,
    k_override: Option<usize>,
) -> Result<Trace<T>> {
    check_dims(obj.dim(), set.dim())?;
    require_origin(set, "SDRFW")?;
    if !(mu > T::zero()) {
        return Err(Error::InvalidArgument(
            "SDRFW needs μ > 0; use fw_baseline for μ = 0".into(),
        ));
    }
    if mu > obj.strong_dr_param() * (T::one() + T::lit(1e-12)) {
        return Err(Error::Precondition(format!(
            "requested μ = {mu} exceeds the objective's μ = {}",
            obj.strong_dr_param()
        )));
    }
    sdrfw_unchecked(obj, set, mu, l, k_override)
}

/// SDRFW without the check that `μ` is at most the objective's declared value.
pub(crate) fn sdrfw_unchecked<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    mu: T,
    l: T,
    k_override: Option<usize>,
) -> Result<Trace<T>> {
    check_dims(obj.dim(), set.dim())?;
    require_origin(set, "SDRFW")?;
    if !(mu > T::zero()) {
        return Err(Error::InvalidArgument(
            "SDRFW needs μ > 0; use fw_baseline for μ = 0".into(),
        ));
    }
    if l < mu {
        return Err(Error::InvalidArgument(format!("L = {l} is below μ = {mu}")));
    }
    let k = match k_override {
        Some(0) => return Err(Error::InvalidArgument("K must be positive".into())),
        Some(k) => k,
        None => sdrfw_iterations(l, mu),
    };
    let n = obj.dim();
    let ell = ell_vector(obj, set)?;
    let c_f = curvature(obj, set).ok();

    let mut meta = TraceMeta::new("sdrfw", k, mu, l);
    meta.c_f = c_f;
    meta.ratio = c_f.map(|c| T::one() - c / T::lit(std::f64::consts::E));
    let mut x = DenseVector::zeros(n);
    let f0 = obj.value(&x)?;
    meta.f_origin = Some(f0);
    let mut trace = Trace::with_meta(meta);
    trace.record(0, x.clone(), f0, 0.0);

    let decay = T::one() - T::one() / T::from_usize_lossy(k);
    let inv_k = T::one() / T::from_usize_lossy(k);
    for step in 0..k {
        let start = Instant::now();
        let gamma = decay.powi((k - step - 1) as i32);
        let grad = obj.gradient(&x)?;
        // γ∇g(x) + ℓ with ∇g = ∇f − ℓ
        let w = DenseVector::from_fn(n, |i| gamma * (grad[i] - ell[i]) + ell[i]);
        let v = set.reg_linear_max(&w, mu * gamma)?;
        x = x.axpy(inv_k, &v);
        let value = obj.value(&x)?;
        trace.record(step + 1, x.clone(), value, start.elapsed().as_secs_f64());
    }
    Ok(trace)
}

/// Frank-Wolfe with `K` linear-maximization steps from the origin.
pub fn fw_baseline<T: Scalar>(obj: &dyn Objective<T>, set: &dyn FeasibleSet<T>, k: usize) -> Result<Trace<T>> {
    check_dims(obj.dim(), set.dim())?;
    require_origin(set, "Frank-Wolfe")?;
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let mut meta = TraceMeta::new("fw", k, T::zero(), T::zero());
    meta.ratio = Some(T::one() - T::one() / T::lit(std::f64::consts::E));
    let mut x = DenseVector::zeros(obj.dim());
    let mut trace = Trace::with_meta(meta);
    let f0 = obj.value(&x)?;
    trace.meta.f_origin = Some(f0);
    trace.record(0, x.clone(), f0, 0.0);
    let inv_k = T::one() / T::from_usize_lossy(k);
    for step in 0..k {
        let start = Instant::now();
        let v = set.linear_max(&obj.gradient(&x)?)?;
        x = x.axpy(inv_k, &v);
        let value = obj.value(&x)?;
        trace.record(step + 1, x.clone(), value, start.elapsed().as_secs_f64());
    }
    Ok(trace)
}

/// Projected gradient ascent with step `1/L`. Records `x₁, …, x_{K+1}`.
pub fn pga<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    x1: &DenseVector<T>,
    l: T,
    k: usize,
) -> Result<Trace<T>> {
    check_dims(obj.dim(), set.dim())?;
    require_feasible(set, x1)?;
    if !(l > T::zero()) {
        return Err(Error::InvalidArgument(format!("L must be positive, got {l}")));
    }
    let mut meta = TraceMeta::new("pga", k, obj.strong_dr_param(), l);
    meta.c_f = curvature_no_origin(obj, set).ok();
    meta.ratio = meta.c_f.map(|c| T::one() / (T::one() + c));
    let mut trace = Trace::with_meta(meta);
    let mut x = x1.clone();
    trace.record(1, x.clone(), obj.value(&x)?, 0.0);
    let step_size = T::one() / l;
    for step in 1..=k {
        let start = Instant::now();
        let grad = obj.gradient(&x)?;
        x = set.project(&x.axpy(step_size, &grad))?;
        let value = obj.value(&x)?;
        trace.record(step + 1, x.clone(), value, start.elapsed().as_secs_f64());
    }
    Ok(trace)
}

/// Online gradient ascent. Entry `t` of the trace is the played point `x_t`
/// and its reward `f_t(x_t)`.
pub fn oga<T: Scalar>(
    stream: &[&dyn Objective<T>],
    set: &dyn FeasibleSet<T>,
    x1: &DenseVector<T>,
    rule: StepRule<T>,
) -> Result<Trace<T>> {
    rule.validate()?;
    if stream.is_empty() {
        return Err(Error::InvalidArgument("online stream is empty".into()));
    }
    require_feasible(set, x1)?;
    for f in stream {
        check_dims(set.dim(), f.dim())?;
    }
    let mu = match rule {
        StepRule::StronglyConvex { mu } => mu,
        StepRule::Fixed { .. } => T::zero(),
    };
    let mut trace = Trace::with_meta(TraceMeta::new("oga", stream.len(), mu, T::zero()));
    let mut x = x1.clone();
    for (idx, f) in stream.iter().enumerate() {
        let t = idx + 1;
        let start = Instant::now();
        let reward = f.value(&x)?;
        let next = if t < stream.len() {
            Some(set.project(&x.axpy(rule.eta(t), &f.gradient(&x)?))?)
        } else {
            None
        };
        trace.record(t, x.clone(), reward, start.elapsed().as_secs_f64());
        if let Some(next) = next {
            x = next;
        }
    }
    Ok(trace)
}

/// `α Σ f_t(opt) − Σ f_t(x_t)`.
pub fn alpha_regret<T: Scalar>(
    trace: &Trace<T>,
    stream: &[&dyn Objective<T>],
    set: &dyn FeasibleSet<T>,
    alpha: T,
    opt_point: &DenseVector<T>,
) -> Result<T> {
    Ok(*alpha_regret_prefixes(trace, stream, set, alpha, opt_point)?
        .last()
        .expect("nonempty stream"))
}

/// Regret against the fixed comparator `opt_point` after each round.
pub fn alpha_regret_prefixes<T: Scalar>(
    trace: &Trace<T>,
    stream: &[&dyn Objective<T>],
    set: &dyn FeasibleSet<T>,
    alpha: T,
    opt_point: &DenseVector<T>,
) -> Result<Vec<T>> {
    if trace.len() != stream.len() {
        return Err(Error::DimensionMismatch { expected: stream.len(), found: trace.len() });
    }
    if stream.is_empty() {
        return Err(Error::InvalidArgument("online stream is empty".into()));
    }
    require_feasible(set, opt_point)?;
    let mut cumulative = T::zero();
    let mut out = Vec::with_capacity(stream.len());
    for (f, &reward) in stream.iter().zip(&trace.values) {
        cumulative += alpha * f.value(opt_point)? - reward;
        out.push(cumulative);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Guarantee values

/// `(1 − c/e)·OPT`.
pub fn sdrfw_guarantee<T: Scalar>(opt: T, c_f: T) -> T {
    (T::one() - c_f / T::lit(std::f64::consts::E)) * opt
}

/// `(1 − 1/e)·OPT − L R²/(2K)`.
pub fn fw_guarantee<T: Scalar>(opt: T, l: T, diameter: T, k: usize) -> T {
    (T::one() - T::one() / T::lit(std::f64::consts::E)) * opt
        - l * diameter * diameter / (T::lit(2.0) * T::from_usize_lossy(k))
}

/// PGA guarantee for `μ > 0`:
/// `OPT/(1+c) − e^{−μK/L}/(1+c) · (OPT − (1+c) f(x₁))`.
pub fn pga_guarantee<T: Scalar>(opt: T, c_f: T, mu: T, l: T, k: usize, f_x1: T) -> T {
    let one_c = T::one() + c_f;
    let decay = (-mu * T::from_usize_lossy(k) / l).exp();
    opt / one_c - decay / one_c * (opt - one_c * f_x1)
}

/// PGA guarantee for `μ = 0`: `OPT/(1+c) − L‖x₁ − x*‖²/(2K(1+c))`.
pub fn pga_guarantee_sublinear<T: Scalar>(opt: T, c_f: T, l: T, k: usize, dist_sq: T) -> T {
    let one_c = T::one() + c_f;
    opt / one_c - l * dist_sq / (T::lit(2.0) * T::from_usize_lossy(k) * one_c)
}

/// `β²/(2μ(1+c))·(1 + ln T)`.
pub fn oga_regret_bound_strong<T: Scalar>(beta: T, mu: T, c: T, horizon: usize) -> T {
    beta * beta / (T::lit(2.0) * mu * (T::one() + c)) * (T::one() + T::from_usize_lossy(horizon).ln())
}

/// `Rβ√T/(1+c)`.
pub fn oga_regret_bound_fixed<T: Scalar>(r: T, beta: T, c: T, horizon: usize) -> T {
    r * beta * T::from_usize_lossy(horizon).sqrt() / (T::one() + c)
}
