//! Independent brute-force and sampling oracles: finite-difference gradients,
//! grid maximization, exact stability numbers, Jacobi eigenvalues, and
//! sampled checks of the structural inequalities the algorithms rely on.

use crate::algorithms::pga;
use crate::error::{check_dims, Error, Result};
use crate::graph::Graph;
use crate::numeric::{DenseVector, SymMatrix};
use crate::objectives::{Objective, DOMAIN_TOL};
use crate::rng::SplitRng;
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;

pub const GRID_MAX_DIM: usize = 4;
pub const STABILITY_MAX_N: usize = 30;
pub const CHECK_TOL: f64 = 1e-9;

/// Central differences `(f(x + h eᵢ) − f(x − h eᵢ)) / 2h`.
pub fn finite_diff_gradient<T: Scalar>(obj: &dyn Objective<T>, x: &DenseVector<T>, h: T) -> Result<DenseVector<T>> {
    check_dims(obj.dim(), x.dim())?;
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let domain = obj.domain();
    let mut out = DenseVector::zeros(x.dim());
    for i in 0..x.dim() {
        let mut plus = x.clone();
        plus[i] += h;
        let mut minus = x.clone();
        minus[i] -= h;
        domain.check(&plus, T::zero())?;
        domain.check(&minus, T::zero())?;
        out[i] = (obj.value(&plus)? - obj.value(&minus)?) / (T::lit(2.0) * h);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult<T: Scalar> {
    pub point: DenseVector<T>,
    pub value: T,
    pub resolution: T,
    pub evaluated: usize,
}

impl<T: Scalar> GridResult<T> {
    /// Upper bound on `OPT − value`: `(‖∇f(point)‖ + L·R)·resolution·√n`.
    ///
    /// Every feasible point lies within `resolution·√n/2` of a grid point, and
    /// `‖∇f‖ ≤ ‖∇f(point)‖ + L·R` on the set when `L` bounds the Hessian norm.
    pub fn gap_bound(&self, obj: &dyn Objective<T>, set: &dyn FeasibleSet<T>, l: T) -> Result<T> {
        let g = obj.gradient(&self.point)?.norm2();
        let n = T::from_usize_lossy(self.point.dim());
        Ok((g + l * set.diameter()) * self.resolution * n.sqrt())
    }
}

/// Best point among the projections onto the set of the lattice with spacing
/// `resolution` over its bounding box. Projection is nonexpansive, so these
/// points cover the set at least as finely as the lattice covers the box.
pub fn grid_maximize<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    resolution: T,
) -> Result<GridResult<T>> {
    check_dims(obj.dim(), set.dim())?;
    let n = set.dim();
    if n > GRID_MAX_DIM {
        return Err(Error::TooLarge(format!("grid search supports n ≤ {GRID_MAX_DIM}, got {n}")));
    }
    if !(resolution > T::zero()) {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let lower = set.lower_corner();
    let upper = set.upper_corner();
    let counts: Vec<usize> = (0..n)
        .map(|i| ((upper[i] - lower[i]) / resolution).ceil().as_f64().max(0.0) as usize + 1)
        .collect();
    let domain = obj.domain();
    let mut best: Option<(DenseVector<T>, T)> = None;
    let mut evaluated = 0;
    let mut index = vec![0usize; n];
    loop {
        let q = DenseVector::from_fn(n, |i| {
            (lower[i] + T::from_usize_lossy(index[i]) * resolution).min(upper[i])
        });
        let p = set.project(&q)?;
        if domain.check(&p, T::lit(DOMAIN_TOL)).is_ok() {
            let value = obj.value(&p)?;
            evaluated += 1;
            if best.as_ref().map_or(true, |(_, b)| value > *b) {
                best = Some((p, value));
            }
        }
        // odometer increment
        let mut carry = 0;
        while carry < n {
            index[carry] += 1;
            if index[carry] < counts[carry] {
                break;
            }
            index[carry] = 0;
            carry += 1;
        }
        if carry == n {
            break;
        }
    }
    let (point, value) =
        best.ok_or_else(|| Error::Domain("no grid point lies in the objective's domain".into()))?;
    Ok(GridResult { point, value, resolution, evaluated })
}

/// Grid maximum refined by `polish` projected-gradient steps from the grid
/// winner. The value never decreases relative to the plain grid.
pub fn reference_maximum<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    resolution: T,
    l: T,
    polish: usize,
) -> Result<GridResult<T>> {
    let mut grid = grid_maximize(obj, set, resolution)?;
    if polish > 0 {
        let trace = pga(obj, set, &grid.point, l, polish)?;
        for (x, &v) in trace.iterates.iter().zip(&trace.values) {
            if v > grid.value {
                grid.value = v;
                grid.point = x.clone();
            }
        }
    }
    Ok(grid)
}

// ---------------------------------------------------------------------------
// Stability number

fn neighbor_masks(g: &Graph) -> Vec<u32> {
    (0..g.vertex_count())
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect()
}

/// Greedy clique cover size of the vertices in `p`: an upper bound on the
/// largest independent subset of `p`.
fn clique_cover_bound(p: u32, adj: &[u32]) -> u32 {
    let mut rest = p;
    let mut cliques = 0;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        let mut clique = 1u32 << v;
        let mut cand = rest & adj[v];
        while cand != 0 {
            let u = cand.trailing_zeros() as usize;
            clique |= 1 << u;
            cand &= adj[u];
        }
        rest &= !clique;
        cliques += 1;
    }
    cliques
}

fn branch(p: u32, size: u32, best: &mut u32, adj: &[u32]) {
    if p == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + clique_cover_bound(p, adj) <= *best {
        return;
    }
    // lowest-degree vertex within p; isolated vertices are always taken
    let mut pick = p.trailing_zeros() as usize;
    let mut pick_deg = u32::MAX;
    let mut rest = p;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & p).count_ones();
        if d < pick_deg {
            pick = v;
            pick_deg = d;
        }
    }
    let bit = 1u32 << pick;
    branch(p & !bit & !adj[pick], size + 1, best, adj);
    if pick_deg > 0 {
        branch(p & !bit, size, best, adj);
    }
}

/// Exact stability number by branch and bound with clique-cover bounds.
pub fn exact_stability_number(g: &Graph) -> Result<usize> {
    let n = g.vertex_count();
    if n > STABILITY_MAX_N {
        return Err(Error::TooLarge(format!("exact stability supports n ≤ {STABILITY_MAX_N}, got {n}")));
    }
    let adj = neighbor_masks(g);
    let all = (1u32 << n) - 1;
    let mut best = 0;
    branch(all, 0, &mut best, &adj);
    Ok(best as usize)
}

/// Stability number by enumerating all `2ⁿ` vertex subsets.
pub fn brute_force_stability_number(g: &Graph) -> Result<usize> {
    let n = g.vertex_count();
    if n > 24 {
        return Err(Error::TooLarge(format!("enumeration supports n ≤ 24, got {n}")));
    }
    let adj = neighbor_masks(g);
    let mut best = 0;
    for set in 0u32..(1u32 << n) {
        let size = set.count_ones();
        if size <= best {
            continue;
        }
        let mut rest = set;
        let mut independent = true;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj[v] & set != 0 {
                independent = false;
                break;
            }
        }
        if independent {
            best = size;
        }
    }
    Ok(best as usize)
}

// ---------------------------------------------------------------------------
// Eigenvalues

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Largest eigenvalue by cyclic Jacobi rotations, run until the off-diagonal
/// Frobenius norm is at most `tol · max(1, ‖M‖_F)`.
pub fn jacobi_max_eigenvalue<T: Scalar>(m: &SymMatrix<T>, tol: T) -> Result<T> {
    let n = m.dim();
    let mut a = m.to_rows();
    let frob = a.iter().flatten().map(|&v| v * v).sum::<T>().sqrt();
    let target = tol * frob.max(T::one());
    let off = |a: &Vec<Vec<T>>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(&a) <= target {
            return Ok((0..n).map(|i| a[i][i]).fold(T::neg_infinity(), T::max));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::Convergence {
        iterations: JACOBI_MAX_SWEEPS,
        residual: off(&a).as_f64(),
        context: "Jacobi sweeps did not annihilate the off-diagonal".into(),
        best: (0..n).map(|i| a[i][i].as_f64()).collect(),
    })
}

// ---------------------------------------------------------------------------
// Sampled inequality checks

/// Intersection of the set's bounding box with the objective's domain.
pub fn sampling_box<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
) -> Result<(DenseVector<T>, DenseVector<T>)> {
    check_dims(obj.dim(), set.dim())?;
    let domain = obj.domain();
    let lo = set.lower_corner();
    let hi = set.upper_corner();
    let lower = DenseVector::from_fn(lo.dim(), |i| lo[i].max(domain.lower[i]));
    let upper = DenseVector::from_fn(hi.dim(), |i| hi[i].min(domain.upper[i]));
    if (0..lower.dim()).any(|i| !(lower[i] <= upper[i]) || !upper[i].is_finite()) {
        return Err(Error::InvalidArgument("set box and objective domain do not overlap in a bounded box".into()));
    }
    Ok((lower, upper))
}

/// Projection of a uniform point of the sampling box; `None` if the projected
/// point leaves the objective's domain.
pub fn sample_feasible<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    rng: &mut SplitRng,
) -> Result<Option<DenseVector<T>>> {
    let (lower, upper) = sampling_box(obj, set)?;
    let p = set.project(&rng.uniform_vector(&lower, &upper))?;
    Ok(obj.domain().check(&p, T::zero()).is_ok().then_some(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityViolation {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of a sampled check of `lhs ≤ rhs + tol·(1 + scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: &'static str,
    pub checked: usize,
    /// Samples that fell outside the objective's domain.
    pub skipped: usize,
    /// Largest `lhs − rhs` seen.
    pub worst: f64,
    pub violations: Vec<InequalityViolation>,
}

impl InequalityReport {
    fn new(name: &'static str) -> Self {
        Self { name, checked: 0, skipped: 0, worst: f64::NEG_INFINITY, violations: Vec::new() }
    }

    fn observe<T: Scalar>(&mut self, x: &DenseVector<T>, y: &DenseVector<T>, lhs: T, rhs: T, scale: T, tol: T) {
        self.checked += 1;
        let gap = (lhs - rhs).as_f64();
        self.worst = self.worst.max(gap);
        if lhs - rhs > tol * (T::one() + scale.abs()) {
            self.violations.push(InequalityViolation {
                x: x.to_f64_vec(),
                y: y.to_f64_vec(),
                lhs: lhs.as_f64(),
                rhs: rhs.as_f64(),
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

fn sort_pair<T: Scalar>(a: &DenseVector<T>, b: &DenseVector<T>) -> Result<(DenseVector<T>, DenseVector<T>)> {
    Ok((a.meet(b)?, a.join(b)?))
}

/// Order reversal with strong parameter: for `x ⪯ y`,
/// `∇f(y) + μ(y − x) ⪯ ∇f(x)` coordinatewise.
pub fn order_reversal_check<T: Scalar>(
    obj: &dyn Objective<T>,
    lower: &DenseVector<T>,
    upper: &DenseVector<T>,
    mu: T,
    samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    check_dims(obj.dim(), lower.dim())?;
    let mut rng = SplitRng::new(seed);
    let mut report = InequalityReport::new("order_reversal");
    let tol = T::lit(CHECK_TOL);
    for _ in 0..samples {
        let a = rng.uniform_vector(lower, upper);
        let b = rng.uniform_vector(lower, upper);
        let (x, y) = sort_pair(&a, &b)?;
        let gx = obj.gradient(&x)?;
        let gy = obj.gradient(&y)?;
        for i in 0..x.dim() {
            let lhs = gy[i] + mu * (y[i] - x[i]);
            report.observe(&x, &y, lhs, gx[i], gx[i].abs().max(gy[i].abs()), tol);
        }
    }
    Ok(report)
}

/// Strong concavity along nonnegative directions: for `v ⪰ 0` with `x`,
/// `x + v` in the box, `f(x + v) ≤ f(x) + ⟨∇f(x), v⟩ − (μ/2)‖v‖²`.
pub fn lemma1_check<T: Scalar>(
    obj: &dyn Objective<T>,
    lower: &DenseVector<T>,
    upper: &DenseVector<T>,
    mu: T,
    samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    check_dims(obj.dim(), lower.dim())?;
    let mut rng = SplitRng::new(seed);
    let mut report = InequalityReport::new("lemma1");
    let tol = T::lit(CHECK_TOL);
    for _ in 0..samples {
        let a = rng.uniform_vector(lower, upper);
        let b = rng.uniform_vector(lower, upper);
        let (x, y) = sort_pair(&a, &b)?;
        let v = &y - &x;
        let fx = obj.value(&x)?;
        let fy = obj.value(&y)?;
        let rhs = fx + obj.gradient(&x)?.dot(&v)? - mu / T::lit(2.0) * v.norm_squared();
        report.observe(&x, &y, fy, rhs, fx.abs().max(fy.abs()), tol);
    }
    Ok(report)
}

/// Lower quadratic bound from `L`-smoothness on random feasible pairs:
/// `f(y) ≥ f(x) + ⟨∇f(x), y − x⟩ − (L/2)‖y − x‖²`.
pub fn smoothness_check<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    l: T,
    samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    let mut rng = SplitRng::new(seed);
    let mut report = InequalityReport::new("smoothness");
    let tol = T::lit(1e-8);
    for _ in 0..samples {
        let (Some(x), Some(y)) = (sample_feasible(obj, set, &mut rng)?, sample_feasible(obj, set, &mut rng)?)
        else {
            report.skipped += 1;
            continue;
        };
        let d = &y - &x;
        let fx = obj.value(&x)?;
        let fy = obj.value(&y)?;
        let lower = fx + obj.gradient(&x)?.dot(&d)? - l / T::lit(2.0) * d.norm_squared();
        report.observe(&x, &y, lower, fy, fx.abs().max(fy.abs()), tol);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Report {
    /// `f(z) − (1 + c)f(x) ≤ ⟨∇f(x), z − x⟩ − (μ/2)‖z − x‖²`.
    pub main: InequalityReport,
    /// `f(x∨z) + f(x∧z) − 2f(x) ≤ ⟨∇f(x), z − x⟩ − (μ/2)‖z − x‖²`.
    pub intermediate: InequalityReport,
    /// Smallest sampled objective value; the main inequality presumes `f ≥ 0`.
    pub min_value: f64,
    pub negative_values: usize,
}

impl Lemma2Report {
    pub fn passed(&self) -> bool {
        self.main.passed() && self.intermediate.passed()
    }
}

pub fn lemma2_check<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    c_f: T,
    mu: T,
    samples: usize,
    seed: u64,
) -> Result<Lemma2Report> {
    let mut rng = SplitRng::new(seed);
    let mut main = InequalityReport::new("lemma2");
    let mut intermediate = InequalityReport::new("lemma2_join_meet");
    let mut min_value = f64::INFINITY;
    let mut negative_values = 0;
    let tol = T::lit(CHECK_TOL);
    let half_mu = mu / T::lit(2.0);
    for _ in 0..samples {
        let (Some(x), Some(z)) = (sample_feasible(obj, set, &mut rng)?, sample_feasible(obj, set, &mut rng)?)
        else {
            main.skipped += 1;
            intermediate.skipped += 1;
            continue;
        };
        let fx = obj.value(&x)?;
        let fz = obj.value(&z)?;
        for v in [fx, fz] {
            min_value = min_value.min(v.as_f64());
            if v < T::zero() {
                negative_values += 1;
            }
        }
        let d = &z - &x;
        let rhs = obj.gradient(&x)?.dot(&d)? - half_mu * d.norm_squared();
        let scale = fx.abs().max(fz.abs());
        main.observe(&x, &z, fz - (T::one() + c_f) * fx, rhs, scale, tol);

        let u = x.join(&z)?;
        let w = x.meet(&z)?;
        if obj.domain().check(&w, T::zero()).is_ok() && obj.domain().check(&u, T::zero()).is_ok() {
            let fu = obj.value(&u)?;
            let fw = obj.value(&w)?;
            let scale = scale.max(fu.abs()).max(fw.abs());
            intermediate.observe(&x, &z, fu + fw - T::lit(2.0) * fx, rhs, scale, tol);
        } else {
            intermediate.skipped += 1;
        }
    }
    Ok(Lemma2Report { main, intermediate, min_value, negative_values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation {
    pub point: Vec<f64>,
    pub coordinate: usize,
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub checked: usize,
    pub skipped: usize,
    pub min_derivative: f64,
    pub violations: Vec<MonotonicityViolation>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `∇f(x) ⪰ −1e−9` at sampled feasible points (the upper corner included).
pub fn monotonicity_check<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    let mut rng = SplitRng::new(seed);
    let mut report =
        MonotonicityReport { checked: 0, skipped: 0, min_derivative: f64::INFINITY, violations: Vec::new() };
    let corner = set.project(&set.upper_corner())?;
    let mut points = Vec::with_capacity(samples + 1);
    if obj.domain().check(&corner, T::zero()).is_ok() {
        points.push(corner);
    }
    for _ in 0..samples {
        match sample_feasible(obj, set, &mut rng)? {
            Some(p) => points.push(p),
            None => report.skipped += 1,
        }
    }
    for x in points {
        let g = obj.gradient(&x)?;
        report.checked += 1;
        for i in 0..g.dim() {
            report.min_derivative = report.min_derivative.min(g[i].as_f64());
            if g[i] < -T::lit(CHECK_TOL) {
                report.violations.push(MonotonicityViolation {
                    point: x.to_f64_vec(),
                    coordinate: i,
                    derivative: g[i].as_f64(),
                });
            }
        }
    }
    Ok(report)
}
