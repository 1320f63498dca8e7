//! Differentiable (strongly) DR-submodular objectives.
//!
//! Every objective exposes value, gradient and Hessian oracles together with
//! its declared strong DR parameter `μ` (Hessian diagonal ≤ −μ, off-diagonal
//! ≤ 0). The helpers at the bottom compute the gradient lower bound `ℓ` and
//! the curvature `c_f` against a feasible set.

use crate::error::{check_dims, Error, Result};
use crate::graph::Graph;
use crate::numeric::{DenseVector, SymMatrix};
use crate::posynomial::{Monomial, PosynomialMatrix};
use crate::rng::SplitRng;
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;

/// Slack allowed below zero for the nonnegative-orthant domain check.
pub const DOMAIN_TOL: f64 = 1e-9;

/// Axis-aligned admissible domain; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox<T: Scalar> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> DomainBox<T> {
    pub fn nonnegative(n: usize) -> Self {
        Self { lower: vec![T::zero(); n], upper: vec![T::infinity(); n] }
    }

    pub fn check(&self, x: &DenseVector<T>, slack: T) -> Result<()> {
        check_dims(self.lower.len(), x.dim())?;
        for i in 0..x.dim() {
            if !(x[i] >= self.lower[i] - slack && x[i] <= self.upper[i] + slack) {
                return Err(Error::Domain(format!(
                    "coordinate {i} = {} outside [{}, {}]",
                    x[i], self.lower[i], self.upper[i]
                )));
            }
        }
        Ok(())
    }
}

pub trait Objective<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &DenseVector<T>) -> Result<T>;

    fn gradient(&self, x: &DenseVector<T>) -> Result<DenseVector<T>>;

    fn hessian(&self, _x: &DenseVector<T>) -> Result<SymMatrix<T>> {
        Err(Error::Unsupported(format!("{} has no Hessian oracle", self.name())))
    }

    /// Declared strong DR-submodularity parameter.
    fn strong_dr_param(&self) -> T;

    fn domain(&self) -> DomainBox<T> {
        DomainBox::nonnegative(self.dim())
    }

    /// True when the Hessian does not depend on `x`.
    fn hessian_is_constant(&self) -> bool {
        false
    }

    /// `−∇²f(x)` as a matrix of posynomials in `x`, when expressible.
    fn neg_hessian_posynomials(&self) -> Result<PosynomialMatrix<T>> {
        Err(Error::Unsupported(format!(
            "{} does not expose a posynomial Hessian",
            self.name()
        )))
    }

    fn name(&self) -> &'static str;
}

// ---------------------------------------------------------------------------
// Quadratic

/// `f(x) = ½ xᵀHx + hᵀx + c₀` with symmetric `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective<T: Scalar> {
    hessian: SymMatrix<T>,
    linear: DenseVector<T>,
    offset: T,
}

impl<T: Scalar> QuadraticObjective<T> {
    /// Any symmetric `H` is accepted; DR-submodularity (entrywise `H ≤ 0`) is
    /// what [`Self::is_dr_submodular`] and [`verify_strong_dr`] check.
    pub fn new(hessian: SymMatrix<T>, linear: DenseVector<T>, offset: T) -> Result<Self> {
        check_dims(hessian.dim(), linear.dim())?;
        if !offset.is_finite() {
            return Err(Error::InvalidArgument("offset must be finite".into()));
        }
        Ok(Self { hessian, linear, offset })
    }

    /// Canonical form of `f(x) = (½x − 1)ᵀ H x` for a possibly nonsymmetric
    /// `H`: `Hsym = (H + Hᵀ)/2`, `h = −Hᵀ1`, `c₀ = 0`.
    pub fn from_centered_form(rows: &[Vec<T>]) -> Result<Self> {
        let hessian = SymMatrix::from_rows(rows)?;
        let n = rows.len();
        let linear = DenseVector::from_fn(n, |j| -(0..n).map(|i| rows[i][j]).sum::<T>());
        Self::new(hessian, linear, T::zero())
    }

    pub fn linear_only(linear: DenseVector<T>) -> Self {
        let n = linear.dim();
        Self { hessian: SymMatrix::zeros(n), linear, offset: T::zero() }
    }

    pub fn hessian_matrix(&self) -> &SymMatrix<T> {
        &self.hessian
    }

    pub fn linear(&self) -> &DenseVector<T> {
        &self.linear
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn is_dr_submodular(&self) -> bool {
        self.hessian.max_entry() <= T::zero()
    }

    /// Entrywise sum, used to accumulate streams of quadratics.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            hessian: self.hessian.add(&other.hessian)?,
            linear: self.linear.zip_with(&other.linear, |a, b| a + b)?,
            offset: self.offset + other.offset,
        })
    }
}

impl<T: Scalar> Objective<T> for QuadraticObjective<T> {
    fn dim(&self) -> usize {
        self.linear.dim()
    }

    fn value(&self, x: &DenseVector<T>) -> Result<T> {
        self.domain().check(x, T::lit(DOMAIN_TOL))?;
        let quad = self.hessian.quad_form(x)?;
        Ok(T::lit(0.5) * quad + self.linear.dot(x)? + self.offset)
    }

    fn gradient(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        self.domain().check(x, T::lit(DOMAIN_TOL))?;
        Ok(&self.hessian.mul_vec(x)? + &self.linear)
    }

    fn hessian(&self, x: &DenseVector<T>) -> Result<SymMatrix<T>> {
        check_dims(self.dim(), x.dim())?;
        Ok(self.hessian.clone())
    }

    /// `max(0, minᵢ −Hᵢᵢ)`.
    fn strong_dr_param(&self) -> T {
        let diag = self.hessian.diag();
        (-diag.max_entry()).max(T::zero())
    }

    fn hessian_is_constant(&self) -> bool {
        true
    }

    fn neg_hessian_posynomials(&self) -> Result<PosynomialMatrix<T>> {
        let n = self.dim();
        let mut m = PosynomialMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let entry = -self.hessian.get(i, j);
                if entry < T::zero() {
                    return Err(Error::Formulation(format!(
                        "entry ({}, {}) of −∇²f is negative ({entry}); not a posynomial",
                        i + 1,
                        j + 1
                    )));
                }
                if entry > T::zero() {
                    m.push(i, j, Monomial::constant(entry, n)?);
                }
            }
        }
        Ok(m)
    }

    fn name(&self) -> &'static str {
        "quadratic"
    }
}

// ---------------------------------------------------------------------------
// Stability number

/// `f(x) = xᵀ(−A − I)x + 2·1ᵀx` for the adjacency matrix `A` of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityObjective<T: Scalar> {
    graph: Graph,
    adjacency: SymMatrix<T>,
}

impl<T: Scalar> StabilityObjective<T> {
    pub fn new(graph: &Graph) -> Result<Self> {
        if graph.vertex_count() == 0 {
            return Err(Error::InvalidArgument("graph has no vertices".into()));
        }
        Ok(Self { adjacency: graph.adjacency(), graph: graph.clone() })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn adjacency(&self) -> &SymMatrix<T> {
        &self.adjacency
    }

    /// `s(G)` estimate `1 / (2 − f(x))` for `x` on the standard simplex.
    pub fn stability_estimate(&self, value: T) -> T {
        T::one() / (T::lit(2.0) - value)
    }

    fn a_plus_i_times(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        Ok(&self.adjacency.mul_vec(x)? + x)
    }
}

impl<T: Scalar> Objective<T> for StabilityObjective<T> {
    fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    fn value(&self, x: &DenseVector<T>) -> Result<T> {
        self.domain().check(x, T::lit(DOMAIN_TOL))?;
        let quad = self.a_plus_i_times(x)?.dot(x)?;
        Ok(T::lit(2.0) * x.sum() - quad)
    }

    fn gradient(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        self.domain().check(x, T::lit(DOMAIN_TOL))?;
        let two = T::lit(2.0);
        Ok(self.a_plus_i_times(x)?.map(|v| two - two * v))
    }

    /// `−2A − 2I`.
    fn hessian(&self, x: &DenseVector<T>) -> Result<SymMatrix<T>> {
        check_dims(self.dim(), x.dim())?;
        Ok(self.adjacency.add_identity(T::one()).scale(-T::lit(2.0)))
    }

    fn strong_dr_param(&self) -> T {
        T::lit(2.0)
    }

    fn hessian_is_constant(&self) -> bool {
        true
    }

    fn neg_hessian_posynomials(&self) -> Result<PosynomialMatrix<T>> {
        let n = self.dim();
        let two = T::lit(2.0);
        let mut m = PosynomialMatrix::zeros(n);
        for i in 0..n {
            m.push(i, i, Monomial::constant(two, n)?);
        }
        for &(u, v) in self.graph.edges() {
            m.push(u, v, Monomial::constant(two, n)?);
        }
        Ok(m)
    }

    fn name(&self) -> &'static str {
        "stability"
    }
}

// ---------------------------------------------------------------------------
// Concave functions with negative dependence

/// One-dimensional strongly concave term `hᵢ(xᵢ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalTerm<T: Scalar> {
    /// `a·x − ½ b·x²`, second derivative `−b`.
    Quadratic { a: T, b: T },
    /// `a·x^p` with `a > 0`, `0 < p < 1`; second derivative `a p (p−1) x^{p−2}`.
    Power { a: T, p: T },
}

impl<T: Scalar> DiagonalTerm<T> {
    fn value(&self, x: T) -> T {
        match *self {
            DiagonalTerm::Quadratic { a, b } => a * x - T::lit(0.5) * b * x * x,
            DiagonalTerm::Power { a, p } => a * x.powf(p),
        }
    }

    fn derivative(&self, x: T) -> Result<T> {
        match *self {
            DiagonalTerm::Quadratic { a, b } => Ok(a - b * x),
            DiagonalTerm::Power { a, p } => {
                if x <= T::zero() {
                    return Err(Error::Domain("power term is not differentiable at 0".into()));
                }
                Ok(a * p * x.powf(p - T::one()))
            }
        }
    }

    fn second_derivative(&self, x: T) -> Result<T> {
        match *self {
            DiagonalTerm::Quadratic { b, .. } => Ok(-b),
            DiagonalTerm::Power { a, p } => {
                if x <= T::zero() {
                    return Err(Error::Domain("power term is not differentiable at 0".into()));
                }
                Ok(a * p * (p - T::one()) * x.powf(p - T::lit(2.0)))
            }
        }
    }
}

/// `θ · Π_{k in indices} x_k` over distinct coordinates, `θ ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction<T: Scalar> {
    pub indices: Vec<usize>,
    pub theta: T,
}

/// `f(x) = Σ hᵢ(xᵢ) + Σ θ_S Π_{k∈S} x_k` with every `θ_S ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeDependencePoly<T: Scalar> {
    diagonal: Vec<DiagonalTerm<T>>,
    interactions: Vec<Interaction<T>>,
    mu: T,
    upper: Option<DenseVector<T>>,
}

impl<T: Scalar> NegativeDependencePoly<T> {
    /// Validates `θ ≤ 0`, distinct in-range indices of degree ≥ 2, and
    /// `hᵢ'' ≤ −μ` on the declared domain `[0, upper]` (power terms need a
    /// finite upper bound when `μ > 0`).
    pub fn new(
        diagonal: Vec<DiagonalTerm<T>>,
        interactions: Vec<Interaction<T>>,
        mu: T,
        upper: Option<DenseVector<T>>,
    ) -> Result<Self> {
        let n = diagonal.len();
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one coordinate".into()));
        }
        if mu < T::zero() {
            return Err(Error::InvalidArgument("μ must be nonnegative".into()));
        }
        if let Some(u) = &upper {
            check_dims(n, u.dim())?;
            if !(u.min_entry() > T::zero()) {
                return Err(Error::InvalidArgument("upper bounds must be positive".into()));
            }
        }
        for (i, term) in diagonal.iter().enumerate() {
            match *term {
                DiagonalTerm::Quadratic { b, .. } => {
                    if b < mu {
                        return Err(Error::InvalidArgument(format!(
                            "coordinate {i}: curvature b = {b} below μ = {mu}"
                        )));
                    }
                }
                DiagonalTerm::Power { a, p } => {
                    if !(a > T::zero()) || !(p > T::zero() && p < T::one()) {
                        return Err(Error::InvalidArgument(format!(
                            "coordinate {i}: power term needs a > 0 and 0 < p < 1"
                        )));
                    }
                    if mu > T::zero() {
                        let Some(u) = &upper else {
                            return Err(Error::InvalidArgument(
                                "power terms with μ > 0 need a finite upper bound".into(),
                            ));
                        };
                        // |h''| is smallest at the upper end of [0, u]
                        let weakest = -term.second_derivative(u[i])?;
                        if weakest < mu {
                            return Err(Error::InvalidArgument(format!(
                                "coordinate {i}: power term curvature {weakest} below μ = {mu} at the upper bound"
                            )));
                        }
                    }
                }
            }
        }
        for term in &interactions {
            if term.indices.len() < 2 {
                return Err(Error::InvalidArgument("interactions need degree ≥ 2".into()));
            }
            if term.theta > T::zero() {
                return Err(Error::InvalidArgument(format!(
                    "interaction coefficient {} must be ≤ 0",
                    term.theta
                )));
            }
            let mut sorted = term.indices.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != term.indices.len() || sorted.iter().any(|&k| k >= n) {
                return Err(Error::InvalidArgument(format!(
                    "interaction indices {:?} must be distinct and below {n}",
                    term.indices
                )));
            }
        }
        Ok(Self { diagonal, interactions, mu, upper })
    }

    pub fn diagonal(&self) -> &[DiagonalTerm<T>] {
        &self.diagonal
    }

    pub fn interactions(&self) -> &[Interaction<T>] {
        &self.interactions
    }

    fn product_except(x: &DenseVector<T>, indices: &[usize], skip: &[usize]) -> T {
        indices
            .iter()
            .filter(|k| !skip.contains(k))
            .fold(T::one(), |acc, &k| acc * x[k])
    }

    fn has_power_terms(&self) -> bool {
        self.diagonal.iter().any(|t| matches!(t, DiagonalTerm::Power { .. }))
    }
}

impl<T: Scalar> Objective<T> for NegativeDependencePoly<T> {
    fn dim(&self) -> usize {
        self.diagonal.len()
    }

    fn value(&self, x: &DenseVector<T>) -> Result<T> {
        self.domain().check(x, T::lit(DOMAIN_TOL))?;
        let x = x.map(|v| v.max(T::zero()));
        let mut total: T = self.diagonal.iter().enumerate().map(|(i, t)| t.value(x[i])).sum();
        for term in &self.interactions {
            total += term.theta * Self::product_except(&x, &term.indices, &[]);
        }
        Ok(total)
    }

    fn gradient(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        self.domain().check(x, T::lit(DOMAIN_TOL))?;
        let mut g = DenseVector::zeros(self.dim());
        for (i, t) in self.diagonal.iter().enumerate() {
            g[i] = t.derivative(x[i])?;
        }
        for term in &self.interactions {
            for &i in &term.indices {
                g[i] += term.theta * Self::product_except(x, &term.indices, &[i]);
            }
        }
        Ok(g)
    }

    fn hessian(&self, x: &DenseVector<T>) -> Result<SymMatrix<T>> {
        self.domain().check(x, T::lit(DOMAIN_TOL))?;
        let n = self.dim();
        let mut rows = vec![vec![T::zero(); n]; n];
        for (i, t) in self.diagonal.iter().enumerate() {
            rows[i][i] = t.second_derivative(x[i])?;
        }
        for term in &self.interactions {
            for (a, &i) in term.indices.iter().enumerate() {
                for &j in &term.indices[a + 1..] {
                    let v = term.theta * Self::product_except(x, &term.indices, &[i, j]);
                    rows[i][j] += v;
                    rows[j][i] += v;
                }
            }
        }
        SymMatrix::from_rows(&rows)
    }

    fn strong_dr_param(&self) -> T {
        self.mu
    }

    fn domain(&self) -> DomainBox<T> {
        let n = self.dim();
        DomainBox {
            lower: vec![T::zero(); n],
            upper: match &self.upper {
                Some(u) => u.as_slice().to_vec(),
                None => vec![T::infinity(); n],
            },
        }
    }

    fn hessian_is_constant(&self) -> bool {
        !self.has_power_terms() && self.interactions.iter().all(|t| t.indices.len() == 2)
    }

    fn neg_hessian_posynomials(&self) -> Result<PosynomialMatrix<T>> {
        let n = self.dim();
        let mut m = PosynomialMatrix::zeros(n);
        for (i, t) in self.diagonal.iter().enumerate() {
            match *t {
                DiagonalTerm::Quadratic { b, .. } => {
                    if b > T::zero() {
                        m.push(i, i, Monomial::constant(b, n)?);
                    }
                }
                DiagonalTerm::Power { a, p } => {
                    let mut exps = vec![T::zero(); n];
                    exps[i] = p - T::lit(2.0);
                    m.push(i, i, Monomial::new(a * p * (T::one() - p), exps)?);
                }
            }
        }
        for term in &self.interactions {
            if term.theta == T::zero() {
                continue;
            }
            for (a, &i) in term.indices.iter().enumerate() {
                for &j in &term.indices[a + 1..] {
                    let mut exps = vec![T::zero(); n];
                    for &k in &term.indices {
                        if k != i && k != j {
                            exps[k] = T::one();
                        }
                    }
                    m.push(i, j, Monomial::new(-term.theta, exps)?);
                }
            }
        }
        Ok(m)
    }

    fn name(&self) -> &'static str {
        "negative_dependence"
    }
}

// ---------------------------------------------------------------------------
// Mean-field inference for log-submodular models

/// Largest ground set for which the `2ⁿ` table is enumerated.
pub const MEAN_FIELD_MAX_N: usize = 20;

/// `−KL(x)` between the product distribution with marginals `x` and
/// `P(S) ∝ exp(F(S))`, including the exact `ln Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldKLObjective<T: Scalar> {
    n: usize,
    /// `F(S)` indexed by the bitmask of `S`.
    table: Vec<T>,
    clip: T,
    log_partition: T,
}

impl<T: Scalar> MeanFieldKLObjective<T> {
    pub fn new(n: usize, table: Vec<T>, clip: T) -> Result<Self> {
        if n == 0 || n > MEAN_FIELD_MAX_N {
            return Err(Error::TooLarge(format!(
                "mean-field objective needs 1 ≤ n ≤ {MEAN_FIELD_MAX_N}, got {n}"
            )));
        }
        check_dims(1 << n, table.len())?;
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("set-function values must be finite".into()));
        }
        if !(clip > T::zero() && clip < T::lit(0.5)) {
            return Err(Error::InvalidArgument("clip δ must lie in (0, 1/2)".into()));
        }
        let max = table.iter().copied().fold(T::neg_infinity(), T::max);
        let log_partition = max + table.iter().map(|&f| (f - max).exp()).sum::<T>().ln();
        Ok(Self { n, table, clip, log_partition })
    }

    /// Builds the table from a set function over bitmasks.
    pub fn from_fn(n: usize, clip: T, f: impl Fn(u32) -> T) -> Result<Self> {
        if n == 0 || n > MEAN_FIELD_MAX_N {
            return Err(Error::TooLarge(format!("n = {n} outside 1..={MEAN_FIELD_MAX_N}")));
        }
        Self::new(n, (0..(1u32 << n)).map(f).collect(), clip)
    }

    pub fn log_partition(&self) -> T {
        self.log_partition
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    /// Checks `F(A ∪ j) − F(A) ≥ F(B ∪ j) − F(B)` for all `A ⊆ B`, `j ∉ B`
    /// through the equivalent pairwise condition on second differences.
    pub fn is_submodular(&self, tol: T) -> bool {
        let full = 1u32 << self.n;
        for s in 0..full {
            for i in 0..self.n {
                for j in (i + 1)..self.n {
                    let (bi, bj) = (1u32 << i, 1u32 << j);
                    if s & (bi | bj) != 0 {
                        continue;
                    }
                    let d = self.table[(s | bi | bj) as usize] - self.table[(s | bi) as usize]
                        - self.table[(s | bj) as usize]
                        + self.table[s as usize];
                    if d > tol {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Gershgorin bound on `‖∇²f‖` over the clip box:
    /// `1/δ + 1/(1−δ) + (n−1)·max |F(S+i+j) − F(S+i) − F(S+j) + F(S)|`.
    /// Off-diagonal Hessian entries are averages of those second differences.
    pub fn smoothness_bound(&self) -> T {
        let mut worst = T::zero();
        let full = 1usize << self.n;
        for s in 0..full {
            for i in 0..self.n {
                for j in (i + 1)..self.n {
                    let (bi, bj) = (1usize << i, 1usize << j);
                    if s & (bi | bj) == 0 {
                        let d = self.table[s | bi | bj] - self.table[s | bi] - self.table[s | bj] + self.table[s];
                        worst = worst.max(d.abs());
                    }
                }
            }
        }
        let d = self.clip;
        T::one() / d + T::one() / (T::one() - d) + T::from_usize_lossy(self.n - 1) * worst
    }

    /// `Q(S | x)` for every bitmask `S`.
    fn product_weights(&self, x: &DenseVector<T>) -> Vec<T> {
        let mut q = vec![T::one()];
        for i in 0..self.n {
            let mut next = Vec::with_capacity(q.len() * 2);
            next.extend(q.iter().map(|&w| w * (T::one() - x[i])));
            next.extend(q.iter().map(|&w| w * x[i]));
            q = next;
        }
        // bit i of the index selects "i in S"; the doubling above puts the
        // newest coordinate in the highest bit, which matches `1 << i`
        q
    }
}

impl<T: Scalar> Objective<T> for MeanFieldKLObjective<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DenseVector<T>) -> Result<T> {
        self.domain().check(x, T::zero())?;
        let q = self.product_weights(x);
        let expected: T = q.iter().zip(&self.table).map(|(&w, &f)| w * f).sum();
        let neg_entropy: T = x
            .iter()
            .map(|&xi| xi * xi.ln() + (T::one() - xi) * (T::one() - xi).ln())
            .sum();
        Ok(expected - neg_entropy - self.log_partition)
    }

    fn gradient(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        self.domain().check(x, T::zero())?;
        let q = self.product_weights(x);
        let mut g = DenseVector::zeros(self.n);
        for i in 0..self.n {
            let bit = 1usize << i;
            let mut acc = T::zero();
            for s in 0..q.len() {
                if s & bit == 0 {
                    acc += q[s] * (self.table[s | bit] - self.table[s]);
                }
            }
            g[i] = acc / (T::one() - x[i]) - (x[i].ln() - (T::one() - x[i]).ln());
        }
        Ok(g)
    }

    fn hessian(&self, x: &DenseVector<T>) -> Result<SymMatrix<T>> {
        self.domain().check(x, T::zero())?;
        let q = self.product_weights(x);
        let n = self.n;
        let mut rows = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            rows[i][i] = -(T::one() / x[i] + T::one() / (T::one() - x[i]));
            for j in (i + 1)..n {
                let (bi, bj) = (1usize << i, 1usize << j);
                let mut acc = T::zero();
                for s in 0..q.len() {
                    if s & (bi | bj) == 0 {
                        acc += q[s]
                            * (self.table[s | bi | bj] - self.table[s | bi] - self.table[s | bj]
                                + self.table[s]);
                    }
                }
                let v = acc / ((T::one() - x[i]) * (T::one() - x[j]));
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        SymMatrix::from_rows(&rows)
    }

    /// The entropy term alone contributes `−1/x − 1/(1−x) ≤ −4`.
    fn strong_dr_param(&self) -> T {
        T::lit(4.0)
    }

    fn domain(&self) -> DomainBox<T> {
        DomainBox {
            lower: vec![self.clip; self.n],
            upper: vec![T::one() - self.clip; self.n],
        }
    }

    fn name(&self) -> &'static str {
        "mean_field_kl"
    }
}

// ---------------------------------------------------------------------------
// Set-dependent quantities

fn bounded_corner<T: Scalar>(set: &dyn FeasibleSet<T>) -> Result<DenseVector<T>> {
    let upper = set.upper_corner();
    if !upper.all_finite() {
        return Err(Error::InvalidArgument("set is unbounded".into()));
    }
    Ok(upper)
}

/// Gradient lower bound `ℓ` over the set's bounding box, taken as `∇f(ū)`.
///
/// DR-submodular gradients are order-reversing, so the coordinatewise
/// minimum over the box `[l̄, ū]` sits at `ū`, whether or not `ū` is feasible.
pub fn ell_vector<T: Scalar>(obj: &dyn Objective<T>, set: &dyn FeasibleSet<T>) -> Result<DenseVector<T>> {
    check_dims(obj.dim(), set.dim())?;
    obj.gradient(&bounded_corner(set)?)
}

/// `c_f = 1 − minᵢ ℓᵢ / ∇ᵢf(0)`, clamped to `[0, 1]`. Needs `0` in the set.
pub fn curvature<T: Scalar>(obj: &dyn Objective<T>, set: &dyn FeasibleSet<T>) -> Result<T> {
    check_dims(obj.dim(), set.dim())?;
    if !set.contains_origin() {
        return Err(Error::Precondition(
            "the set does not contain the origin; use curvature_no_origin".into(),
        ));
    }
    let at_origin = obj.gradient(&DenseVector::zeros(obj.dim()))?;
    if let Some(i) = (0..obj.dim()).find(|&i| !(at_origin[i] > T::zero())) {
        return Err(Error::UndefinedCurvature(format!(
            "∇f(0) has nonpositive coordinate {i} ({})",
            at_origin[i]
        )));
    }
    let ell = ell_vector(obj, set)?;
    Ok(curvature_from_ratio(&ell, &at_origin))
}

/// Box-corner curvature estimate `1 − minᵢ ∇ᵢf(ū) / ∇ᵢf(l̄)`, clamped to `[0, 1]`.
///
/// For DR-submodular `f` this upper-bounds the curvature over the bounding box,
/// and therefore over the set.
pub fn curvature_no_origin<T: Scalar>(obj: &dyn Objective<T>, set: &dyn FeasibleSet<T>) -> Result<T> {
    check_dims(obj.dim(), set.dim())?;
    let low = obj.gradient(&set.lower_corner())?;
    if let Some(i) = (0..obj.dim()).find(|&i| !(low[i] > T::zero())) {
        return Err(Error::UndefinedCurvature(format!(
            "gradient at the lower corner has nonpositive coordinate {i} ({})",
            low[i]
        )));
    }
    let high = obj.gradient(&bounded_corner(set)?)?;
    Ok(curvature_from_ratio(&high, &low))
}

fn curvature_from_ratio<T: Scalar>(num: &DenseVector<T>, den: &DenseVector<T>) -> T {
    let min_ratio = (0..num.dim()).map(|i| num[i] / den[i]).fold(T::infinity(), T::min);
    (T::one() - min_ratio).max(T::zero()).min(T::one())
}

/// One Hessian sign violation found by [`verify_strong_dr`].
#[derive(Debug, Clone, PartialEq)]
pub struct HessianViolation {
    pub point: Vec<f64>,
    pub row: usize,
    pub col: usize,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongDrReport {
    pub mu: f64,
    pub samples: usize,
    pub violations: Vec<HessianViolation>,
}

impl StrongDrReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `samples` uniform points of `[lower, upper]` and checks
/// `∇²ᵢᵢf ≤ −μ + 1e−9` and `∇²ᵢⱼf ≤ 1e−9` at each.
pub fn verify_strong_dr<T: Scalar>(
    obj: &dyn Objective<T>,
    lower: &DenseVector<T>,
    upper: &DenseVector<T>,
    mu: T,
    samples: usize,
    seed: u64,
) -> Result<StrongDrReport> {
    check_dims(obj.dim(), lower.dim())?;
    check_dims(obj.dim(), upper.dim())?;
    let tol = T::lit(1e-9);
    let mut rng = SplitRng::new(seed);
    let mut violations = Vec::new();
    for _ in 0..samples {
        let x = rng.uniform_vector(lower, upper);
        let h = obj.hessian(&x)?;
        for i in 0..obj.dim() {
            for j in 0..obj.dim() {
                let bound = if i == j { -mu + tol } else { tol };
                if h.get(i, j) > bound {
                    violations.push(HessianViolation {
                        point: x.to_f64_vec(),
                        row: i,
                        col: j,
                        value: h.get(i, j).as_f64(),
                        bound: bound.as_f64(),
                    });
                }
            }
        }
    }
    Ok(StrongDrReport { mu: mu.as_f64(), samples, violations })
}

/// Owned objective of any shipped family.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyObjective<T: Scalar> {
    Quadratic(QuadraticObjective<T>),
    Stability(StabilityObjective<T>),
    NegativeDependence(NegativeDependencePoly<T>),
    MeanField(MeanFieldKLObjective<T>),
}

impl<T: Scalar> AnyObjective<T> {
    pub fn as_dyn(&self) -> &dyn Objective<T> {
        match self {
            AnyObjective::Quadratic(o) => o,
            AnyObjective::Stability(o) => o,
            AnyObjective::NegativeDependence(o) => o,
            AnyObjective::MeanField(o) => o,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{BoxSet, SimplexSet};

    fn v(xs: &[f64]) -> DenseVector<f64> {
        DenseVector::from_f64_slice(xs).unwrap()
    }

    /// `f(x) = a x − ½ b x²` in one dimension.
    fn one_dim(a: f64, b: f64) -> QuadraticObjective<f64> {
        QuadraticObjective::new(SymMatrix::from_f64_rows(&[vec![-b]]).unwrap(), v(&[a]), 0.0).unwrap()
    }

    pub(crate) fn fig2_graph() -> Graph {
        let edges = [
            (1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6),
            (5, 7), (6, 7), (7, 8), (8, 9), (8, 10), (9, 10),
        ];
        Graph::new(10, edges.iter().map(|&(u, v)| (u - 1, v - 1))).unwrap()
    }

    #[test]
    fn mean_field_bound_dominates_sampled_hessians() {
        let kl = MeanFieldKLObjective::<f64>::from_fn(3, 0.05, |s| (s.count_ones() as f64).sqrt()).unwrap();
        let bound = kl.smoothness_bound();
        let mut rng = crate::SplitRng::new(4);
        for _ in 0..50 {
            let x = rng.uniform_vector(&DenseVector::filled(3, 0.05), &DenseVector::filled(3, 0.95));
            let h = kl.hessian(&x).unwrap();
            let row_sum = (0..3).map(|i| h.row(i).iter().map(|v: &f64| v.abs()).sum::<f64>()).fold(0.0, f64::max);
            assert!(row_sum <= bound + 1e-12);
        }
    }

    #[test]
    fn value_examples() {
        let stab = StabilityObjective::<f64>::new(&fig2_graph()).unwrap();
        let x = DenseVector::filled(10, 0.1);
        assert!((stab.value(&x).unwrap() - 1.66).abs() < 1e-12);

        let zero = QuadraticObjective::new(SymMatrix::zeros(3), DenseVector::zeros(3), 0.0).unwrap();
        assert_eq!(zero.value(&v(&[0.3, 0.1, 0.9])).unwrap(), 0.0);

        assert_eq!(one_dim(2.0, 2.0).value(&v(&[1.0])).unwrap(), 1.0);
    }

    #[test]
    fn gradient_examples() {
        let q = QuadraticObjective::new(
            SymMatrix::from_f64_rows(&[vec![-1.0, -0.5], vec![-0.5, -2.0]]).unwrap(),
            v(&[3.0, 4.0]),
            0.0,
        )
        .unwrap();
        assert_eq!(q.gradient(&DenseVector::zeros(2)).unwrap(), v(&[3.0, 4.0]));
        let stab = StabilityObjective::<f64>::new(&fig2_graph()).unwrap();
        assert_eq!(stab.gradient(&DenseVector::zeros(10)).unwrap(), DenseVector::filled(10, 2.0));
    }

    #[test]
    fn hessian_examples() {
        let g = fig2_graph();
        let stab = StabilityObjective::<f64>::new(&g).unwrap();
        let h = stab.hessian(&DenseVector::filled(10, 0.1)).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let expected = if i == j { -2.0 } else if g.has_edge(i, j) { -2.0 } else { 0.0 };
                assert_eq!(h.get(i, j), expected);
            }
        }
        let q = one_dim(2.0, 3.0);
        assert_eq!(q.hessian(&v(&[0.4])).unwrap().get(0, 0), -3.0);

        let kl = MeanFieldKLObjective::<f64>::from_fn(2, 0.05, |s| (s.count_ones() as f64).sqrt()).unwrap();
        let x = v(&[0.3, 0.6]);
        let h = kl.hessian(&x).unwrap();
        assert!((h.get(0, 0) - (-1.0 / 0.3 - 1.0 / 0.7)).abs() < 1e-12);
        assert!(h.get(0, 0) <= -4.0);
    }

    #[test]
    fn centered_form_canonicalization() {
        let rows = vec![vec![-6.0, -8.0], vec![-5.0, -9.0]];
        let q = QuadraticObjective::from_centered_form(&rows).unwrap();
        let x = v(&[0.3, 0.7]);
        // (½x − 1)ᵀ H x computed directly
        let hx = [-6.0 * 0.3 - 8.0 * 0.7, -5.0 * 0.3 - 9.0 * 0.7];
        let direct = (0.5 * 0.3 - 1.0) * hx[0] + (0.5 * 0.7 - 1.0) * hx[1];
        assert!((q.value(&x).unwrap() - direct).abs() < 1e-12);
        assert_eq!(q.linear(), &v(&[11.0, 17.0]));
        assert_eq!(q.strong_dr_param(), 6.0);
    }

    #[test]
    fn ell_vector_examples() {
        let unit = BoxSet::unit(1);
        assert_eq!(ell_vector(&one_dim(2.0, 2.0), &unit).unwrap(), v(&[0.0]));

        let lin = QuadraticObjective::linear_only(v(&[1.0, 2.0, 3.0]));
        let simplex = SimplexSet::standard(3).unwrap();
        assert_eq!(ell_vector(&lin, &simplex).unwrap(), v(&[1.0, 2.0, 3.0]));

        let g = fig2_graph();
        let stab = StabilityObjective::<f64>::new(&g).unwrap();
        let ell = ell_vector(&stab, &SimplexSet::standard(10).unwrap()).unwrap();
        for i in 0..10 {
            assert_eq!(ell[i], 2.0 - 2.0 * (g.degree(i) as f64 + 1.0));
            assert!(ell[i] <= 0.0);
        }
    }

    #[test]
    fn curvature_examples() {
        let unit1 = BoxSet::unit(1);
        let lin = QuadraticObjective::linear_only(v(&[1.0, 2.0]));
        assert_eq!(curvature(&lin, &BoxSet::unit(2)).unwrap(), 0.0);
        assert_eq!(curvature(&one_dim(2.0, 2.0), &unit1).unwrap(), 1.0);
        assert_eq!(curvature(&one_dim(2.0, 1.0), &unit1).unwrap(), 0.5);

        let simplex = SimplexSet::standard(2).unwrap();
        assert!(matches!(curvature(&lin, &simplex), Err(Error::Precondition(_))));
        let nonmono = QuadraticObjective::linear_only(v(&[1.0, 0.0]));
        assert!(matches!(
            curvature(&nonmono, &BoxSet::unit(2)),
            Err(Error::UndefinedCurvature(_))
        ));
    }

    #[test]
    fn curvature_no_origin_examples() {
        let lin = QuadraticObjective::linear_only(v(&[1.0, 2.0]));
        assert_eq!(curvature_no_origin(&lin, &SimplexSet::standard(2).unwrap()).unwrap(), 0.0);

        let f = one_dim(2.0, 2.0);
        let point = BoxSet::new(v(&[0.4]), v(&[0.4])).unwrap();
        assert_eq!(curvature_no_origin(&f, &point).unwrap(), 0.0);

        let inner = BoxSet::new(v(&[0.25]), v(&[0.75])).unwrap();
        assert!((curvature_no_origin(&f, &inner).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let dead = BoxSet::new(v(&[1.0]), v(&[1.0])).unwrap();
        assert!(curvature_no_origin(&f, &dead).is_err());
    }

    #[test]
    fn verify_strong_dr_examples() {
        let stab = StabilityObjective::<f64>::new(&fig2_graph()).unwrap();
        let report =
            verify_strong_dr(&stab, &DenseVector::zeros(10), &DenseVector::ones(10), 2.0, 50, 1).unwrap();
        assert!(report.passed());

        let bad = QuadraticObjective::new(
            SymMatrix::from_f64_rows(&[vec![0.5, -1.0], vec![-1.0, -1.0]]).unwrap(),
            v(&[1.0, 1.0]),
            0.0,
        )
        .unwrap();
        let report = verify_strong_dr(&bad, &DenseVector::zeros(2), &DenseVector::ones(2), 0.0, 5, 1).unwrap();
        assert!(!report.passed());
        assert!(report.violations.iter().all(|v| v.row == 0 && v.col == 0));

        let f = |s: u32| 1.5 * (s.count_ones() as f64).sqrt() + 0.2 * (s & 1) as f64;
        let kl = MeanFieldKLObjective::<f64>::from_fn(4, 0.05, f).unwrap();
        assert!(kl.is_submodular(1e-12));
        let report =
            verify_strong_dr(&kl, &DenseVector::filled(4, 0.1), &DenseVector::filled(4, 0.9), 4.0, 50, 3)
                .unwrap();
        assert!(report.passed());
    }

    #[test]
    fn mean_field_value_matches_direct_kl() {
        let f = |s: u32| (s.count_ones() as f64).sqrt() - 0.3 * ((s >> 1) & 1) as f64;
        let kl = MeanFieldKLObjective::<f64>::from_fn(3, 0.01, f).unwrap();
        let x = v(&[0.2, 0.5, 0.8]);
        let z: f64 = (0..8u32).map(|s| f(s).exp()).sum();
        let mut direct = 0.0;
        for s in 0..8u32 {
            let q: f64 = (0..3).map(|i| if s >> i & 1 == 1 { x[i] } else { 1.0 - x[i] }).product();
            let p = f(s).exp() / z;
            direct += q * (q / p).ln();
        }
        assert!((kl.value(&x).unwrap() + direct).abs() < 1e-12);
        assert!(kl.value(&v(&[0.0, 0.5, 0.5])).is_err());
    }

    #[test]
    fn negative_dependence_validation() {
        let quad = DiagonalTerm::Quadratic { a: 2.0, b: 1.0 };
        let ok = NegativeDependencePoly::new(
            vec![quad, quad, quad],
            vec![Interaction { indices: vec![0, 1, 2], theta: -0.5 }],
            1.0,
            None,
        );
        assert!(ok.is_ok());
        let bad_theta = NegativeDependencePoly::new(
            vec![quad, quad],
            vec![Interaction { indices: vec![0, 1], theta: 0.5 }],
            0.0,
            None,
        );
        assert!(bad_theta.is_err());
        let repeated = NegativeDependencePoly::new(
            vec![quad, quad],
            vec![Interaction { indices: vec![1, 1], theta: -0.5 }],
            0.0,
            None,
        );
        assert!(repeated.is_err());
        assert!(NegativeDependencePoly::new(vec![quad], vec![], 2.0, None).is_err());
        let power = DiagonalTerm::Power { a: 1.0, p: 0.5 };
        assert!(NegativeDependencePoly::new(vec![power], vec![], 0.1, None).is_err());
        // a p (1 − p) u^{p−2} = 0.25 at u = 1
        assert!(NegativeDependencePoly::new(vec![power], vec![], 0.25, Some(v(&[1.0]))).is_ok());
        assert!(NegativeDependencePoly::new(vec![power], vec![], 0.3, Some(v(&[1.0]))).is_err());
    }

    #[test]
    fn negative_dependence_posynomial_hessian_matches_numeric() {
        let poly = NegativeDependencePoly::new(
            vec![
                DiagonalTerm::Quadratic { a: 3.0, b: 2.0 },
                DiagonalTerm::Power { a: 2.0, p: 0.5 },
                DiagonalTerm::Quadratic { a: 3.0, b: 2.5 },
            ],
            vec![
                Interaction { indices: vec![0, 1], theta: -0.4 },
                Interaction { indices: vec![0, 1, 2], theta: -0.7 },
            ],
            0.0,
            None,
        )
        .unwrap();
        let x = v(&[0.4, 0.9, 0.3]);
        let numeric = poly.hessian(&x).unwrap();
        let symbolic = poly.neg_hessian_posynomials().unwrap().eval(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((numeric.get(i, j) + symbolic.get(i, j)).abs() < 1e-14);
            }
        }
    }
}
