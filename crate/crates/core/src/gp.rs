//! Geometric programs in posynomial form, solved in log variables.
//!
//! With `y = log x` each posynomial constraint becomes the convex
//! `log Σ exp(⟨aₛ, y⟩ + log cₛ) ≤ 0`, each monomial equality an affine
//! equation, and the monomial objective an affine function. The optimum is
//! located by bisection on the log-objective level `t`. Feasibility of a level
//! is decided by a phase-1 problem that minimizes the largest constraint
//! value; phase 1 runs a log-barrier Newton method with equality-constrained
//! steps, so that each decision is accurate to ~1e−12 in log scale.

use crate::error::{check_dims, Error, Result};
use crate::linalg::solve_dense;
use crate::numeric::DenseVector;
use crate::posynomial::{Monomial, Posynomial};
use crate::scalar::Scalar;

/// `minimize objective(x)` s.t. `pᵢ(x) ≤ 1`, `mⱼ(x) = 1`, `x ≻ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GpProblem<T: Scalar> {
    vars: usize,
    objective: Monomial<T>,
    inequalities: Vec<Posynomial<T>>,
    equalities: Vec<Monomial<T>>,
}

impl<T: Scalar> GpProblem<T> {
    pub fn new(
        objective: Monomial<T>,
        inequalities: Vec<Posynomial<T>>,
        equalities: Vec<Monomial<T>>,
    ) -> Result<Self> {
        let vars = objective.vars();
        if vars == 0 {
            return Err(Error::InvalidArgument("geometric program needs variables".into()));
        }
        for p in &inequalities {
            check_dims(vars, p.vars())?;
        }
        for m in &equalities {
            check_dims(vars, m.vars())?;
        }
        Ok(Self { vars, objective, inequalities, equalities })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn objective(&self) -> &Monomial<T> {
        &self.objective
    }

    pub fn inequalities(&self) -> &[Posynomial<T>] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[Monomial<T>] {
        &self.equalities
    }

    /// Largest `log pᵢ(x)` over the inequalities and `|log mⱼ(x)|` over the
    /// equalities, at a positive point.
    pub fn max_violation(&self, x: &DenseVector<T>) -> Result<T> {
        check_dims(self.vars, x.dim())?;
        if x.min_entry() <= T::zero() {
            return Err(Error::Domain("GP variables must be positive".into()));
        }
        let y: Vec<T> = x.iter().map(|v| v.ln()).collect();
        let mut worst = T::neg_infinity();
        for p in &self.inequalities {
            worst = worst.max(p.log_sum_exp(&y));
        }
        for m in &self.equalities {
            worst = worst.max(m.log_affine(&y).abs());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpSolution<T: Scalar> {
    /// Objective value at `variables`; within the requested relative
    /// tolerance of the true optimum.
    pub optimum: T,
    pub variables: DenseVector<T>,
    /// Largest log constraint value at `variables` (≤ 0 up to round-off).
    pub max_violation: T,
    pub bisection_steps: usize,
    pub newton_steps: usize,
}

/// Iteration limits for [`solve_gp_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpSettings {
    pub max_bisection: usize,
    pub max_newton: usize,
    /// Target barrier duality gap for phase 1.
    pub phase1_gap: f64,
}

impl Default for GpSettings {
    fn default() -> Self {
        Self { max_bisection: 200, max_newton: 200, phase1_gap: 1e-12 }
    }
}

/// Solves to relative tolerance `tol` on the optimum.
pub fn solve_gp<T: Scalar>(problem: &GpProblem<T>, tol: T) -> Result<GpSolution<T>> {
    solve_gp_with(problem, tol, GpSettings::default())
}

pub fn solve_gp_with<T: Scalar>(problem: &GpProblem<T>, tol: T, settings: GpSettings) -> Result<GpSolution<T>> {
    if !(tol > T::zero() && tol < T::one()) {
        return Err(Error::InvalidArgument("tolerance must lie in (0, 1)".into()));
    }
    let lp = LogProblem::new(problem)?;
    let mut newton_steps = 0;

    let start = lp.equality_point()?;
    let first = lp.phase1(&start, None, &settings, &mut newton_steps)?;
    if first.violation > T::zero() {
        return Err(Error::Infeasible { violation: first.violation.as_f64() });
    }
    let mut best_y = first.y;
    let mut hi = lp.objective_log(&best_y);

    // bracket: walk down until a level is infeasible
    let mut lo = hi;
    let mut step = T::one();
    let mut bisection_steps = 0;
    loop {
        bisection_steps += 1;
        if bisection_steps > settings.max_bisection {
            return Err(Error::Convergence {
                iterations: bisection_steps,
                residual: (hi - lo).as_f64(),
                context: "objective appears unbounded below".into(),
                best: best_y.iter().map(|v| v.exp().as_f64()).collect(),
            });
        }
        let level = hi - step;
        let probe = lp.phase1(&best_y, Some(level), &settings, &mut newton_steps)?;
        if probe.violation <= T::zero() {
            best_y = probe.y;
            hi = lp.objective_log(&best_y).min(level);
            step = step * T::lit(2.0);
        } else {
            lo = level;
            break;
        }
    }

    // log-scale width that keeps exp(hi) within relative tol of exp(lo)
    let width = -(T::one() - tol).ln();
    while hi - lo > width {
        bisection_steps += 1;
        if bisection_steps > settings.max_bisection {
            return Err(Error::Convergence {
                iterations: bisection_steps,
                residual: (hi - lo).as_f64(),
                context: "bisection on the objective level did not close".into(),
                best: best_y.iter().map(|v| v.exp().as_f64()).collect(),
            });
        }
        let mid = (lo + hi) / T::lit(2.0);
        let probe = lp.phase1(&best_y, Some(mid), &settings, &mut newton_steps)?;
        if probe.violation <= T::zero() {
            best_y = probe.y;
            hi = lp.objective_log(&best_y).min(mid);
        } else {
            lo = mid;
        }
    }

    let variables = DenseVector::new(best_y.iter().map(|v| v.exp()).collect())?;
    Ok(GpSolution {
        optimum: problem.objective.eval(variables.as_slice())?,
        max_violation: problem.max_violation(&variables)?,
        variables,
        bisection_steps,
        newton_steps,
    })
}

/// Log-transformed problem: constraint k is `LSE(A_k y + b_k) ≤ 0`.
struct LogProblem<T: Scalar> {
    vars: usize,
    constraints: Vec<LseTerm<T>>,
    objective: (Vec<T>, T),
    eq_rows: Vec<Vec<T>>,
    eq_rhs: Vec<T>,
    /// Orthonormal basis of the null space of the equality rows.
    free_basis: Vec<Vec<T>>,
}

struct LseTerm<T: Scalar> {
    rows: Vec<Vec<T>>,
    offsets: Vec<T>,
}

impl<T: Scalar> LseTerm<T> {
    fn from_posynomial(p: &Posynomial<T>) -> Self {
        Self {
            rows: p.terms().iter().map(|t| t.exponents().to_vec()).collect(),
            offsets: p.terms().iter().map(|t| t.coefficient().ln()).collect(),
        }
    }

    fn from_affine(row: Vec<T>, offset: T) -> Self {
        Self { rows: vec![row], offsets: vec![offset] }
    }

    /// Value, gradient and Hessian of `LSE(A y + b)`.
    fn eval(&self, y: &[T], want_hessian: bool) -> (T, Vec<T>, Option<Vec<Vec<T>>>) {
        let m = y.len();
        let z: Vec<T> = self
            .rows
            .iter()
            .zip(&self.offsets)
            .map(|(row, &b)| row.iter().zip(y).map(|(&a, &yi)| a * yi).sum::<T>() + b)
            .collect();
        let zmax = z.iter().copied().fold(T::neg_infinity(), T::max);
        let w: Vec<T> = z.iter().map(|&zi| (zi - zmax).exp()).collect();
        let total: T = w.iter().copied().sum();
        let value = zmax + total.ln();
        let p: Vec<T> = w.iter().map(|&wi| wi / total).collect();
        let mut grad = vec![T::zero(); m];
        for (row, &pk) in self.rows.iter().zip(&p) {
            for i in 0..m {
                grad[i] += pk * row[i];
            }
        }
        let hess = want_hessian.then(|| {
            let mut h = vec![vec![T::zero(); m]; m];
            for (row, &pk) in self.rows.iter().zip(&p) {
                if pk == T::zero() {
                    continue;
                }
                for i in 0..m {
                    if row[i] == T::zero() {
                        continue;
                    }
                    for j in 0..m {
                        h[i][j] += pk * row[i] * row[j];
                    }
                }
            }
            for i in 0..m {
                for j in 0..m {
                    h[i][j] -= grad[i] * grad[j];
                }
            }
            h
        });
        (value, grad, hess)
    }
}

struct Phase1<T: Scalar> {
    y: Vec<T>,
    violation: T,
}

impl<T: Scalar> LogProblem<T> {
    fn new(problem: &GpProblem<T>) -> Result<Self> {
        let eq_rows: Vec<Vec<T>> = problem.equalities.iter().map(|m| m.exponents().to_vec()).collect();
        let eq_rhs: Vec<T> = problem.equalities.iter().map(|m| -m.coefficient().ln()).collect();
        let free_basis = null_space_basis(&eq_rows, problem.vars);
        Ok(Self {
            vars: problem.vars,
            constraints: problem.inequalities.iter().map(LseTerm::from_posynomial).collect(),
            objective: (problem.objective.exponents().to_vec(), problem.objective.coefficient().ln()),
            eq_rows,
            eq_rhs,
            free_basis,
        })
    }

    fn objective_log(&self, y: &[T]) -> T {
        self.objective.0.iter().zip(y).map(|(&a, &yi)| a * yi).sum::<T>() + self.objective.1
    }

    /// Minimum-norm solution of the equality system `E y = r`.
    fn equality_point(&self) -> Result<Vec<T>> {
        let p = self.eq_rows.len();
        if p == 0 {
            return Ok(vec![T::zero(); self.vars]);
        }
        let gram: Vec<Vec<T>> = (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| self.eq_rows[i].iter().zip(&self.eq_rows[j]).map(|(&a, &b)| a * b).sum())
                    .collect()
            })
            .collect();
        let w = solve_dense(gram, self.eq_rhs.clone()).map_err(|_| {
            Error::Formulation("monomial equality constraints are linearly dependent".into())
        })?;
        Ok((0..self.vars).map(|k| (0..p).map(|i| self.eq_rows[i][k] * w[i]).sum()).collect())
    }

    fn max_constraint(&self, y: &[T], level: Option<T>) -> T {
        let mut worst = T::neg_infinity();
        for c in &self.constraints {
            worst = worst.max(c.eval(y, false).0);
        }
        if let Some(t) = level {
            worst = worst.max(self.objective_log(y) - t);
        }
        worst
    }

    /// Minimizes `s` subject to every constraint ≤ `s` (and the objective cap
    /// `objective − level ≤ s`), starting from an equality-feasible `y0`.
    /// Returns as soon as a point with all constraints ≤ 0 is found.
    fn phase1(&self, y0: &[T], level: Option<T>, settings: &GpSettings, newton_steps: &mut usize) -> Result<Phase1<T>> {
        let mut terms: Vec<&LseTerm<T>> = self.constraints.iter().collect();
        let cap;
        if let Some(t) = level {
            cap = LseTerm::from_affine(self.objective.0.clone(), self.objective.1 - t);
            terms.push(&cap);
        }
        let m = self.vars;
        let k = terms.len();
        let mut y = y0.to_vec();
        let current = self.max_constraint(&y, level);
        if current <= T::zero() {
            return Ok(Phase1 { y, violation: current });
        }
        if k == 0 {
            return Ok(Phase1 { y, violation: T::neg_infinity() });
        }
        let mut s = current + T::one();
        let mut tau = T::one();
        let gap = T::lit(settings.phase1_gap);
        let mut best = Phase1 { y: y.clone(), violation: current };

        // barrier objective τ·s − Σ log(s − φ_k(y))
        let barrier = |y: &[T], s: T, tau: T| -> Option<T> {
            let mut total = tau * s;
            for term in &terms {
                let r = s - term.eval(y, false).0;
                if !(r > T::zero()) {
                    return None;
                }
                total -= r.ln();
            }
            Some(total)
        };

        loop {
            for _ in 0..settings.max_newton {
                *newton_steps += 1;
                let dim = m + 1;
                let mut grad = vec![T::zero(); dim];
                let mut hess = vec![vec![T::zero(); dim]; dim];
                grad[m] = tau;
                for term in &terms {
                    let (phi, g, h) = term.eval(&y, true);
                    let h = h.expect("requested");
                    let r = s - phi;
                    let inv = T::one() / r;
                    let inv2 = inv * inv;
                    let mut d = g.clone();
                    d.push(-T::one());
                    for i in 0..m {
                        grad[i] += g[i] * inv;
                    }
                    grad[m] -= inv;
                    for i in 0..dim {
                        for j in 0..dim {
                            hess[i][j] += inv2 * d[i] * d[j];
                        }
                    }
                    for i in 0..m {
                        for j in 0..m {
                            hess[i][j] += inv * h[i][j];
                        }
                    }
                }
                let ridge = T::lit(1e-12)
                    * (T::one() + (0..dim).map(|i| hess[i][i].abs()).fold(T::zero(), T::max));
                for (i, row) in hess.iter_mut().enumerate() {
                    row[i] += ridge;
                }
                // Newton step restricted to the equality null space
                let basis = &self.free_basis;
                let r = basis.len();
                let mut reduced = vec![vec![T::zero(); r + 1]; r + 1];
                let mut rhs = vec![T::zero(); r + 1];
                let hz: Vec<Vec<T>> = basis
                    .iter()
                    .map(|z| (0..dim).map(|i| (0..m).map(|j| hess[i][j] * z[j]).sum()).collect())
                    .collect();
                for a in 0..r {
                    rhs[a] = -(0..m).map(|i| basis[a][i] * grad[i]).sum::<T>();
                    for b in 0..r {
                        reduced[a][b] = (0..m).map(|i| basis[a][i] * hz[b][i]).sum();
                    }
                    reduced[a][r] = hz[a][m];
                    reduced[r][a] = hz[a][m];
                }
                reduced[r][r] = hess[m][m];
                rhs[r] = -grad[m];
                let step = solve_dense(reduced, rhs)?;
                let mut dir = vec![T::zero(); dim];
                for (a, z) in basis.iter().enumerate() {
                    for i in 0..m {
                        dir[i] += step[a] * z[i];
                    }
                }
                dir[m] = step[r];
                let decrement: T = -grad.iter().zip(&dir).map(|(&g, &d)| g * d).sum::<T>();
                if decrement <= T::lit(1e-14) {
                    break;
                }
                let base = barrier(&y, s, tau).expect("iterate stays interior");
                let mut alpha = T::one();
                let mut accepted = false;
                for _ in 0..60 {
                    let y_try: Vec<T> = (0..m).map(|i| y[i] + alpha * dir[i]).collect();
                    let s_try = s + alpha * dir[m];
                    if let Some(value) = barrier(&y_try, s_try, tau) {
                        if value <= base - T::lit(0.25) * alpha * decrement {
                            y = y_try;
                            s = s_try;
                            accepted = true;
                            break;
                        }
                    }
                    alpha = alpha * T::lit(0.5);
                }
                let actual = self.max_constraint(&y, level);
                if actual < best.violation {
                    best = Phase1 { y: y.clone(), violation: actual };
                }
                if best.violation <= T::zero() {
                    return Ok(best);
                }
                if !accepted {
                    break;
                }
            }
            if T::from_usize_lossy(k) / tau <= gap {
                return Ok(best);
            }
            tau = tau * T::lit(10.0);
            if tau > T::lit(1e30) {
                return Ok(best);
            }
        }
    }
}

/// Orthonormal basis of `{d : E d = 0}` by Gram-Schmidt on the projected
/// coordinate vectors.
fn null_space_basis<T: Scalar>(rows: &[Vec<T>], vars: usize) -> Vec<Vec<T>> {
    let mut row_basis: Vec<Vec<T>> = Vec::new();
    let mut basis: Vec<Vec<T>> = Vec::new();
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>();
    let push_orthonormal = |set: &mut Vec<Vec<T>>, others: &[Vec<T>], mut v: Vec<T>| {
        for _ in 0..2 {
            for q in others.iter().chain(set.iter()) {
                let c = dot(&v, q);
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > T::lit(1e-8) {
            set.push(v.into_iter().map(|x| x / norm).collect());
        }
    };
    for row in rows {
        let mut set = std::mem::take(&mut row_basis);
        let scale = dot(row, row).sqrt().max(T::min_positive_value());
        push_orthonormal(&mut set, &[], row.iter().map(|&a| a / scale).collect());
        row_basis = set;
    }
    for k in 0..vars {
        let mut e = vec![T::zero(); vars];
        e[k] = T::one();
        push_orthonormal(&mut basis, &row_basis, e);
    }
    basis
}
