//! Smoothness constant `L` through Perron-Frobenius eigenvalues.
//!
//! For a twice differentiable DR-submodular `f`, `−∇²f(x)` is entrywise
//! nonnegative and its largest eigenvalue is its Perron-Frobenius eigenvalue;
//! a uniform bound on that eigenvalue over the set is a valid `L`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_dims, Error, Result};
use crate::gp::{solve_gp, GpProblem};
use crate::numeric::{DenseVector, SymMatrix};
use crate::objectives::Objective;
use crate::posynomial::{Monomial, Posynomial};
use crate::scalar::Scalar;
use crate::sets::FeasibleSet;

pub const PF_TOL: f64 = 1e-12;
pub const PF_MAX_ITER: usize = 200_000;
pub const GP_TOL: f64 = 1e-9;
/// Relative floor `x ≥ floor · ū` used as the lower variable bound in the
/// eigenvalue program when the set's lower corner is zero.
pub const GP_POSITIVITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PfResult<T: Scalar> {
    pub lambda: T,
    /// Positive eigenvector with unit sum.
    pub eigvec: DenseVector<T>,
    /// `‖Mv − λv‖ / ‖v‖`.
    pub residual: T,
    pub iterations: usize,
}

fn check_nonnegative<T: Scalar>(m: &SymMatrix<T>) -> Result<()> {
    if m.min_entry() < T::zero() {
        Err(Error::InvalidArgument("matrix has negative entries".into()))
    } else {
        Ok(())
    }
}

/// Irreducibility of a symmetric nonnegative matrix: its support graph
/// (edge `i–j` iff `Mᵢⱼ > 0`, `i ≠ j`) is connected. A 1×1 matrix is
/// irreducible iff its entry is positive.
pub fn is_irreducible<T: Scalar>(m: &SymMatrix<T>) -> Result<bool> {
    check_nonnegative(m)?;
    let n = m.dim();
    if n == 1 {
        return Ok(m.get(0, 0) > T::zero());
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if !seen[j] && j != i && m.get(i, j) > T::zero() {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(seen.into_iter().all(|s| s))
}

/// Power iteration on `M + εI` from the uniform vector.
///
/// The shift is a quarter of the maximum row sum (an upper bound on the
/// spectral radius), which separates `λ_pf` from `−λ_pf` on bipartite support
/// graphs. Stops once `‖Mv − λv‖ / ‖v‖ ≤ tol · λ`.
pub fn pf_eigenvalue<T: Scalar>(m: &SymMatrix<T>, tol: T, max_iter: usize) -> Result<PfResult<T>> {
    check_nonnegative(m)?;
    let n = m.dim();
    let bound = m.max_abs_row_sum();
    if bound == T::zero() {
        return Err(Error::InvalidArgument("zero matrix has no positive eigenvalue".into()));
    }
    let shift = (T::lit(0.25) * bound).max(tol);
    let shifted = m.add_identity(shift);
    let mut v = DenseVector::filled(n, T::one() / T::from_usize_lossy(n));
    let mut lambda = T::zero();
    let mut residual = T::infinity();
    for iter in 1..=max_iter {
        let mv = m.mul_vec(&v)?;
        let vv = v.norm_squared();
        lambda = mv.dot(&v)? / vv;
        residual = mv.axpy(-lambda, &v).norm2() / vv.sqrt();
        if residual <= tol * lambda.abs().max(T::min_positive_value()) {
            return Ok(PfResult { lambda, eigvec: v, residual, iterations: iter });
        }
        let next = shifted.mul_vec(&v)?;
        v = next.scale(T::one() / next.sum());
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual: residual.as_f64(),
        context: format!("power iteration stalled at λ ≈ {lambda}"),
        best: v.to_f64_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothnessMode {
    /// `λ_pf(−∇²f)` for Hessians that do not depend on `x`.
    Constant,
    /// `λ_pf` of the entrywise supremum of `−∇²f` over the set's bounding box.
    Corner,
    /// The eigenvalue geometric program, solved jointly over `(x, v, λ)`.
    Gp,
}

impl fmt::Display for SmoothnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmoothnessMode::Constant => "constant",
            SmoothnessMode::Corner => "corner",
            SmoothnessMode::Gp => "gp",
        })
    }
}

impl FromStr for SmoothnessMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Self::Constant),
            "corner" => Ok(Self::Corner),
            "gp" => Ok(Self::Gp),
            other => Err(Error::InvalidArgument(format!("unknown smoothness mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessEstimate<T: Scalar> {
    pub l: T,
    pub mode: SmoothnessMode,
    /// Eigen-residual (`constant`/`corner`) or log-scale constraint violation (`gp`).
    pub residual: T,
    pub iterations: usize,
    /// The GP's `x` block, for `gp` mode.
    pub gp_point: Option<DenseVector<T>>,
}

/// Smoothness constant of `obj` over `set`; never below the declared `μ`.
pub fn smoothness_constant<T: Scalar>(
    obj: &dyn Objective<T>,
    set: &dyn FeasibleSet<T>,
    mode: SmoothnessMode,
) -> Result<SmoothnessEstimate<T>> {
    check_dims(obj.dim(), set.dim())?;
    let estimate = match mode {
        SmoothnessMode::Constant => {
            if !obj.hessian_is_constant() {
                return Err(Error::Unsupported(format!(
                    "{} has an x-dependent Hessian; use corner or gp mode",
                    obj.name()
                )));
            }
            let neg = obj.hessian(&set.upper_corner())?.scale(-T::one());
            pf_mode(neg, mode)?
        }
        SmoothnessMode::Corner => {
            let neg = match obj.neg_hessian_posynomials() {
                Ok(pm) => pm.box_sup(&set.lower_corner(), &set.upper_corner())?,
                Err(_) if obj.hessian_is_constant() => {
                    obj.hessian(&set.upper_corner())?.scale(-T::one())
                }
                Err(e) => return Err(e),
            };
            pf_mode(neg, mode)?
        }
        SmoothnessMode::Gp => {
            let problem = build_pf_gp(obj, set)?;
            let sol = solve_gp(&problem, T::lit(GP_TOL))?;
            let n = obj.dim();
            let x = DenseVector::from_fn(n, |i| sol.variables[i]);
            SmoothnessEstimate {
                l: sol.optimum,
                mode,
                residual: sol.max_violation,
                iterations: sol.bisection_steps,
                gp_point: Some(x),
            }
        }
    };
    let mu = obj.strong_dr_param();
    if estimate.l < mu * (T::one() - T::lit(1e-9)) {
        return Err(Error::Precondition(format!(
            "computed L = {} is below the declared μ = {mu}",
            estimate.l
        )));
    }
    Ok(estimate)
}

fn pf_mode<T: Scalar>(neg_hessian: SymMatrix<T>, mode: SmoothnessMode) -> Result<SmoothnessEstimate<T>> {
    if neg_hessian.min_entry() < T::zero() {
        return Err(Error::Unsupported(
            "−∇²f has negative entries, so the objective is not DR-submodular".into(),
        ));
    }
    let pf = pf_eigenvalue(&neg_hessian, T::lit(PF_TOL), PF_MAX_ITER)?;
    Ok(SmoothnessEstimate {
        l: pf.lambda,
        mode,
        residual: pf.residual,
        iterations: pf.iterations,
        gp_point: None,
    })
}

/// Eigenvalue program over variables `(x, v, λ)` (in that order):
/// minimize `λ` subject to `λ⁻¹ vᵢ⁻¹ Σⱼ (−∇²ᵢⱼf(x)) vⱼ ≤ 1` for every `i`,
/// `xᵢ / ūᵢ ≤ 1`, `x̲ᵢ / xᵢ ≤ 1`, and `Π vᵢ = 1` to fix the scale of `v`.
///
/// `x̲` is the set's lower corner, or `GP_POSITIVITY_FLOOR · ū` where that
/// corner is zero.
pub fn build_pf_gp<T: Scalar>(obj: &dyn Objective<T>, set: &dyn FeasibleSet<T>) -> Result<GpProblem<T>> {
    check_dims(obj.dim(), set.dim())?;
    let n = obj.dim();
    let vars = 2 * n + 1;
    let lam = 2 * n;
    let entries = obj.neg_hessian_posynomials().map_err(|e| match e {
        Error::Formulation(msg) => Error::Formulation(msg),
        other => Error::Formulation(format!("Hessian is not posynomial: {other}")),
    })?;
    let upper = set.upper_corner();
    let lower = set.lower_corner();

    let mut inequalities = Vec::with_capacity(3 * n);
    for i in 0..n {
        let mut terms = Vec::new();
        for j in 0..n {
            for term in entries.entry(i, j) {
                let mut exps = vec![T::zero(); vars];
                exps[..n].copy_from_slice(term.exponents());
                exps[n + j] += T::one();
                exps[n + i] -= T::one();
                exps[lam] = -T::one();
                terms.push(Monomial::new(term.coefficient(), exps)?);
            }
        }
        if terms.is_empty() {
            return Err(Error::Formulation(format!(
                "row {} of −∇²f is identically zero",
                i + 1
            )));
        }
        inequalities.push(Posynomial::new(terms)?);
    }
    for i in 0..n {
        let mut exps = vec![T::zero(); vars];
        exps[i] = T::one();
        inequalities.push(Posynomial::new(vec![Monomial::new(T::one() / upper[i], exps.clone())?])?);
        let floor = if lower[i] > T::zero() { lower[i] } else { upper[i] * T::lit(GP_POSITIVITY_FLOOR) };
        exps[i] = -T::one();
        inequalities.push(Posynomial::new(vec![Monomial::new(floor, exps)?])?);
    }
    let mut objective = vec![T::zero(); vars];
    objective[lam] = T::one();
    let mut scale = vec![T::zero(); vars];
    for e in scale.iter_mut().skip(n).take(n) {
        *e = T::one();
    }
    GpProblem::new(
        Monomial::new(T::one(), objective)?,
        inequalities,
        vec![Monomial::new(T::one(), scale)?],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::objectives::{DiagonalTerm, NegativeDependencePoly, QuadraticObjective, StabilityObjective};
    use crate::sets::BoxSet;

    fn m(rows: &[Vec<f64>]) -> SymMatrix<f64> {
        SymMatrix::from_f64_rows(rows).unwrap()
    }

    #[test]
    fn irreducibility_examples() {
        assert!(!is_irreducible(&m(&[vec![1.0, 0.0], vec![0.0, 2.0]])).unwrap());
        assert!(is_irreducible(&m(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap());
        assert!(is_irreducible(&m(&[vec![3.0]])).unwrap());
        assert!(is_irreducible(&m(&[vec![0.0, -1.0], vec![-1.0, 0.0]])).is_err());
    }

    #[test]
    fn pf_examples() {
        let r = pf_eigenvalue(&m(&[vec![2.0, 1.0], vec![1.0, 2.0]]), 1e-12, 10_000).unwrap();
        assert!((r.lambda - 3.0).abs() < 1e-12);
        assert!((r.eigvec[0] - 0.5).abs() < 1e-9 && (r.eigvec[1] - 0.5).abs() < 1e-9);

        let k3 = Graph::complete(3).adjacency::<f64>().add_identity(1.0).scale(2.0);
        assert!((pf_eigenvalue(&k3, 1e-12, 10_000).unwrap().lambda - 6.0).abs() < 1e-10);

        let id = SymMatrix::<f64>::identity(4);
        assert!((pf_eigenvalue(&id, 1e-12, 10).unwrap().lambda - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pf_handles_bipartite_support() {
        // path 1–2–3 has eigenvalues ±√2 and 0
        let path = m(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]);
        let r = pf_eigenvalue(&path, 1e-12, 100_000).unwrap();
        assert!((r.lambda - 2f64.sqrt()).abs() < 1e-10);
        assert!(r.eigvec.min_entry() > 0.0);
    }

    #[test]
    fn pf_rejects_bad_input() {
        assert!(pf_eigenvalue(&SymMatrix::<f64>::zeros(2), 1e-12, 10).is_err());
        assert!(matches!(
            pf_eigenvalue(&m(&[vec![2.0, 1.0], vec![1.0, 1.9]]), 1e-15, 1),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn scalar_hessian_gives_mu() {
        let q = QuadraticObjective::new(
            SymMatrix::<f64>::identity(3).scale(-2.5),
            DenseVector::ones(3),
            0.0,
        )
        .unwrap();
        let est = smoothness_constant(&q, &BoxSet::unit(3), SmoothnessMode::Constant).unwrap();
        assert!((est.l - 2.5).abs() < 1e-12);
    }

    #[test]
    fn gp_one_dimensional_and_diagonal() {
        let q = QuadraticObjective::new(m(&[vec![-3.0]]), DenseVector::ones(1), 0.0).unwrap();
        let unit = BoxSet::unit(1);
        let gp = build_pf_gp(&q, &unit).unwrap();
        // row constraint is b λ⁻¹ ≤ 1 once v cancels
        let row = &gp.inequalities()[0];
        assert_eq!(row.terms().len(), 1);
        assert_eq!(row.terms()[0].coefficient(), 3.0);
        assert_eq!(row.terms()[0].exponents(), &[0.0, 0.0, -1.0]);
        let est = smoothness_constant(&q, &unit, SmoothnessMode::Gp).unwrap();
        assert!((est.l - 3.0).abs() < 1e-8);

        let diag = NegativeDependencePoly::<f64>::new(
            vec![
                DiagonalTerm::Quadratic { a: 5.0, b: 1.5 },
                DiagonalTerm::Quadratic { a: 5.0, b: 4.0 },
                DiagonalTerm::Quadratic { a: 5.0, b: 2.0 },
            ],
            vec![],
            1.0,
            None,
        )
        .unwrap();
        let est = smoothness_constant(&diag, &BoxSet::unit(3), SmoothnessMode::Gp).unwrap();
        assert!((est.l - 4.0).abs() < 1e-7, "{}", est.l);
    }

    #[test]
    fn gp_matches_pf_for_stability() {
        let g = Graph::complete(3);
        let stab = StabilityObjective::<f64>::new(&g).unwrap();
        let unit = BoxSet::unit(3);
        let constant = smoothness_constant(&stab, &unit, SmoothnessMode::Constant).unwrap();
        let gp = smoothness_constant(&stab, &unit, SmoothnessMode::Gp).unwrap();
        assert!((constant.l - 6.0).abs() < 1e-10);
        assert!((gp.l - constant.l).abs() < 1e-6 * constant.l);
    }

    #[test]
    fn constant_mode_rejects_varying_hessian() {
        let poly = NegativeDependencePoly::new(
            vec![DiagonalTerm::Quadratic { a: 2.0, b: 1.0 }; 3],
            vec![crate::objectives::Interaction { indices: vec![0, 1, 2], theta: -1.0 }],
            1.0,
            None,
        )
        .unwrap();
        assert!(matches!(
            smoothness_constant(&poly, &BoxSet::unit(3), SmoothnessMode::Constant),
            Err(Error::Unsupported(_))
        ));
        assert!(smoothness_constant(&poly, &BoxSet::unit(3), SmoothnessMode::Corner).is_ok());
    }
}
