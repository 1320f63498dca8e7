//! Monomials, posynomials, and posynomial-valued matrices.

use crate::error::{check_dims, Error, Result};
use crate::numeric::{DenseVector, SymMatrix};
use crate::scalar::Scalar;

/// `c · x₁^{a₁} ⋯ x_m^{a_m}` with `c > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<T: Scalar> {
    coefficient: T,
    exponents: Vec<T>,
}

impl<T: Scalar> Monomial<T> {
    pub fn new(coefficient: T, exponents: Vec<T>) -> Result<Self> {
        if !(coefficient > T::zero()) || !coefficient.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "monomial coefficient must be positive and finite, got {coefficient}"
            )));
        }
        if exponents.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("monomial exponents must be finite".into()));
        }
        Ok(Self { coefficient, exponents })
    }

    pub fn constant(coefficient: T, vars: usize) -> Result<Self> {
        Self::new(coefficient, vec![T::zero(); vars])
    }

    pub fn coefficient(&self) -> T {
        self.coefficient
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    pub fn vars(&self) -> usize {
        self.exponents.len()
    }

    /// Evaluates at a strictly positive point.
    pub fn eval(&self, x: &[T]) -> Result<T> {
        check_dims(self.vars(), x.len())?;
        let mut value = self.coefficient;
        for (&a, &xi) in self.exponents.iter().zip(x) {
            if a != T::zero() {
                if !(xi > T::zero()) {
                    return Err(Error::Domain(format!(
                        "monomial with exponent {a} evaluated at nonpositive {xi}"
                    )));
                }
                value *= xi.powf(a);
            }
        }
        Ok(value)
    }

    /// `log c + ⟨a, y⟩`, the monomial in log variables `y = log x`.
    pub fn log_affine(&self, y: &[T]) -> T {
        self.coefficient.ln()
            + self.exponents.iter().zip(y).map(|(&a, &yi)| a * yi).sum::<T>()
    }

    /// Pads the exponent vector with zeros to `vars` variables, keeping the
    /// first `self.vars()` positions.
    pub fn embed(&self, vars: usize, offset: usize) -> Self {
        let mut exponents = vec![T::zero(); vars];
        exponents[offset..offset + self.vars()].copy_from_slice(&self.exponents);
        Self { coefficient: self.coefficient, exponents }
    }

    /// Product of two monomials over the same variables.
    pub fn times(&self, other: &Self) -> Self {
        Self {
            coefficient: self.coefficient * other.coefficient,
            exponents: self.exponents.iter().zip(&other.exponents).map(|(&a, &b)| a + b).collect(),
        }
    }

    /// Largest value over the box `[lower, upper]`: each variable sits at the
    /// upper bound for positive exponents and the lower bound for negative ones.
    pub fn box_sup(&self, lower: &[T], upper: &[T]) -> Result<T> {
        let point: Vec<T> = self
            .exponents
            .iter()
            .enumerate()
            .map(|(i, &a)| if a < T::zero() { lower[i] } else { upper[i] })
            .collect();
        self.eval(&point)
    }
}

/// Nonempty sum of monomials over a common variable list.
#[derive(Debug, Clone, PartialEq)]
pub struct Posynomial<T: Scalar> {
    terms: Vec<Monomial<T>>,
}

impl<T: Scalar> Posynomial<T> {
    pub fn new(terms: Vec<Monomial<T>>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidArgument("posynomial needs at least one term".into()));
        };
        let vars = first.vars();
        if terms.iter().any(|t| t.vars() != vars) {
            return Err(Error::InvalidArgument("posynomial terms disagree on variable count".into()));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[Monomial<T>] {
        &self.terms
    }

    pub fn vars(&self) -> usize {
        self.terms[0].vars()
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// `log Σ exp(log cₛ + ⟨aₛ, y⟩)` evaluated stably.
    pub fn log_sum_exp(&self, y: &[T]) -> T {
        let logs: Vec<T> = self.terms.iter().map(|t| t.log_affine(y)).collect();
        let max = logs.iter().copied().fold(T::neg_infinity(), T::max);
        max + logs.iter().map(|&l| (l - max).exp()).sum::<T>().ln()
    }
}

/// Symmetric matrix whose entries are posynomials in `x`, or zero.
///
/// Used for `−∇²f(x)` of objectives whose Hessian entries are posynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct PosynomialMatrix<T: Scalar> {
    n: usize,
    /// Row-major; an empty list is the zero entry.
    entries: Vec<Vec<Monomial<T>>>,
}

impl<T: Scalar> PosynomialMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![Vec::new(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds a term to entry (i, j) and its mirror.
    pub fn push(&mut self, i: usize, j: usize, term: Monomial<T>) {
        if i != j {
            self.entries[j * self.n + i].push(term.clone());
        }
        self.entries[i * self.n + j].push(term);
    }

    pub fn entry(&self, i: usize, j: usize) -> &[Monomial<T>] {
        &self.entries[i * self.n + j]
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().flatten().all(|t| t.exponents().iter().all(|&a| a == T::zero()))
    }

    /// Numeric value at a positive point.
    pub fn eval(&self, x: &DenseVector<T>) -> Result<SymMatrix<T>> {
        check_dims(self.n, x.dim())?;
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                let mut v = T::zero();
                for t in self.entry(i, j) {
                    v += t.eval(x.as_slice())?;
                }
                row.push(v);
            }
            out.push(row);
        }
        SymMatrix::from_rows(&out)
    }

    /// Entrywise supremum over the box `[lower, upper]`, evaluated term by term.
    pub fn box_sup(&self, lower: &DenseVector<T>, upper: &DenseVector<T>) -> Result<SymMatrix<T>> {
        check_dims(self.n, lower.dim())?;
        check_dims(self.n, upper.dim())?;
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                let mut v = T::zero();
                for t in self.entry(i, j) {
                    v += t.box_sup(lower.as_slice(), upper.as_slice()).map_err(|_| {
                        Error::Unsupported(format!(
                            "entry ({}, {}) is unbounded on the box (negative exponent at a zero lower bound)",
                            i + 1,
                            j + 1
                        ))
                    })?;
                }
                row.push(v);
            }
            out.push(row);
        }
        SymMatrix::from_rows(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_eval_and_log() {
        let m: Monomial<f64> = Monomial::new(3.0, vec![2.0, -1.0]).unwrap();
        assert!((m.eval(&[2.0, 4.0]).unwrap() - 3.0).abs() < 1e-15);
        let y = [2f64.ln(), 4f64.ln()];
        assert!((m.log_affine(&y) - 3f64.ln()).abs() < 1e-15);
        assert!(m.eval(&[0.0, 1.0]).is_err());
        assert!(Monomial::new(0.0, vec![1.0]).is_err());
    }

    #[test]
    fn posynomial_lse_matches_log_of_eval() {
        let p = Posynomial::new(vec![
            Monomial::new(2.0, vec![1.0, 0.0]).unwrap(),
            Monomial::new(0.5, vec![-1.0, 2.0]).unwrap(),
        ])
        .unwrap();
        let x = [1.5, 0.7];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.ln()).collect();
        assert!((p.log_sum_exp(&y) - p.eval(&x).unwrap().ln()).abs() < 1e-14);
        assert!(Posynomial::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn box_sup_picks_corner_by_sign() {
        let m = Monomial::new(1.0, vec![1.0, -2.0]).unwrap();
        assert_eq!(m.box_sup(&[0.5, 0.5], &[2.0, 1.0]).unwrap(), 8.0);
        let mut pm = PosynomialMatrix::zeros(2);
        pm.push(0, 1, Monomial::new(1.0, vec![0.0, -1.0]).unwrap());
        let lower = DenseVector::zeros(2);
        let upper = DenseVector::ones(2);
        assert!(matches!(pm.box_sup(&lower, &upper), Err(Error::Unsupported(_))));
    }
}
