//! Dense vectors and symmetric matrices.
//!
//! Lattice operations (`join`, `meet`, `dominates`) and inner products return
//! `Result` and reject mismatched dimensions. The arithmetic operators panic
//! on mismatch instead; they are used on internally consistent data only.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{check_dims, Error, Result};
use crate::scalar::Scalar;

/// A dense vector of finite scalars with at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector<T: Scalar> {
    data: Vec<T>,
}

impl<T: Scalar> DenseVector<T> {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(data: Vec<T>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidArgument("vector must have at least one entry".into()));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("entry {i} is not finite")));
        }
        Ok(Self { data })
    }

    pub fn from_f64_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| T::lit(v)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self::filled(n, T::zero())
    }

    pub fn ones(n: usize) -> Self {
        Self::filled(n, T::one())
    }

    pub fn filled(n: usize, value: T) -> Self {
        assert!(n > 0, "vector dimension must be positive");
        Self { data: vec![value; n] }
    }

    /// The i-th standard basis vector scaled by `scale`.
    pub fn basis(n: usize, i: usize, scale: T) -> Self {
        let mut v = Self::zeros(n);
        v.data[i] = scale;
        v
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> T) -> Self {
        assert!(n > 0, "vector dimension must be positive");
        Self { data: (0..n).map(f).collect() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.as_f64()).collect()
    }

    /// Componentwise maximum.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.max(b))
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.min(b))
    }

    /// `self ⪯ other`: every entry of `self` is at most the matching entry of `other`.
    pub fn dominates(&self, other: &Self) -> Result<bool> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.data.iter().zip(&other.data).all(|(a, b)| a <= b))
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum())
    }

    pub fn norm2(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> T {
        self.data.iter().map(|&a| a * a).sum()
    }

    pub fn sum(&self) -> T {
        self.data.iter().copied().sum()
    }

    pub fn max_entry(&self) -> T {
        self.data.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min_entry(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), T::min)
    }

    /// Euclidean distance.
    pub fn distance(&self, other: &Self) -> Result<T> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt())
    }

    pub fn scale(&self, factor: T) -> Self {
        self.map(|v| v * factor)
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: T, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "axpy dimension mismatch");
        Self {
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + factor * b).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Converts between scalar types (lossy for f64 -> f32).
    pub fn cast<U: Scalar>(&self) -> DenseVector<U> {
        DenseVector { data: self.data.iter().map(|v| U::lit(v.as_f64())).collect() }
    }
}

impl<T: Scalar> Index<usize> for DenseVector<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T: Scalar> IndexMut<usize> for DenseVector<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

impl<'a, T: Scalar> Add for &'a DenseVector<T> {
    type Output = DenseVector<T>;
    fn add(self, rhs: Self) -> DenseVector<T> {
        self.axpy(T::one(), rhs)
    }
}

impl<'a, T: Scalar> Sub for &'a DenseVector<T> {
    type Output = DenseVector<T>;
    fn sub(self, rhs: Self) -> DenseVector<T> {
        self.axpy(-T::one(), rhs)
    }
}

impl<'a, T: Scalar> Mul<T> for &'a DenseVector<T> {
    type Output = DenseVector<T>;
    fn mul(self, rhs: T) -> DenseVector<T> {
        self.scale(rhs)
    }
}

impl<'a, T: Scalar> Neg for &'a DenseVector<T> {
    type Output = DenseVector<T>;
    fn neg(self) -> DenseVector<T> {
        self.map(|v| -v)
    }
}

/// Dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T: Scalar> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    /// Builds from rows, replacing the input by `(A + Aᵀ) / 2`.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("matrix must have at least one row".into()));
        }
        for row in rows {
            check_dims(n, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("matrix entries must be finite".into()));
            }
        }
        let two = T::lit(2.0);
        Ok(Self::from_fn(n, |i, j| (rows[i][j] + rows[j][i]) / two))
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&v| T::lit(v)).collect()).collect();
        Self::from_rows(&rows)
    }

    /// Builds from an entry function evaluated on the upper triangle and mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &DenseVector<T>) -> Self {
        Self::from_fn(d.dim(), |i, j| if i == j { d[i] } else { T::zero() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diag(&self) -> DenseVector<T> {
        DenseVector::from_fn(self.n, |i| self.get(i, i))
    }

    pub fn mul_vec(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        check_dims(self.n, x.dim())?;
        Ok(DenseVector::from_fn(self.n, |i| {
            self.row(i).iter().zip(x.iter()).map(|(&a, &b)| a * b).sum()
        }))
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &DenseVector<T>) -> Result<T> {
        self.mul_vec(x)?.dot(x)
    }

    pub fn scale(&self, factor: T) -> Self {
        self.map(|v| v * factor)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn add_identity(&self, shift: T) -> Self {
        Self::from_fn(self.n, |i, j| if i == j { self.get(i, j) + shift } else { self.get(i, j) })
    }

    pub fn min_entry(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_entry(&self) -> T {
        self.data.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Largest off-diagonal entry; `-inf` for 1×1 matrices.
    pub fn max_offdiag(&self) -> T {
        let mut m = T::neg_infinity();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self.get(i, j));
                }
            }
        }
        m
    }

    /// Maximum absolute row sum (the induced ∞-norm).
    pub fn max_abs_row_sum(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DenseVector<f64> {
        DenseVector::from_f64_slice(xs).unwrap()
    }

    #[test]
    fn join_meet_examples() {
        assert_eq!(v(&[1.0, 0.0]).join(&v(&[0.0, 1.0])).unwrap(), v(&[1.0, 1.0]));
        assert_eq!(v(&[1.0, 0.0]).meet(&v(&[0.0, 1.0])).unwrap(), v(&[0.0, 0.0]));
        let x = v(&[0.3, -2.0, 7.5]);
        assert_eq!(x.join(&x).unwrap(), x);
        assert_eq!(x.meet(&x).unwrap(), x);
        assert_eq!(
            v(&[0.2, 0.7, 0.1]).join(&v(&[0.3, 0.1, 0.1])).unwrap(),
            v(&[0.3, 0.7, 0.1])
        );
        assert_eq!(v(&[0.2, 0.7]).meet(&v(&[0.3, 0.1])).unwrap(), v(&[0.2, 0.1]));
    }

    #[test]
    fn dominates_examples() {
        assert!(v(&[0.0, 0.0]).dominates(&v(&[1.0, 2.0])).unwrap());
        assert!(!v(&[1.0, 0.0]).dominates(&v(&[0.0, 1.0])).unwrap());
        let x = v(&[0.5, 0.25]);
        assert!(x.dominates(&x).unwrap());
    }

    #[test]
    fn dot_and_norm() {
        assert_eq!(v(&[1.0, 2.0]).dot(&v(&[3.0, 4.0])).unwrap(), 11.0);
        assert_eq!(v(&[3.0, 4.0]).norm2(), 5.0);
        assert_eq!(v(&[3.0, -1.0]).dot(&DenseVector::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = v(&[1.0, 2.0]);
        let b = v(&[1.0, 2.0, 3.0]);
        assert!(matches!(a.join(&b), Err(Error::DimensionMismatch { expected: 2, found: 3 })));
        assert!(a.meet(&b).is_err());
        assert!(a.dominates(&b).is_err());
        assert!(a.dot(&b).is_err());
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(DenseVector::<f64>::new(vec![]).is_err());
        assert!(DenseVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(DenseVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn symmetrizes_on_construction() {
        let m = SymMatrix::<f64>::from_f64_rows(&[vec![1.0, 2.0], vec![4.0, 3.0]]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
        let x = v(&[1.0, 1.0]);
        assert_eq!(m.mul_vec(&x).unwrap(), v(&[4.0, 6.0]));
        assert_eq!(m.quad_form(&x).unwrap(), 10.0);
        assert!(SymMatrix::<f64>::from_f64_rows(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let a = DenseVector::<f32>::from_f64_slice(&[0.5, 1.5]).unwrap();
        let b = DenseVector::<f32>::from_f64_slice(&[1.0, 1.0]).unwrap();
        assert_eq!(a.join(&b).unwrap().as_slice(), &[1.0f32, 1.5]);
        assert_eq!(a.dot(&b).unwrap(), 2.0f32);
    }
}
