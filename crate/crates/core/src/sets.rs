//! Convex feasible sets with exact Euclidean projection and linear
//! maximization oracles.

use crate::error::{check_dims, Error, Result};
use crate::numeric::DenseVector;
use crate::scalar::Scalar;


/// A closed convex subset of the nonnegative orthant.
pub trait FeasibleSet<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    /// Feasibility test with absolute tolerance `tol` on each constraint.
    fn contains(&self, x: &DenseVector<T>, tol: T) -> bool;

    /// Euclidean projection `argmin_{z in set} ‖z − y‖`.
    fn project(&self, y: &DenseVector<T>) -> Result<DenseVector<T>>;

    /// Feasible maximizer of `⟨w, x⟩`; ties go to the lowest index.
    fn linear_max(&self, w: &DenseVector<T>) -> Result<DenseVector<T>>;

    /// Coordinatewise upper corner `ūᵢ = max_{x in set} xᵢ`.
    fn upper_corner(&self) -> DenseVector<T>;

    /// Coordinatewise lower corner `l̄ᵢ = min_{x in set} xᵢ`.
    fn lower_corner(&self) -> DenseVector<T>;

    /// Diameter, exact or an upper bound as documented per set.
    fn diameter(&self) -> T;

    fn contains_origin(&self) -> bool;

    /// `argmax_{x in set} ⟨w, x⟩ − (α/2)‖x‖²`, which equals `project(w / α)`.
    fn reg_linear_max(&self, w: &DenseVector<T>, alpha: T) -> Result<DenseVector<T>> {
        if !(alpha > T::zero()) {
            return Err(Error::InvalidArgument(
                "regularization weight must be positive; use linear_max for a plain LMO".into(),
            ));
        }
        self.project(&w.scale(T::one() / alpha))
    }

    fn name(&self) -> &'static str;
}

fn check_finite<T: Scalar>(y: &DenseVector<T>) -> Result<()> {
    if y.all_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("input vector has non-finite entries".into()))
    }
}

/// `{x : lower ⪯ x ⪯ upper}` with `0 ⪯ lower`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet<T: Scalar> {
    lower: DenseVector<T>,
    upper: DenseVector<T>,
}

impl<T: Scalar> BoxSet<T> {
    pub fn new(lower: DenseVector<T>, upper: DenseVector<T>) -> Result<Self> {
        check_dims(lower.dim(), upper.dim())?;
        if lower.min_entry() < T::zero() {
            return Err(Error::InvalidArgument("box lower corner must be nonnegative".into()));
        }
        if !lower.dominates(&upper)? {
            return Err(Error::InvalidArgument("box lower corner must be ⪯ upper corner".into()));
        }
        Ok(Self { lower, upper })
    }

    /// `[0, 1]ⁿ`.
    pub fn unit(n: usize) -> Self {
        Self { lower: DenseVector::zeros(n), upper: DenseVector::ones(n) }
    }

    pub fn uniform(n: usize, lower: T, upper: T) -> Result<Self> {
        Self::new(DenseVector::filled(n, lower), DenseVector::filled(n, upper))
    }

    pub fn lower(&self) -> &DenseVector<T> {
        &self.lower
    }

    pub fn upper(&self) -> &DenseVector<T> {
        &self.upper
    }
}

impl<T: Scalar> FeasibleSet<T> for BoxSet<T> {
    fn dim(&self) -> usize {
        self.lower.dim()
    }

    fn contains(&self, x: &DenseVector<T>, tol: T) -> bool {
        x.dim() == self.dim()
            && (0..self.dim()).all(|i| x[i] >= self.lower[i] - tol && x[i] <= self.upper[i] + tol)
    }

    fn project(&self, y: &DenseVector<T>) -> Result<DenseVector<T>> {
        check_dims(self.dim(), y.dim())?;
        check_finite(y)?;
        Ok(DenseVector::from_fn(self.dim(), |i| y[i].max(self.lower[i]).min(self.upper[i])))
    }

    fn linear_max(&self, w: &DenseVector<T>) -> Result<DenseVector<T>> {
        check_dims(self.dim(), w.dim())?;
        Ok(DenseVector::from_fn(self.dim(), |i| {
            if w[i] > T::zero() {
                self.upper[i]
            } else {
                self.lower[i]
            }
        }))
    }

    fn upper_corner(&self) -> DenseVector<T> {
        self.upper.clone()
    }

    fn lower_corner(&self) -> DenseVector<T> {
        self.lower.clone()
    }

    /// Exact: `‖upper − lower‖`.
    fn diameter(&self) -> T {
        (&self.upper - &self.lower).norm2()
    }

    fn contains_origin(&self) -> bool {
        self.lower.iter().all(|&l| l == T::zero())
    }

    fn name(&self) -> &'static str {
        "box"
    }
}

/// `{x ⪰ 0 : 1ᵀx = s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSet<T: Scalar> {
    n: usize,
    radius: T,
}

impl<T: Scalar> SimplexSet<T> {
    pub fn new(n: usize, radius: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("simplex dimension must be positive".into()));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument("simplex radius must be positive and finite".into()));
        }
        Ok(Self { n, radius })
    }

    /// The standard simplex (`s = 1`).
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, T::one())
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Barycenter `(s/n)·1`.
    pub fn barycenter(&self) -> DenseVector<T> {
        DenseVector::filled(self.n, self.radius / T::from_usize_lossy(self.n))
    }
}

/// Sort-and-threshold projection onto `{x ⪰ 0 : 1ᵀx = s}`.
fn project_simplex<T: Scalar>(y: &DenseVector<T>, s: T) -> DenseVector<T> {
    let mut sorted = y.as_slice().to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    let mut cumulative = T::zero();
    let mut tau = T::zero();
    for (k, &value) in sorted.iter().enumerate() {
        cumulative += value;
        let candidate = (cumulative - s) / T::from_usize_lossy(k + 1);
        if value - candidate > T::zero() {
            tau = candidate;
        } else {
            break;
        }
    }
    y.map(|v| (v - tau).max(T::zero()))
}

impl<T: Scalar> FeasibleSet<T> for SimplexSet<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, x: &DenseVector<T>, tol: T) -> bool {
        x.dim() == self.n && x.min_entry() >= -tol && (x.sum() - self.radius).abs() <= tol
    }

    fn project(&self, y: &DenseVector<T>) -> Result<DenseVector<T>> {
        check_dims(self.n, y.dim())?;
        check_finite(y)?;
        Ok(project_simplex(y, self.radius))
    }

    fn linear_max(&self, w: &DenseVector<T>) -> Result<DenseVector<T>> {
        check_dims(self.n, w.dim())?;
        let mut best = 0;
        for i in 1..self.n {
            if w[i] > w[best] {
                best = i;
            }
        }
        Ok(DenseVector::basis(self.n, best, self.radius))
    }

    fn upper_corner(&self) -> DenseVector<T> {
        DenseVector::filled(self.n, self.radius)
    }

    fn lower_corner(&self) -> DenseVector<T> {
        if self.n == 1 {
            DenseVector::filled(1, self.radius)
        } else {
            DenseVector::zeros(self.n)
        }
    }

    /// Exact: `s·√2`, attained between two vertices (0 when n = 1).
    fn diameter(&self) -> T {
        if self.n == 1 {
            T::zero()
        } else {
            self.radius * T::lit(2.0).sqrt()
        }
    }

    fn contains_origin(&self) -> bool {
        false
    }

    fn name(&self) -> &'static str {
        "simplex"
    }
}

/// `{x : 1ᵀx ≤ s, 0 ⪯ x ⪯ upper}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetBoxSet<T: Scalar> {
    budget: T,
    upper: DenseVector<T>,
}

impl<T: Scalar> BudgetBoxSet<T> {
    pub fn new(budget: T, upper: DenseVector<T>) -> Result<Self> {
        if !(budget > T::zero()) || !budget.is_finite() {
            return Err(Error::InvalidArgument("budget must be positive and finite".into()));
        }
        if !(upper.min_entry() > T::zero()) {
            return Err(Error::InvalidArgument("budget-box upper bounds must be positive".into()));
        }
        Ok(Self { budget, upper })
    }

    /// `{1ᵀx ≤ s, 0 ⪯ x ⪯ 1}`.
    pub fn unit_capped(n: usize, budget: T) -> Result<Self> {
        Self::new(budget, DenseVector::ones(n))
    }

    pub fn budget(&self) -> T {
        self.budget
    }

    pub fn upper(&self) -> &DenseVector<T> {
        &self.upper
    }

    fn clamp_shift(&self, y: &DenseVector<T>, tau: T) -> DenseVector<T> {
        DenseVector::from_fn(y.dim(), |i| (y[i] - tau).max(T::zero()).min(self.upper[i]))
    }

    /// Threshold `τ ≥ 0` with `Σ clamp(yᵢ − τ, 0, uᵢ) = s`, given that the
    /// sum exceeds `s` at `τ = 0`. The sum is piecewise linear in `τ` with
    /// breakpoints `yᵢ` and `yᵢ − uᵢ`; binary search finds the segment and the
    /// crossing is solved in closed form on it.
    fn threshold(&self, y: &DenseVector<T>) -> T {
        let mut points: Vec<T> = Vec::with_capacity(2 * y.dim() + 1);
        points.push(T::zero());
        for i in 0..y.dim() {
            for t in [y[i], y[i] - self.upper[i]] {
                if t > T::zero() {
                    points.push(t);
                }
            }
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        points.dedup();
        let excess = |t: T| self.clamp_shift(y, t).sum() > self.budget;
        // invariant: excess(points[lo]) and !excess(points[hi])
        let (mut lo, mut hi) = (0, points.len() - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if excess(points[mid]) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (a, b) = (points[lo], points[hi]);
        let mut free_sum = T::zero();
        let mut free = 0usize;
        let mut capped = T::zero();
        for i in 0..y.dim() {
            if y[i] - self.upper[i] >= b {
                capped += self.upper[i];
            } else if y[i] - self.upper[i] <= a && y[i] >= b {
                free_sum += y[i];
                free += 1;
            }
        }
        if free == 0 {
            return b;
        }
        let tau = (free_sum + capped - self.budget) / T::from_usize_lossy(free);
        tau.max(a).min(b)
    }
}

impl<T: Scalar> FeasibleSet<T> for BudgetBoxSet<T> {
    fn dim(&self) -> usize {
        self.upper.dim()
    }

    fn contains(&self, x: &DenseVector<T>, tol: T) -> bool {
        x.dim() == self.dim()
            && (0..self.dim()).all(|i| x[i] >= -tol && x[i] <= self.upper[i] + tol)
            && x.sum() <= self.budget + tol
    }

    fn project(&self, y: &DenseVector<T>) -> Result<DenseVector<T>> {
        check_dims(self.dim(), y.dim())?;
        check_finite(y)?;
        let clamped = self.clamp_shift(y, T::zero());
        if clamped.sum() <= self.budget {
            return Ok(clamped);
        }
        Ok(self.clamp_shift(y, self.threshold(y)))
    }

    /// Greedy fill in order of decreasing positive weight.
    fn linear_max(&self, w: &DenseVector<T>) -> Result<DenseVector<T>> {
        check_dims(self.dim(), w.dim())?;
        let mut order: Vec<usize> = (0..self.dim()).filter(|&i| w[i] > T::zero()).collect();
        // stable sort keeps lower indices first among equal weights
        order.sort_by(|&a, &b| w[b].partial_cmp(&w[a]).expect("finite weights"));
        let mut x = DenseVector::zeros(self.dim());
        let mut remaining = self.budget;
        for i in order {
            if remaining <= T::zero() {
                break;
            }
            let take = self.upper[i].min(remaining);
            x[i] = take;
            remaining -= take;
        }
        Ok(x)
    }

    fn upper_corner(&self) -> DenseVector<T> {
        self.upper.map(|u| u.min(self.budget))
    }

    fn lower_corner(&self) -> DenseVector<T> {
        DenseVector::zeros(self.dim())
    }

    /// Upper bound `min(‖ū‖, √2 · max_{x in set} ‖x‖)`.
    ///
    /// Any two feasible points are nonnegative, so `‖x − y‖² ≤ ‖x‖² + ‖y‖²`.
    /// The largest-norm point fills the largest caps first. Exact for the unit
    /// budget box with `s = 1` and for `s ≥ Σ uᵢ`.
    fn diameter(&self) -> T {
        let mut caps: Vec<T> = self.upper.as_slice().to_vec();
        caps.sort_by(|a, b| b.partial_cmp(a).expect("finite caps"));
        let mut remaining = self.budget;
        let mut norm_sq = T::zero();
        for u in caps {
            if remaining <= T::zero() {
                break;
            }
            let take = u.min(remaining);
            norm_sq += take * take;
            remaining -= take;
        }
        let corner = self.upper_corner().norm2();
        corner.min((T::lit(2.0) * norm_sq).sqrt())
    }

    fn contains_origin(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str {
        "budget_box"
    }
}

/// Closed enumeration of the shipped set types, convenient for configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySet<T: Scalar> {
    Box(BoxSet<T>),
    Simplex(SimplexSet<T>),
    BudgetBox(BudgetBoxSet<T>),
}

impl<T: Scalar> AnySet<T> {
    pub fn as_dyn(&self) -> &dyn FeasibleSet<T> {
        match self {
            AnySet::Box(s) => s,
            AnySet::Simplex(s) => s,
            AnySet::BudgetBox(s) => s,
        }
    }
}

impl<T: Scalar> From<BoxSet<T>> for AnySet<T> {
    fn from(s: BoxSet<T>) -> Self {
        AnySet::Box(s)
    }
}

impl<T: Scalar> From<SimplexSet<T>> for AnySet<T> {
    fn from(s: SimplexSet<T>) -> Self {
        AnySet::Simplex(s)
    }
}

impl<T: Scalar> From<BudgetBoxSet<T>> for AnySet<T> {
    fn from(s: BudgetBoxSet<T>) -> Self {
        AnySet::BudgetBox(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DenseVector<f64> {
        DenseVector::from_f64_slice(xs).unwrap()
    }

    fn assert_close(a: &DenseVector<f64>, b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn projection_examples() {
        let simplex = SimplexSet::standard(3).unwrap();
        assert_close(&simplex.project(&v(&[0.5, 0.5, 0.5])).unwrap(), &[1.0 / 3.0; 3], 1e-15);

        let unit = BoxSet::unit(2);
        assert_eq!(unit.project(&v(&[2.0, -1.0])).unwrap(), v(&[1.0, 0.0]));

        let budget = BudgetBoxSet::unit_capped(3, 2.0).unwrap();
        assert_close(&budget.project(&v(&[1.0, 1.0, 1.0])).unwrap(), &[2.0 / 3.0; 3], 1e-12);
    }

    #[test]
    fn linear_max_examples() {
        let simplex = SimplexSet::standard(3).unwrap();
        assert_eq!(simplex.linear_max(&v(&[3.0, 1.0, 2.0])).unwrap(), v(&[1.0, 0.0, 0.0]));
        assert_eq!(simplex.linear_max(&v(&[2.0, 2.0, 1.0])).unwrap(), v(&[1.0, 0.0, 0.0]));

        let unit = BoxSet::unit(2);
        assert_eq!(unit.linear_max(&v(&[1.0, -1.0])).unwrap(), v(&[1.0, 0.0]));

        let budget = BudgetBoxSet::unit_capped(3, 2.0).unwrap();
        assert_eq!(budget.linear_max(&v(&[3.0, 2.0, 1.0])).unwrap(), v(&[1.0, 1.0, 0.0]));
        assert_eq!(budget.linear_max(&v(&[1.0, 2.0, 2.0])).unwrap(), v(&[0.0, 1.0, 1.0]));
        let partial = BudgetBoxSet::unit_capped(3, 1.5).unwrap();
        assert_eq!(partial.linear_max(&v(&[1.0, 1.0, 1.0])).unwrap(), v(&[1.0, 0.5, 0.0]));
    }

    #[test]
    fn reg_linear_max_examples() {
        let unit1 = BoxSet::unit(1);
        assert_eq!(unit1.reg_linear_max(&v(&[2.0]), 2.0).unwrap(), v(&[1.0]));
        let unit2 = BoxSet::unit(2);
        assert_eq!(unit2.reg_linear_max(&v(&[1.0, 4.0]), 2.0).unwrap(), v(&[0.5, 1.0]));
        let simplex = SimplexSet::standard(2).unwrap();
        let zero = DenseVector::zeros(2);
        assert_eq!(
            simplex.reg_linear_max(&zero, 3.0).unwrap(),
            simplex.project(&zero).unwrap()
        );
        assert!(unit2.reg_linear_max(&zero, 0.0).is_err());
        assert!(unit2.reg_linear_max(&zero, -1.0).is_err());
    }

    #[test]
    fn corners_and_diameters() {
        let simplex = SimplexSet::<f64>::standard(3).unwrap();
        assert_eq!(simplex.upper_corner(), v(&[1.0, 1.0, 1.0]));
        assert!((simplex.diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert!(!simplex.contains_origin());

        let unit = BoxSet::<f64>::unit(3);
        assert!((unit.diameter() - 3f64.sqrt()).abs() < 1e-15);
        assert!(unit.contains_origin());

        let budget = BudgetBoxSet::<f64>::unit_capped(4, 1.0).unwrap();
        assert!((budget.diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(budget.upper_corner(), v(&[1.0; 4]));
        let wide = BudgetBoxSet::<f64>::unit_capped(3, 5.0).unwrap();
        assert!((wide.diameter() - 3f64.sqrt()).abs() < 1e-15);
        let narrow = BudgetBoxSet::<f64>::unit_capped(3, 0.5).unwrap();
        assert_eq!(narrow.upper_corner(), v(&[0.5; 3]));
    }

    #[test]
    fn construction_errors() {
        assert!(BoxSet::new(v(&[1.0]), v(&[0.0])).is_err());
        assert!(BoxSet::new(v(&[-1.0]), v(&[0.0])).is_err());
        assert!(SimplexSet::<f64>::new(2, 0.0).is_err());
        assert!(SimplexSet::<f64>::new(0, 1.0).is_err());
        assert!(BudgetBoxSet::new(0.0, v(&[1.0])).is_err());
        assert!(BudgetBoxSet::new(1.0, v(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn membership() {
        let budget = BudgetBoxSet::unit_capped(2, 1.0).unwrap();
        assert!(budget.contains(&v(&[0.5, 0.5]), 1e-9));
        assert!(!budget.contains(&v(&[0.6, 0.5]), 1e-9));
        let simplex = SimplexSet::standard(2).unwrap();
        assert!(simplex.contains(&v(&[0.25, 0.75]), 1e-12));
        assert!(!simplex.contains(&v(&[0.25, 0.25]), 1e-12));
    }
}
