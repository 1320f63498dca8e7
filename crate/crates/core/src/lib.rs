//! Maximization of monotone, strongly DR-submodular functions over convex sets.
//!
//! The crate provides dense linear algebra primitives, objective families with
//! gradients and Hessians, feasible sets with projections and linear
//! maximization oracles, smoothness constants through Perron-Frobenius
//! eigenvalues and geometric programming, the optimization algorithms, and
//! brute-force oracles for checking all of the above.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.

pub mod algorithms;
pub mod error;
pub mod gp;
pub mod graph;
pub mod linalg;
pub mod numeric;
pub mod objectives;
pub mod oracles;
pub mod posynomial;
pub mod rng;
pub mod scalar;
pub mod sets;
pub mod smoothness;

pub use error::{Error, Result};
pub use graph::Graph;
pub use numeric::{DenseVector, SymMatrix};
pub use algorithms::{StepRule, Trace};
pub use objectives::{AnyObjective, Objective};
pub use rng::SplitRng;
pub use scalar::Scalar;
pub use sets::{AnySet, FeasibleSet};
pub use smoothness::SmoothnessMode;

pub type Vector = DenseVector<f64>;
pub type Matrix = SymMatrix<f64>;
pub type Vector32 = DenseVector<f32>;
pub type Matrix32 = SymMatrix<f32>;
