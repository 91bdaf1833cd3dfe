//! Sparse storage, Krylov solvers and a dense direct oracle.

mod direct;
mod solvers;
mod sparse;

pub use direct::{dense_direct, dense_direct_capped, DEFAULT_DENSE_CAP};
pub use solvers::{solve, Method, Preconditioner, SolveReport, SolverConfig};
pub use sparse::{matrix_stats, CooBuilder, MatrixStats, SparseMatrix};

use crate::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
