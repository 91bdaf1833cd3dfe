//! Multiresolution finite-volume toolkit.
//!
//! Fields living on dyadic grids are compressed with an average-interpolating
//! multiresolution transform, the elliptic operator (Laplacian or screened
//! Laplacian) is assembled directly on the adapted leaves, and the resulting
//! sparse systems are solved with Krylov methods.
//!
//! The numerics are generic over [`Real`]; the `*F64` aliases at the crate
//! root are what most callers want.

pub mod assembly;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod mra;
pub mod scalar;
pub mod sp3;

pub use error::{Error, Result};
pub use scalar::Real;

pub use assembly::{
    assemble_adapted, assemble_rhs, assemble_uniform, gradient, BcSpec, BoundaryCondition,
    BoundaryValue, FluxScheme, OperatorSpec,
};
pub use grid::{CellId, CellKind, CellRecord, Forest, Geometry, LeafMap, Neighbor, Side};
pub use linalg::{
    dense_direct, matrix_stats, solve, MatrixStats, Method, Preconditioner, SolveReport,
    SolverConfig, SparseMatrix,
};
pub use mra::{MultiScale, PredictionScheme, ThresholdSpec};

pub type GeometryF64 = Geometry<f64>;
pub type ForestF64 = Forest<f64>;
pub type MultiScaleF64 = MultiScale<f64>;
pub type SparseMatrixF64 = SparseMatrix<f64>;
pub type BcSpecF64 = BcSpec<f64>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type SolveReportF64 = SolveReport<f64>;
