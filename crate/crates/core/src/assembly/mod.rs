//! Discrete elliptic operators on adapted leaves.
//!
//! Unknowns are leaf averages in [`LeafMap`](crate::grid::LeafMap) order. The
//! operator is the divergence of face fluxes divided by cell measure; a face
//! shared by cells of different levels is evaluated on the finer level, with
//! missing same-level values reconstructed by prediction (phantoms) or
//! projection (inner cells).

mod adapted;
mod gradient;
mod interface;
mod uniform;

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::grid::{CellId, Side, MAX_DIMS};
use crate::linalg::SparseMatrix;
use crate::Real;

pub use adapted::{assemble_adapted, boundary_faces, FaceVisit};
pub use gradient::{gradient, gradient_operator};
pub use uniform::assemble_uniform;

/// Same-level flux across the face between `left` and its upper neighbor:
/// `F = (1/h) * sum(c_o * u(left + o))` along the face normal.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxScheme<T> {
    taps: Vec<(i64, T)>,
    order: usize,
}

impl<T: Real> FluxScheme<T> {
    /// Second-order centered difference.
    pub fn centered() -> Self {
        Self {
            taps: vec![(0, -T::one()), (1, T::one())],
            order: 2,
        }
    }

    pub fn taps(&self) -> &[(i64, T)] {
        &self.taps
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Farthest same-level cell the stencil reaches from the face.
    pub fn radius(&self) -> u32 {
        self.taps
            .iter()
            .map(|&(o, _)| if o > 0 { o as u32 } else { (1 - o) as u32 })
            .max()
            .unwrap_or(1)
    }
}

impl<T: Real> Default for FluxScheme<T> {
    fn default() -> Self {
        Self::centered()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorSpec<T> {
    /// `div grad u`.
    Laplace,
    /// `div grad u - mu2 u`.
    Screened { mu2: T },
}

impl<T: Real> OperatorSpec<T> {
    fn diagonal_shift(&self) -> Result<T> {
        match *self {
            OperatorSpec::Laplace => Ok(T::zero()),
            OperatorSpec::Screened { mu2 } if mu2 >= T::zero() => Ok(-mu2),
            OperatorSpec::Screened { mu2 } => Err(Error::Invalid(format!(
                "screening coefficient must be nonnegative, got {mu2}"
            ))),
        }
    }
}

/// One face of a boundary leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryFace {
    pub cell: CellId,
    pub axis: usize,
    pub side: Side,
}

pub type PointFn<T> = Arc<dyn Fn(&[T; MAX_DIMS]) -> T + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryValue<T> {
    Constant(T),
    /// Evaluated at the face center.
    Function(PointFn<T>),
    /// Explicit per-face data; faces not listed read zero.
    PerFace(Arc<FxHashMap<BoundaryFace, T>>),
}

impl<T: Real> BoundaryValue<T> {
    pub fn function(f: impl Fn(&[T; MAX_DIMS]) -> T + Send + Sync + 'static) -> Self {
        BoundaryValue::Function(Arc::new(f))
    }

    pub fn eval(&self, face: &BoundaryFace, center: &[T; MAX_DIMS]) -> T {
        match self {
            BoundaryValue::Constant(v) => *v,
            BoundaryValue::Function(f) => f(center),
            BoundaryValue::PerFace(m) => m.get(face).copied().unwrap_or(T::zero()),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for BoundaryValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryValue::Constant(v) => write!(f, "Constant({v:?})"),
            BoundaryValue::Function(_) => f.write_str("Function(..)"),
            BoundaryValue::PerFace(m) => write!(f, "PerFace({} faces)", m.len()),
        }
    }
}

#[derive(Clone, Debug)]
pub enum BoundaryCondition<T> {
    Dirichlet(BoundaryValue<T>),
    /// Zero normal flux.
    Neumann,
    /// Mirror plane; zero normal flux for this operator.
    Symmetry,
    /// `du/dn = -a u - b` with `n` the outward normal.
    Robin { a: T, b: BoundaryValue<T> },
}

impl<T: Real> BoundaryCondition<T> {
    pub fn dirichlet(v: T) -> Self {
        BoundaryCondition::Dirichlet(BoundaryValue::Constant(v))
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, BoundaryCondition::Dirichlet(_))
    }

    /// Outward normal derivative as `diag * u + constant` for the cell of
    /// width `h` (normal direction) adjacent to the face.
    pub(crate) fn normal_derivative(
        &self,
        face: &BoundaryFace,
        center: &[T; MAX_DIMS],
        h: T,
    ) -> (T, T) {
        let two = T::lit(2.0);
        match self {
            BoundaryCondition::Dirichlet(g) => {
                let g = g.eval(face, center);
                (-two / h, two * g / h)
            }
            BoundaryCondition::Neumann | BoundaryCondition::Symmetry => (T::zero(), T::zero()),
            BoundaryCondition::Robin { a, b } => {
                let b = b.eval(face, center);
                let den = two + *a * h;
                (-two * *a / den, -two * b / den)
            }
        }
    }
}

/// One condition per face of the box domain.
#[derive(Clone, Debug)]
pub struct BcSpec<T> {
    faces: [[BoundaryCondition<T>; 2]; MAX_DIMS],
}

impl<T: Real> BcSpec<T> {
    pub fn uniform(bc: BoundaryCondition<T>) -> Self {
        Self {
            faces: std::array::from_fn(|_| [bc.clone(), bc.clone()]),
        }
    }

    pub fn with(mut self, axis: usize, side: Side, bc: BoundaryCondition<T>) -> Self {
        self.faces[axis][side.slot()] = bc;
        self
    }

    pub fn set(&mut self, axis: usize, side: Side, bc: BoundaryCondition<T>) {
        self.faces[axis][side.slot()] = bc;
    }

    pub fn get(&self, axis: usize, side: Side) -> &BoundaryCondition<T> {
        &self.faces[axis][side.slot()]
    }
}

/// Operator, boundary right-hand side and the interior faces that produced it.
#[derive(Clone, Debug)]
pub struct Assembled<T> {
    pub matrix: SparseMatrix<T>,
    /// Known terms moved to the right-hand side by boundary conditions.
    pub rhs_bc: Vec<T>,
    /// Rows whose boundary condition contributed a known term or altered the
    /// diagonal (Dirichlet or Robin).
    pub bc_rows: Vec<bool>,
    pub faces: Vec<FaceVisit<T>>,
}

/// Right-hand side for `A u = rhs` given a source on leaves.
///
/// Laplace solves `div grad u = source`; Screened solves
/// `div grad u - mu2 u = -source`.
pub fn assemble_rhs<T: Real>(source: &[T], op: &OperatorSpec<T>, rhs_bc: &[T]) -> Result<Vec<T>> {
    if source.len() != rhs_bc.len() {
        return Err(Error::SizeMismatch {
            expected: rhs_bc.len(),
            got: source.len(),
        });
    }
    let sign = match op {
        OperatorSpec::Laplace => T::one(),
        OperatorSpec::Screened { .. } => -T::one(),
    };
    Ok(source
        .iter()
        .zip(rhs_bc)
        .map(|(&s, &b)| sign * s + b)
        .collect())
}
