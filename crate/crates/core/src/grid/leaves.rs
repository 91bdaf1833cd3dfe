use rustc_hash::FxHashMap;

use super::cell::CellId;
use super::forest::{CellKind, Forest};
use crate::Real;

/// Bijection between leaves and unknown numbers `0..N_L`.
///
/// Ordering is root-major (axis 0 fastest over the root grid), then Z-order
/// inside each tree. Indices are zero-based; file formats that number
/// unknowns from one add the offset on output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafMap {
    forward: FxHashMap<CellId, usize>,
    inverse: Vec<CellId>,
}

impl LeafMap {
    pub fn len(&self) -> usize {
        self.inverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inverse.is_empty()
    }

    pub fn index(&self, c: &CellId) -> Option<usize> {
        self.forward.get(c).copied()
    }

    pub fn cell(&self, i: usize) -> CellId {
        self.inverse[i]
    }

    /// Leaves in unknown order.
    pub fn cells(&self) -> &[CellId] {
        &self.inverse
    }
}

pub fn enumerate_leaves<T: Real>(forest: &Forest<T>) -> LeafMap {
    let geom = forest.geometry();
    let nchild = geom.children_count();
    let mut inverse = Vec::with_capacity(forest.leaf_count());
    let mut stack = Vec::new();
    for r in 0..geom.root_count() {
        stack.push(geom.root_cell(r));
        while let Some(c) = stack.pop() {
            match forest.kind(&c) {
                Some(CellKind::Leaf) => inverse.push(c),
                Some(CellKind::Inner) => {
                    for i in (0..nchild).rev() {
                        stack.push(c.child(i));
                    }
                }
                _ => {}
            }
        }
    }
    let forward = inverse.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    LeafMap { forward, inverse }
}
