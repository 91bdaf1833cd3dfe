//! Expressing arbitrary same-level cells as linear combinations of leaves.

use super::cell::CellId;
use super::forest::{CellKind, Forest};
use super::leaves::LeafMap;
use crate::error::{Error, Result};
use crate::Real;

/// Longest chain of predicted cells allowed when a prediction stencil itself
/// reaches outside the tree.
pub const MAX_PHANTOM_DEPTH: usize = 2;

impl<T: Real> Forest<T> {
    /// Appends `(leaf number, weight)` pairs such that the value of `cell`
    /// equals `sum(weight * leaf value)`, scaled by `weight`.
    ///
    /// Leaves map to themselves, inner cells go through projection onto their
    /// children and phantoms (or cells absent from the tree) through the
    /// prediction from their parent's level.
    pub fn resolve_into(
        &self,
        leaves: &LeafMap,
        cell: &CellId,
        weight: T,
        out: &mut Vec<(usize, T)>,
    ) -> Result<()> {
        self.resolve_at_depth(leaves, cell, weight, 0, out)
    }

    fn resolve_at_depth(
        &self,
        leaves: &LeafMap,
        cell: &CellId,
        weight: T,
        depth: usize,
        out: &mut Vec<(usize, T)>,
    ) -> Result<()> {
        match self.kind(cell) {
            Some(CellKind::Leaf) => {
                let i = leaves.index(cell).ok_or(Error::Unresolved(*cell))?;
                out.push((i, weight));
                Ok(())
            }
            Some(CellKind::Inner) => {
                let nchild = self.geometry().children_count();
                let w = weight / T::lit(nchild as f64);
                for i in 0..nchild {
                    self.resolve_at_depth(leaves, &cell.child(i), w, depth, out)?;
                }
                Ok(())
            }
            Some(CellKind::Phantom) | None => {
                if depth >= MAX_PHANTOM_DEPTH || cell.level == 0 {
                    return Err(Error::Unresolved(*cell));
                }
                if !self.geometry().contains(cell) {
                    return Err(Error::OutOfDomain(*cell));
                }
                let mut stencil = Vec::with_capacity(27);
                self.prediction()
                    .stencil_into(self.geometry(), cell, &mut stencil);
                for (s, b) in stencil {
                    self.resolve_at_depth(leaves, &s, weight * b, depth + 1, out)?;
                }
                Ok(())
            }
        }
    }
}
