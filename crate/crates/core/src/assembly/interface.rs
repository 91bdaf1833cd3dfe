//! Classification of a leaf face into same-level sub-faces.

use crate::error::{Error, Result};
use crate::grid::{CellId, CellKind, Forest, LeafMap, Neighbor, Side};
use crate::Real;

use super::FluxScheme;

/// A same-level piece of a leaf face.
pub(crate) struct SubFace<T> {
    /// Lower-side cell of the piece; the flux stencil is anchored here.
    pub left: CellId,
    /// Face area.
    pub area: T,
    /// Leaf across the face and its measure.
    pub other: usize,
    pub other_measure: T,
    /// `(leaf, weight)` terms of the normal derivative across the piece.
    pub flux: Vec<(usize, T)>,
}

/// The pieces making up face `side` of leaf `cell` along `axis`, or `None` on
/// the domain boundary.
pub(crate) fn interface<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    scheme: &FluxScheme<T>,
    cell: &CellId,
    axis: usize,
    side: Side,
) -> Result<Option<Vec<SubFace<T>>>> {
    let geom = forest.geometry();
    let Neighbor::Cell(n) = geom.neighbor(cell, axis, side) else {
        return Ok(None);
    };
    let bit = 1usize << axis;
    let mut pieces = Vec::new();
    match forest.kind(&n) {
        Some(CellKind::Leaf) => {
            let left = if side == Side::Plus { *cell } else { n };
            let other = leaf_index(leaves, &n)?;
            pieces.push(piece(forest, leaves, scheme, left, axis, other, geom.measure(n.level))?);
        }
        Some(CellKind::Inner) => {
            // Finer leaves across: one piece per child pair touching the face.
            let nc = geom.children_count();
            for c in 0..nc {
                let upper_child = c & bit != 0;
                // Children of `cell` on the face side.
                if upper_child != (side == Side::Plus) {
                    continue;
                }
                let mine = cell.child(c);
                let theirs = n.child(c ^ bit);
                if forest.kind(&theirs) != Some(CellKind::Leaf) {
                    return Err(Error::Unresolved(theirs));
                }
                let left = if side == Side::Plus { mine } else { theirs };
                let other = leaf_index(leaves, &theirs)?;
                pieces.push(piece(
                    forest,
                    leaves,
                    scheme,
                    left,
                    axis,
                    other,
                    geom.measure(theirs.level),
                )?);
            }
        }
        Some(CellKind::Phantom) | None => {
            // Coarser leaf across: `n` is a phantom child of it.
            let coarse = n.parent().ok_or(Error::Unresolved(n))?;
            if forest.kind(&coarse) != Some(CellKind::Leaf) {
                return Err(Error::Unresolved(n));
            }
            let left = if side == Side::Plus { *cell } else { n };
            let other = leaf_index(leaves, &coarse)?;
            pieces.push(piece(
                forest,
                leaves,
                scheme,
                left,
                axis,
                other,
                geom.measure(coarse.level),
            )?);
        }
    }
    Ok(Some(pieces))
}

fn leaf_index(leaves: &LeafMap, c: &CellId) -> Result<usize> {
    leaves.index(c).ok_or(Error::Unresolved(*c))
}

fn piece<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    scheme: &FluxScheme<T>,
    left: CellId,
    axis: usize,
    other: usize,
    other_measure: T,
) -> Result<SubFace<T>> {
    let geom = forest.geometry();
    let h = geom.width(left.level, axis);
    let inv_h = T::one() / h;
    let mut flux = Vec::with_capacity(8);
    for &(o, c) in scheme.taps() {
        let Neighbor::Cell(s) = geom.offset(&left, axis, o) else {
            let mut out = left;
            out.index[axis] = out.index[axis].wrapping_add(o as u32);
            return Err(Error::OutOfDomain(out));
        };
        forest.resolve_into(leaves, &s, c * inv_h, &mut flux)?;
    }
    Ok(SubFace {
        left,
        area: geom.measure(left.level) * inv_h,
        other,
        other_measure,
        flux,
    })
}
