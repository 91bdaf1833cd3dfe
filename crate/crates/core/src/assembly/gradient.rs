use crate::error::{Error, Result};
use crate::grid::{Forest, LeafMap, Side};
use crate::linalg::{CooBuilder, SparseMatrix};
use crate::Real;

use super::interface::interface;
use super::{BcSpec, BoundaryFace, FluxScheme};

/// Per axis, the affine map `E_a = G_a u + e_a` giving `E = -grad u` at leaf
/// centers as the mean of the two face derivatives along that axis.
pub fn gradient_operator<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    scheme: &FluxScheme<T>,
    bc: &BcSpec<T>,
) -> Result<Vec<(SparseMatrix<T>, Vec<T>)>> {
    let geom = forest.geometry();
    let n = leaves.len();
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(forest.dims());
    for axis in 0..forest.dims() {
        let mut coo = CooBuilder::with_capacity(n, n * 6);
        let mut constant = vec![T::zero(); n];
        for (row, cell) in leaves.cells().iter().enumerate() {
            let h = geom.width(cell.level, axis);
            for side in [Side::Minus, Side::Plus] {
                match interface(forest, leaves, scheme, cell, axis, side)? {
                    Some(pieces) => {
                        let total: T = pieces.iter().map(|p| p.area).sum();
                        for p in pieces {
                            let w = -half * p.area / total;
                            for (j, f) in p.flux {
                                coo.push(row, j, w * f);
                            }
                        }
                    }
                    None => {
                        let face = BoundaryFace {
                            cell: *cell,
                            axis,
                            side,
                        };
                        let center = geom.face_center(cell, axis, side);
                        let (diag, known) =
                            bc.get(axis, side).normal_derivative(&face, &center, h);
                        // Outward derivative to derivative along +axis.
                        let s = -half * T::lit(side.sign() as f64);
                        coo.push(row, row, s * diag);
                        constant[row] += s * known;
                    }
                }
            }
        }
        out.push((coo.finalize(), constant));
    }
    Ok(out)
}

/// `E = -grad u` at leaf centers, one vector per axis.
pub fn gradient<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    scheme: &FluxScheme<T>,
    bc: &BcSpec<T>,
    u: &[T],
) -> Result<Vec<Vec<T>>> {
    if u.len() != leaves.len() {
        return Err(Error::SizeMismatch {
            expected: leaves.len(),
            got: u.len(),
        });
    }
    gradient_operator(forest, leaves, scheme, bc)?
        .into_iter()
        .map(|(g, c)| {
            let mut e = g.spmv(u)?;
            for (ei, ci) in e.iter_mut().zip(c) {
                *ei += ci;
            }
            Ok(e)
        })
        .collect()
}
