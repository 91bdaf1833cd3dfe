use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{CellId, Forest, LeafMap, Neighbor, Side};
use crate::linalg::CooBuilder;
use crate::Real;

use super::interface::interface;
use super::{Assembled, BcSpec, BoundaryFace, FluxScheme, OperatorSpec};

/// One interior face piece, recorded when its flux is assembled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceVisit<T> {
    pub axis: usize,
    /// Lower-side cell at the level the flux was evaluated on.
    pub left: CellId,
    pub lower_leaf: usize,
    pub upper_leaf: usize,
    pub area: T,
}

const CHUNK: usize = 512;

struct Partial<T> {
    coo: CooBuilder<T>,
    rhs: Vec<(usize, T)>,
    bc_rows: Vec<usize>,
    faces: Vec<FaceVisit<T>>,
}

/// Assembles the operator over the leaves of a graded forest.
///
/// Every interior face is visited once, from its lower side; boundary faces
/// from the leaf that owns them. Fails with `Unresolved` when a flux stencil
/// member cannot be reduced to leaves.
pub fn assemble_adapted<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    scheme: &FluxScheme<T>,
    op: &OperatorSpec<T>,
    bc: &BcSpec<T>,
) -> Result<Assembled<T>> {
    let n = leaves.len();
    let shift = op.diagonal_shift()?;
    let parts: Vec<Result<Partial<T>>> = leaves
        .cells()
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| {
            let mut part = Partial {
                coo: CooBuilder::with_capacity(n, chunk.len() * 12),
                rhs: Vec::new(),
                bc_rows: Vec::new(),
                faces: Vec::with_capacity(chunk.len() * forest.dims()),
            };
            for (k, cell) in chunk.iter().enumerate() {
                assemble_leaf(forest, leaves, scheme, bc, shift, ci * CHUNK + k, cell, &mut part)?;
            }
            Ok(part)
        })
        .collect();
    let mut coo = CooBuilder::with_capacity(n, n * 12);
    let mut rhs_bc = vec![T::zero(); n];
    let mut bc_rows = vec![false; n];
    let mut faces = Vec::with_capacity(n * forest.dims());
    for part in parts {
        let part = part?;
        coo.extend_from(part.coo);
        for (i, v) in part.rhs {
            rhs_bc[i] += v;
        }
        for i in part.bc_rows {
            bc_rows[i] = true;
        }
        faces.extend(part.faces);
    }
    Ok(Assembled {
        matrix: coo.finalize(),
        rhs_bc,
        bc_rows,
        faces,
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble_leaf<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    scheme: &FluxScheme<T>,
    bc: &BcSpec<T>,
    shift: T,
    row: usize,
    cell: &CellId,
    part: &mut Partial<T>,
) -> Result<()> {
    let geom = forest.geometry();
    let measure = geom.measure(cell.level);
    if shift != T::zero() {
        part.coo.push(row, row, shift);
    }
    for axis in 0..forest.dims() {
        let h = geom.width(cell.level, axis);
        for side in [Side::Minus, Side::Plus] {
            if side == Side::Minus && geom.neighbor(cell, axis, side) != Neighbor::Boundary {
                continue;
            }
            match interface(forest, leaves, scheme, cell, axis, side)? {
                None => {
                    let face = BoundaryFace {
                        cell: *cell,
                        axis,
                        side,
                    };
                    let cond = bc.get(axis, side);
                    let center = geom.face_center(cell, axis, side);
                    let (diag, known) = cond.normal_derivative(&face, &center, h);
                    let w = T::one() / h;
                    if diag != T::zero() {
                        part.coo.push(row, row, w * diag);
                    }
                    if known != T::zero() {
                        part.rhs.push((row, -w * known));
                    }
                    if diag != T::zero() || known != T::zero() || cond.is_dirichlet() {
                        part.bc_rows.push(row);
                    }
                }
                Some(pieces) if side == Side::Plus => {
                    for p in pieces {
                        let mine = p.area / measure;
                        let theirs = p.area / p.other_measure;
                        for &(j, f) in &p.flux {
                            part.coo.push(row, j, mine * f);
                            part.coo.push(p.other, j, -theirs * f);
                        }
                        part.faces.push(FaceVisit {
                            axis,
                            left: p.left,
                            lower_leaf: row,
                            upper_leaf: p.other,
                            area: p.area,
                        });
                    }
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

/// Every boundary face of every leaf, with the leaf number.
pub fn boundary_faces<T: Real>(forest: &Forest<T>, leaves: &LeafMap) -> Vec<(usize, BoundaryFace)> {
    let geom = forest.geometry();
    let mut out = Vec::new();
    for (i, cell) in leaves.cells().iter().enumerate() {
        for axis in 0..forest.dims() {
            for side in [Side::Minus, Side::Plus] {
                if geom.neighbor(cell, axis, side) == Neighbor::Boundary {
                    out.push((
                        i,
                        BoundaryFace {
                            cell: *cell,
                            axis,
                            side,
                        },
                    ));
                }
            }
        }
    }
    out
}
