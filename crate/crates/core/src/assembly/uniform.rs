use crate::error::Result;
use crate::grid::{Geometry, Side};
use crate::linalg::CooBuilder;
use crate::Real;

use super::{Assembled, BcSpec, BoundaryCondition, BoundaryFace, OperatorSpec};

/// Classical `(2d+1)`-point stencil on the uniform grid
/// of `level`, unknowns in lexicographic order (axis 0 fastest).
pub fn assemble_uniform<T: Real>(
    geom: &Geometry<T>,
    level: u8,
    op: &OperatorSpec<T>,
    bc: &BcSpec<T>,
) -> Result<Assembled<T>> {
    let n = geom.cells_at(level);
    let shift = op.diagonal_shift()?;
    let dims = geom.dims();
    let mut coo = CooBuilder::with_capacity(n, n * (2 * dims + 1));
    let mut rhs_bc = vec![T::zero(); n];
    let mut bc_rows = vec![false; n];
    let two = T::lit(2.0);
    let extent: Vec<usize> = (0..dims).map(|a| geom.extent(level, a) as usize).collect();
    let mut stride = vec![1usize; dims];
    for a in 1..dims {
        stride[a] = stride[a - 1] * extent[a - 1];
    }
    for i in 0..n {
        let cell = geom.cell_at(level, i);
        if shift != T::zero() {
            coo.push(i, i, shift);
        }
        for a in 0..dims {
            let h = geom.width(level, a);
            let h2 = h * h;
            let k = (i / stride[a]) % extent[a];
            for side in [Side::Minus, Side::Plus] {
                let inside = match side {
                    Side::Minus => k > 0,
                    Side::Plus => k + 1 < extent[a],
                };
                if inside {
                    let j = match side {
                        Side::Minus => i - stride[a],
                        Side::Plus => i + stride[a],
                    };
                    coo.push(i, j, T::one() / h2);
                    coo.push(i, i, -T::one() / h2);
                    continue;
                }
                let face = BoundaryFace { cell, axis: a, side };
                let center = geom.face_center(&cell, a, side);
                match bc.get(a, side) {
                    BoundaryCondition::Dirichlet(g) => {
                        // Ghost value 2g - u.
                        coo.push(i, i, -two / h2);
                        rhs_bc[i] -= two * g.eval(&face, &center) / h2;
                        bc_rows[i] = true;
                    }
                    BoundaryCondition::Neumann | BoundaryCondition::Symmetry => {}
                    BoundaryCondition::Robin { a: r, b } => {
                        let den = two + *r * h;
                        let w = T::one() / h;
                        coo.push(i, i, w * (-two * *r / den));
                        rhs_bc[i] -= w * (-two * b.eval(&face, &center) / den);
                        bc_rows[i] = true;
                    }
                }
            }
        }
    }
    Ok(Assembled {
        matrix: coo.finalize(),
        rhs_bc,
        bc_rows,
        faces: Vec::new(),
    })
}
