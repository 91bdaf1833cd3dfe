use crate::grid::{CellId, Geometry, MAX_DIMS};
use crate::Real;

/// Third-order average-interpolating prediction (one neighbor per direction,
/// diagonals included through the tensor product).
///
/// Near the domain boundary the three-cell window is shifted inward so the
/// stencil never leaves the domain. Levels with fewer than three cells along
/// an axis fall back to the linear (two cells) or constant (one cell) rule.
#[derive(Clone, Debug)]
pub struct PredictionScheme<T> {
    centered: [[T; 3]; 2],
    shifted_low: [[T; 3]; 2],
    shifted_high: [[T; 3]; 2],
    linear_low: [[T; 2]; 2],
    linear_high: [[T; 2]; 2],
}

/// One-dimensional factor of a prediction stencil: `len` parent-level cells
/// starting at `start`, with weights `w[..len]`.
#[derive(Clone, Copy, Debug)]
pub struct AxisStencil<T> {
    pub start: u32,
    pub len: usize,
    pub w: [T; 3],
}

impl<T: Real> Default for PredictionScheme<T> {
    fn default() -> Self {
        Self::third_order()
    }
}

impl<T: Real> PredictionScheme<T> {
    pub fn third_order() -> Self {
        let r = |n: f64, d: f64| T::lit(n / d);
        Self {
            centered: [
                [r(1., 8.), T::one(), r(-1., 8.)],
                [r(-1., 8.), T::one(), r(1., 8.)],
            ],
            shifted_low: [
                [r(11., 8.), r(-1., 2.), r(1., 8.)],
                [r(5., 8.), r(1., 2.), r(-1., 8.)],
            ],
            shifted_high: [
                [r(-1., 8.), r(1., 2.), r(5., 8.)],
                [r(1., 8.), r(-1., 2.), r(11., 8.)],
            ],
            linear_low: [[r(5., 4.), r(-1., 4.)], [r(3., 4.), r(1., 4.)]],
            linear_high: [[r(1., 4.), r(3., 4.)], [r(-1., 4.), r(5., 4.)]],
        }
    }

    /// Accuracy order of the prediction (polynomials of degree `order - 1`
    /// are reproduced exactly on interior stencils).
    pub fn order(&self) -> usize {
        3
    }

    /// Stencil along one axis for the child on side `upper` of parent `k`,
    /// where the parent level has `n` cells along that axis.
    pub fn axis_stencil(&self, k: u32, n: u32, upper: bool) -> AxisStencil<T> {
        let c = upper as usize;
        let z = T::zero();
        match n {
            0 | 1 => AxisStencil {
                start: 0,
                len: 1,
                w: [T::one(), z, z],
            },
            2 => {
                let w = if k == 0 {
                    self.linear_low[c]
                } else {
                    self.linear_high[c]
                };
                AxisStencil {
                    start: 0,
                    len: 2,
                    w: [w[0], w[1], z],
                }
            }
            _ => {
                if k == 0 {
                    AxisStencil {
                        start: 0,
                        len: 3,
                        w: self.shifted_low[c],
                    }
                } else if k == n - 1 {
                    AxisStencil {
                        start: n - 3,
                        len: 3,
                        w: self.shifted_high[c],
                    }
                } else {
                    AxisStencil {
                        start: k - 1,
                        len: 3,
                        w: self.centered[c],
                    }
                }
            }
        }
    }

    /// Appends the parent-level cells and weights predicting `child` to `out`.
    pub fn stencil_into(&self, geom: &Geometry<T>, child: &CellId, out: &mut Vec<(CellId, T)>) {
        let parent = child.parent().expect("root cells are never predicted");
        let pos = child.child_position();
        let mut axes = [AxisStencil {
            start: 0,
            len: 1,
            w: [T::one(), T::zero(), T::zero()],
        }; MAX_DIMS];
        for (a, ax) in axes.iter_mut().enumerate().take(geom.dims()) {
            *ax = self.axis_stencil(
                parent.index[a],
                geom.extent(parent.level, a),
                (pos >> a) & 1 == 1,
            );
        }
        for iz in 0..axes[2].len {
            for iy in 0..axes[1].len {
                for ix in 0..axes[0].len {
                    let w = axes[0].w[ix] * axes[1].w[iy] * axes[2].w[iz];
                    let cell = CellId::new(
                        parent.level,
                        [
                            axes[0].start + ix as u32,
                            axes[1].start + iy as u32,
                            axes[2].start + iz as u32,
                        ],
                    );
                    out.push((cell, w));
                }
            }
        }
    }

    /// Predicted child average from a full interior stencil.
    ///
    /// `stencil_values` holds the `3^d` parent-level averages in lexicographic
    /// order (axis 0 fastest); bit `a` of `child_position` selects the upper
    /// child along axis `a`.
    pub fn predict(&self, dims: usize, stencil_values: &[T], child_position: usize) -> T {
        assert_eq!(stencil_values.len(), 3usize.pow(dims as u32));
        let mut acc = T::zero();
        for (i, &v) in stencil_values.iter().enumerate() {
            let mut w = T::one();
            let mut rem = i;
            for a in 0..dims {
                w *= self.centered[(child_position >> a) & 1][rem % 3];
                rem /= 3;
            }
            acc += w * v;
        }
        acc
    }
}

/// Measure-weighted mean of child averages.
pub fn project<T: Real>(children_values: &[T], child_measures: &[T]) -> T {
    assert_eq!(children_values.len(), child_measures.len());
    let total: T = child_measures.iter().copied().sum();
    children_values
        .iter()
        .zip(child_measures)
        .map(|(&v, &m)| v * m)
        .sum::<T>()
        / total
}
