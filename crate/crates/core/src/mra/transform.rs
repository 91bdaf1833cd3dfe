use crate::error::{Error, Result};
use crate::grid::{CellId, Geometry, MAX_DIMS};
use crate::Real;

use super::prediction::PredictionScheme;

/// Coarse averages plus details for every level of a uniform field.
///
/// `details[j - 1]` holds level `j`: for each parent at level `j - 1`
/// (lexicographic order) the details of its first `2^d - 1` children. The
/// detail of the last child is implied by the zero-sum property.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiScale<T> {
    pub geom: Geometry<T>,
    pub coarse: Vec<T>,
    pub details: Vec<Vec<T>>,
}

impl<T: Real> MultiScale<T> {
    pub fn max_level(&self) -> u8 {
        self.details.len() as u8
    }

    pub fn stored_per_parent(&self) -> usize {
        self.geom.children_count() - 1
    }

    /// Detail of child `c` of parent `p` (lexicographic) at `level`,
    /// including the implied last child.
    pub fn detail(&self, level: u8, p: usize, c: usize) -> T {
        let s = self.stored_per_parent();
        let d = &self.details[level as usize - 1][p * s..(p + 1) * s];
        if c < s {
            d[c]
        } else {
            -d.iter().copied().sum::<T>()
        }
    }
}

/// Cell-average samples by midpoint rule on the uniform grid at `level`.
pub fn sample_uniform<T: Real>(
    geom: &Geometry<T>,
    level: u8,
    f: impl Fn(&[T; MAX_DIMS]) -> T,
) -> Vec<T> {
    (0..geom.cells_at(level))
        .map(|i| f(&geom.center(&geom.cell_at(level, i))))
        .collect()
}

fn predict_child<T: Real>(
    scheme: &PredictionScheme<T>,
    geom: &Geometry<T>,
    coarse: &[T],
    child: &CellId,
    buf: &mut Vec<(CellId, T)>,
) -> T {
    buf.clear();
    scheme.stencil_into(geom, child, buf);
    buf.iter()
        .map(|(s, w)| *w * coarse[geom.linear_index(s)])
        .sum()
}

/// Multi-scale transform of a field given on the uniform grid at
/// `geom.max_level()` (lexicographic order).
pub fn encode<T: Real>(geom: &Geometry<T>, fine: &[T]) -> Result<MultiScale<T>> {
    let top = geom.max_level();
    if fine.len() != geom.cells_at(top) {
        return Err(Error::SizeMismatch {
            expected: geom.cells_at(top),
            got: fine.len(),
        });
    }
    let scheme = PredictionScheme::third_order();
    let nc = geom.children_count();
    let inv = T::one() / T::lit(nc as f64);
    let mut details = vec![Vec::new(); top as usize];
    let mut current = fine.to_vec();
    let mut buf = Vec::with_capacity(27);
    for level in (1..=top).rev() {
        let parents = geom.cells_at(level - 1);
        let mut coarse = vec![T::zero(); parents];
        for (p, cp) in coarse.iter_mut().enumerate() {
            let parent = geom.cell_at(level - 1, p);
            *cp = (0..nc)
                .map(|c| current[geom.linear_index(&parent.child(c))])
                .sum::<T>()
                * inv;
        }
        let mut d = Vec::with_capacity(parents * (nc - 1));
        for p in 0..parents {
            let parent = geom.cell_at(level - 1, p);
            for c in 0..nc - 1 {
                let child = parent.child(c);
                let pred = predict_child(&scheme, geom, &coarse, &child, &mut buf);
                d.push(current[geom.linear_index(&child)] - pred);
            }
        }
        details[level as usize - 1] = d;
        current = coarse;
    }
    Ok(MultiScale {
        geom: geom.clone(),
        coarse: current,
        details,
    })
}

/// Inverse of [`encode`].
pub fn decode<T: Real>(m: &MultiScale<T>) -> Vec<T> {
    let geom = &m.geom;
    let scheme = PredictionScheme::third_order();
    let nc = geom.children_count();
    let mut current = m.coarse.clone();
    let mut buf = Vec::with_capacity(27);
    for level in 1..=m.max_level() {
        let mut fine = vec![T::zero(); geom.cells_at(level)];
        let d = &m.details[level as usize - 1];
        for p in 0..geom.cells_at(level - 1) {
            let parent = geom.cell_at(level - 1, p);
            let mut sum = T::zero();
            for c in 0..nc {
                let child = parent.child(c);
                let pred = predict_child(&scheme, geom, &current, &child, &mut buf);
                let dc = if c < nc - 1 {
                    let v = d[p * (nc - 1) + c];
                    sum += v;
                    v
                } else {
                    -sum
                };
                fine[geom.linear_index(&child)] = pred + dc;
            }
        }
        current = fine;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_has_zero_details() {
        let g = Geometry::<f64>::new(2, &[2, 1], &[0.0, 0.0], &[2.0, 1.0], 4).unwrap();
        let m = encode(&g, &vec![3.5; g.cells_at(4)]).unwrap();
        assert!(m.details.iter().flatten().all(|&d| d == 0.0));
        assert!(m.coarse.iter().all(|&c| c == 3.5));
    }

    #[test]
    fn quadratic_field_has_zero_details_everywhere() {
        // one-sided boundary windows are also exact for quadratics
        let g = Geometry::<f64>::unit(1, 6).unwrap();
        let h = g.width(6, 0);
        let fine: Vec<f64> = (0..64)
            .map(|i| {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                // average of 2 - x + 4x^2
                2.0 - 0.5 * (a + b) + 4.0 * (b.powi(3) - a.powi(3)) / (3.0 * h)
            })
            .collect();
        let m = encode(&g, &fine).unwrap();
        for (j, d) in m.details.iter().enumerate() {
            if j + 1 >= 3 {
                assert!(d.iter().all(|v| v.abs() < 1e-13), "level {}", j + 1);
            }
        }
    }

    #[test]
    fn detail_zero_sum() {
        let g = Geometry::<f64>::unit(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fine: Vec<f64> = (0..g.cells_at(4)).map(|_| rng.gen()).collect();
        let m = encode(&g, &fine).unwrap();
        for level in 1..=4u8 {
            for p in 0..g.cells_at(level - 1) {
                let parent = g.cell_at(level - 1, p);
                let sum: f64 = (0..4).map(|c| m.detail(level, p, c)).sum();
                assert!(sum.abs() < 1e-14);
                // implied detail matches the direct definition
                let exact = fine_at(&g, &fine, level, &parent.child(3));
                let coarse = level_values(&g, &fine, level - 1);
                let mut buf = Vec::new();
                let pred = predict_child(
                    &PredictionScheme::third_order(),
                    &g,
                    &coarse,
                    &parent.child(3),
                    &mut buf,
                );
                assert!((m.detail(level, p, 3) - (exact - pred)).abs() < 1e-13);
            }
        }
    }

    fn level_values(g: &Geometry<f64>, fine: &[f64], level: u8) -> Vec<f64> {
        (0..g.cells_at(level))
            .map(|i| fine_at(g, fine, level, &g.cell_at(level, i)))
            .collect()
    }

    fn fine_at(g: &Geometry<f64>, fine: &[f64], level: u8, c: &CellId) -> f64 {
        let top = g.max_level();
        let shift = top - level;
        let n = 1usize << (shift as usize * g.dims());
        let mut acc = 0.0;
        for i in 0..g.cells_at(top) {
            let f = g.cell_at(top, i);
            if f.ancestor_at(level) == *c {
                acc += fine[i];
            }
        }
        acc / n as f64
    }

    #[test]
    fn zeroing_all_details_gives_prediction_cascade() {
        let g = Geometry::<f64>::unit(1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fine: Vec<f64> = (0..8).map(|_| rng.gen()).collect();
        let mut m = encode(&g, &fine).unwrap();
        for d in &mut m.details {
            d.iter_mut().for_each(|v| *v = 0.0);
        }
        let out = decode(&m);
        // level 0 has one cell: every prediction is constant
        assert!(out.iter().all(|v| (v - m.coarse[0]).abs() < 1e-15));
    }
}
