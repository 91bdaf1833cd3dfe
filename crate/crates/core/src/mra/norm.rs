use crate::error::{Error, Result};
use crate::grid::{Forest, Geometry, LeafMap};
use crate::Real;

/// Normalized L2 norm of a uniform-grid field: `sum(|cell| f^2) / |domain|`.
pub fn norm_l2_uniform<T: Real>(geom: &Geometry<T>, level: u8, f: &[T]) -> T {
    let w = geom.measure(level) / geom.domain_measure();
    (f.iter().map(|&v| v * v).sum::<T>() * w).sqrt()
}

/// Normalized L2 norm of a leaf field (leaf measures as weights).
pub fn norm_l2<T: Real>(forest: &Forest<T>, leaves: &LeafMap, f: &[T]) -> Result<T> {
    if f.len() != leaves.len() {
        return Err(Error::SizeMismatch {
            expected: leaves.len(),
            got: f.len(),
        });
    }
    let geom = forest.geometry();
    let total = geom.domain_measure();
    let s: T = leaves
        .cells()
        .iter()
        .zip(f)
        .map(|(c, &v)| geom.measure(c.level) * v * v)
        .sum();
    Ok((s / total).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::enumerate_leaves;

    #[test]
    fn unit_constant_has_unit_norm() {
        let g = Geometry::<f64>::unit(2, 3).unwrap();
        assert!((norm_l2_uniform(&g, 3, &vec![1.0; 64]) - 1.0).abs() < 1e-15);
        let f = Forest::uniform(g, 2).unwrap();
        let leaves = enumerate_leaves(&f);
        assert!((norm_l2(&f, &leaves, &vec![-2.0; 16]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn forest_and_uniform_formulas_agree() {
        let g = Geometry::<f64>::new(2, &[2, 1], &[0.0; 2], &[2.0, 1.0], 3).unwrap();
        let f = Forest::uniform(g.clone(), 3).unwrap();
        let leaves = enumerate_leaves(&f);
        let field: Vec<f64> = leaves.cells().iter().map(|c| g.center(c)[0].cos()).collect();
        let mut uniform = vec![0.0; g.cells_at(3)];
        for (c, v) in leaves.cells().iter().zip(&field) {
            uniform[g.linear_index(c)] = *v;
        }
        let a = norm_l2(&f, &leaves, &field).unwrap();
        let b = norm_l2_uniform(&g, 3, &uniform);
        assert!((a - b).abs() < 1e-14);
        let scaled: Vec<f64> = field.iter().map(|v| -3.0 * v).collect();
        assert!((norm_l2(&f, &leaves, &scaled).unwrap() - 3.0 * a).abs() < 1e-14);
    }
}
