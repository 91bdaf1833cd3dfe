#![allow(dead_code)]

use mrpoisson_core::grid::enumerate_leaves;
use mrpoisson_core::{CellKind, Forest, Geometry, LeafMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Randomly refined, graded forest with phantoms.
pub fn random_forest(geom: Geometry<f64>, seed: u64, prob: f64) -> (Forest<f64>, LeafMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Forest::new(geom);
    for _ in 0..f.max_level() {
        let leaves: Vec<_> = f
            .cells_sorted()
            .into_iter()
            .filter(|(c, r)| r.kind == CellKind::Leaf && c.level < f.max_level())
            .map(|(c, _)| c)
            .collect();
        for c in leaves {
            if rng.gen::<f64>() < prob && f.is_leaf(&c) {
                f.refine(&c).unwrap();
            }
        }
    }
    f.ensure_graded().unwrap();
    f.insert_phantoms(1);
    let leaves = enumerate_leaves(&f);
    (f, leaves)
}

/// Forest refined towards `point` down to the maximum level.
pub fn focused_forest(geom: Geometry<f64>, point: [f64; 3], radius: f64) -> (Forest<f64>, LeafMap) {
    let mut f = Forest::new(geom);
    for _ in 0..f.max_level() {
        let leaves: Vec<_> = f
            .cells_sorted()
            .into_iter()
            .filter(|(c, r)| r.kind == CellKind::Leaf && c.level < f.max_level())
            .map(|(c, _)| c)
            .collect();
        for c in leaves {
            let x = f.geometry().center(&c);
            let d2: f64 = (0..f.dims()).map(|a| (x[a] - point[a]).powi(2)).sum();
            let reach = radius + f.geometry().width(c.level, 0);
            if d2 <= reach * reach {
                f.refine(&c).unwrap();
            }
        }
    }
    f.ensure_graded().unwrap();
    f.insert_phantoms(1);
    let leaves = enumerate_leaves(&f);
    (f, leaves)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
