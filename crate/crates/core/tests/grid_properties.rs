mod common;

use mrpoisson_core::grid::enumerate_leaves;
use mrpoisson_core::{CellId, CellKind, Forest, Geometry};
use proptest::prelude::*;

fn geometry(dims: usize, roots: u32, max_level: u8) -> Geometry<f64> {
    let r = [roots, 1, 1];
    let hi = [roots as f64, 1.0, 1.0];
    Geometry::new(dims, &r[..dims], &[0.0; 3][..dims], &hi[..dims], max_level).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parent_inverts_child(level in 0u8..10, i in 0u32..1024, j in 0u32..1024, c in 0usize..8) {
        let cell = CellId::new(level, [i % (1 << level), j % (1 << level), 0]);
        prop_assert_eq!(cell.child(c).parent(), Some(cell));
        prop_assert_eq!(cell.child(c).child_position(), c);
    }

    #[test]
    fn random_forests_are_graded_partitions(
        dims in 1usize..=2,
        roots in 1u32..=3,
        seed in any::<u64>(),
        prob in 0.1f64..0.6,
    ) {
        let (f, leaves) = common::random_forest(geometry(dims, roots, 5), seed, prob);
        prop_assert!(f.is_graded(), "violation at {:?}", f.grading_violation());
        let g = f.geometry();
        let total: f64 = leaves.cells().iter().map(|c| g.measure(c.level)).sum();
        prop_assert!((total - g.domain_measure()).abs() < 1e-12);
        // No leaf contains another and every phantom hangs off a leaf.
        for c in leaves.cells() {
            let mut p = c.parent();
            while let Some(q) = p {
                prop_assert_eq!(f.kind(&q), Some(CellKind::Inner));
                p = q.parent();
            }
        }
        for (c, r) in f.cells_sorted() {
            if r.kind == CellKind::Phantom {
                prop_assert!(f.is_leaf(&c.parent().unwrap()));
            }
        }
    }

    #[test]
    fn grading_is_idempotent(seed in any::<u64>()) {
        let (mut f, _) = common::random_forest(geometry(2, 2, 5), seed, 0.3);
        prop_assert_eq!(f.ensure_graded().unwrap(), 0);
    }
}

#[test]
fn leaf_enumeration_is_depth_first_per_root() {
    let g = geometry(1, 2, 2);
    let mut f = Forest::new(g);
    f.refine(&CellId::new(0, [0, 0, 0])).unwrap();
    let leaves = enumerate_leaves(&f);
    let cells: Vec<_> = leaves.cells().iter().map(|c| (c.level, c.index[0])).collect();
    assert_eq!(cells, vec![(1, 0), (1, 1), (0, 1)]);
    assert_eq!(leaves.index(&CellId::new(0, [1, 0, 0])), Some(2));
}

#[test]
fn one_dimensional_phantom_is_single() {
    // A level-1 leaf beside level-2 leaves needs only its near child.
    let g = geometry(1, 1, 2);
    let mut f = Forest::new(g);
    f.refine(&CellId::new(0, [0, 0, 0])).unwrap();
    f.refine(&CellId::new(1, [1, 0, 0])).unwrap();
    f.ensure_graded().unwrap();
    assert_eq!(f.insert_phantoms(1), 1);
    assert_eq!(f.kind(&CellId::new(2, [1, 0, 0])), Some(CellKind::Phantom));
}

#[test]
fn uniform_forest_counts() {
    let f = Forest::uniform(geometry(2, 2, 4), 3).unwrap();
    assert_eq!(f.leaf_count(), 2 * 64);
    assert!(f.is_graded());
}
