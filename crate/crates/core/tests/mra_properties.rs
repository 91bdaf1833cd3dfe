mod common;

use mrpoisson_core::mra::{
    adapt_uniform, decode, encode, norm_l2_uniform, project, sample_uniform, threshold,
};
use mrpoisson_core::{CellId, Geometry, PredictionScheme, ThresholdSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_is_exact(dims in 1usize..=2, level in 1u8..=6, roots in 1u32..=2, seed in any::<u64>()) {
        let r = [roots, 1];
        let hi = [roots as f64, 1.0];
        let g = Geometry::new(dims, &r[..dims], &[0.0, 0.0][..dims], &hi[..dims], level).unwrap();
        let f = random_field(g.cells_at(level), seed);
        let back = decode(&encode(&g, &f).unwrap());
        let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(common::max_abs_diff(&f, &back) <= 1e-14 * scale);
    }

    #[test]
    fn prediction_is_consistent_with_projection(
        vals in proptest::collection::vec(-10.0f64..10.0, 9),
        k in 0u32..8,
        j in 0u32..8,
    ) {
        // Children predicted from a 2D stencil average back to the parent.
        let g = Geometry::<f64>::unit(2, 4).unwrap();
        let scheme = PredictionScheme::<f64>::third_order();
        let parent = CellId::new(3, [k, j, 0]);
        let value = |c: &CellId| {
            let dx = c.index[0] as i64 - k as i64 + 1;
            let dy = c.index[1] as i64 - j as i64 + 1;
            vals[(dy.clamp(0, 2) * 3 + dx.clamp(0, 2)) as usize]
                + 0.1 * (c.index[0] as f64 + 3.0 * c.index[1] as f64)
        };
        let mut children = Vec::new();
        for c in 0..4 {
            let mut st = Vec::new();
            scheme.stencil_into(&g, &parent.child(c), &mut st);
            children.push(st.iter().map(|(s, w)| w * value(s)).sum::<f64>());
        }
        let avg = project(&children, &[0.25; 4]);
        prop_assert!((avg - value(&parent)).abs() < 1e-13);
    }

    #[test]
    fn detail_groups_sum_to_zero(seed in any::<u64>()) {
        let g = Geometry::<f64>::unit(2, 4).unwrap();
        let m = encode(&g, &random_field(g.cells_at(4), seed)).unwrap();
        for level in 1..=4u8 {
            for p in 0..g.cells_at(level - 1) {
                let s: f64 = (0..4).map(|c| m.detail(level, p, c)).sum();
                prop_assert!(s.abs() < 1e-14);
            }
        }
    }
}

#[test]
fn quadratic_fields_have_no_interior_details() {
    let g = Geometry::<f64>::unit(2, 5).unwrap();
    let f = sample_uniform(&g, 5, |x| 1.0 + x[0] - 2.0 * x[1] + 3.0 * x[0] * x[1] + x[0] * x[0]);
    // Cell average of x^2 over a cell of width h is the midpoint value plus h^2/12.
    let h = g.width(5, 0);
    let exact: Vec<f64> = f.iter().map(|v| v + h * h / 12.0).collect();
    let m = encode(&g, &exact).unwrap();
    for level in 3..=5u8 {
        for p in 0..g.cells_at(level - 1) {
            for c in 0..4 {
                assert!(m.detail(level, p, c).abs() < 1e-13);
            }
        }
    }
}

fn gaussian_plus_offset(x: &[f64; 3]) -> f64 {
    let r2 = (x[0] - 0.4).powi(2) + (x[1] - 0.55).powi(2);
    2.0 + (-r2 / 0.01).exp()
}

#[test]
fn threshold_error_tracks_eta() {
    let g = Geometry::<f64>::unit(2, 7).unwrap();
    let f = sample_uniform(&g, 7, gaussian_plus_offset);
    let m = encode(&g, &f).unwrap();
    let mut ratios = Vec::new();
    for k in 2..=8 {
        let eta = 10f64.powi(-k);
        let (t, _) = threshold(&m, &ThresholdSpec::new(eta, 2, 7));
        let err: Vec<f64> = decode(&t).iter().zip(&f).map(|(a, b)| a - b).collect();
        ratios.push(norm_l2_uniform(&g, 7, &err) / eta);
    }
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(hi / lo <= 10.0, "{ratios:?}");
}

#[test]
fn adapt_examples() {
    let g = Geometry::<f64>::unit(2, 6).unwrap();
    let constant = vec![3.0; g.cells_at(6)];
    let a = adapt_uniform(&g, &[constant], &ThresholdSpec::new(1e-3, 2, 6)).unwrap();
    assert_eq!(a.leaves.len(), 1);

    let rough = random_field(g.cells_at(6), 7);
    let a = adapt_uniform(&g, &[rough.clone()], &ThresholdSpec::new(1e-14, 2, 6)).unwrap();
    assert_eq!(a.leaves.len(), g.cells_at(6));
    // Nothing discarded: the transferred field is the original one.
    for (c, v) in a.leaves.cells().iter().zip(&a.fields[0]) {
        assert!((v - rough[g.linear_index(c)]).abs() < 1e-13);
    }

    let bump = sample_uniform(&g, 6, gaussian_plus_offset);
    let a = adapt_uniform(&g, &[bump], &ThresholdSpec::new(1e-3, 2, 6)).unwrap();
    assert!(a.compression_percent() < 100.0);
    assert!(a.forest.is_graded());
    assert_eq!(a.forest.finest_leaf_level(), 6);
}
