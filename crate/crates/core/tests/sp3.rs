mod common;

use mrpoisson_core::sp3::{
    photo_source, photon_isotropic, sp3_solve, sp3_solve_group, three_group_air, PhysicalParams,
    Sp3Boundary, Sp3Constants, Sp3Options,
};
use mrpoisson_core::Geometry;

fn demo_grid() -> (mrpoisson_core::Forest<f64>, mrpoisson_core::LeafMap) {
    let g = Geometry::new(2, &[2, 2], &[-1.0, -1.0], &[1.0, 1.0], 6).unwrap();
    common::focused_forest(g, [0.0, 0.0, 0.0], 0.2)
}

fn gaussian_source(f: &mrpoisson_core::Forest<f64>, leaves: &mrpoisson_core::LeafMap) -> Vec<f64> {
    leaves
        .cells()
        .iter()
        .map(|c| {
            let x = f.geometry().center(c);
            (-(x[0] * x[0] + x[1] * x[1]) / 0.01).exp()
        })
        .collect()
}

#[test]
fn constants_against_closed_forms() {
    let k = Sp3Constants::<f64>::new();
    let s = 1.2f64.sqrt();
    let want = [
        ((3.0 + 2.0 * s) / 7.0, (3.0 - 2.0 * s) / 7.0),
        (5.0 / 96.0 * (34.0 + 11.0 * s), 5.0 / 96.0 * (34.0 - 11.0 * s)),
        (5.0 / 96.0 * (2.0 + s), 5.0 / 96.0 * (2.0 - s)),
    ];
    for (got, w) in [k.kappa, k.alpha, k.beta].iter().zip(want) {
        assert!((got[0] - w.0).abs() < 1e-14 && (got[1] - w.1).abs() < 1e-14);
    }
}

#[test]
fn constant_source_neumann_box() {
    let (f, leaves) = demo_grid();
    let params = PhysicalParams::default();
    let opts = Sp3Options {
        boundary: Sp3Boundary::Neumann,
        ..Sp3Options::default()
    };
    let q = 30.0 / 790.0 * 2.5;
    for g in three_group_air() {
        let sol = sp3_solve_group(&f, &leaves, &g, &params, &vec![2.5; leaves.len()], &opts).unwrap();
        let exact = q / (g.lambda * params.p_o2);
        for phi in &sol.phi {
            assert!(phi.iter().all(|v| (v - exact).abs() <= 1e-10 * exact.max(1.0)));
        }
    }
}

#[test]
fn zero_source_robin_is_zero() {
    let (f, leaves) = demo_grid();
    let g = three_group_air()[1];
    let sol = sp3_solve_group(&f, &leaves, &g, &PhysicalParams::default(), &vec![0.0; leaves.len()], &Sp3Options::default()).unwrap();
    assert!(sol.phi.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn gaussian_fixed_point_converges_and_groups_commute() {
    let (f, leaves) = demo_grid();
    let src = gaussian_source(&f, &leaves);
    let params = PhysicalParams::default();
    let opts = Sp3Options::default();
    let groups = three_group_air();
    let sol = sp3_solve(&f, &leaves, &groups, &params, &src, &opts).unwrap();
    for g in &sol.groups {
        assert!(g.iterations <= 3);
        assert!(*g.updates.last().unwrap() < 1e-6, "{:?}", g.updates);
        for w in g.updates.windows(2) {
            assert!(w[1] < w[0]);
        }
    }
    let reversed: Vec<_> = groups.iter().rev().copied().collect();
    let sol_r = sp3_solve(&f, &leaves, &reversed, &params, &src, &opts).unwrap();
    assert!(common::max_abs_diff(&sol.source, &sol_r.source) <= 1e-12 * sol.source.iter().cloned().fold(0.0, f64::max));

    let doubled: Vec<Vec<f64>> = sol.psi.iter().map(|p| p.iter().map(|v| 2.0 * v).collect()).collect();
    let s2 = photo_source(&doubled, &groups, &params).unwrap();
    for (a, b) in s2.iter().zip(&sol.source) {
        assert!((a - 2.0 * b).abs() <= 1e-12 * b.abs().max(1.0));
    }
    let psi = photon_isotropic(&sol.groups[0].phi[0], &sol.groups[0].phi[1]).unwrap();
    assert_eq!(psi, sol.psi[0]);
}
