mod common;

use mrpoisson_core::assembly::assemble_adapted;
use mrpoisson_core::linalg::{norm2, CooBuilder};
use mrpoisson_core::{
    assemble_rhs, dense_direct, solve, BcSpec, BoundaryCondition, FluxScheme, Geometry, Method,
    OperatorSpec, SolverConfig, SparseMatrix,
};
use proptest::prelude::*;

#[test]
fn two_by_two_solution() {
    let a = SparseMatrix::<f64>::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
    for m in [Method::Cg, Method::BiCgStab, Method::Direct] {
        let cfg = SolverConfig::default().with_method(m).with_tolerance(1e-14, 1e-300);
        let (x, rep) = solve(&a, &[1.0, 2.0], &cfg).unwrap();
        assert!(rep.converged);
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-14 && (x[1] - 7.0 / 11.0).abs() < 1e-14);
    }
}

#[test]
fn dense_identity_and_quadratic() {
    let id = SparseMatrix::<f64>::identity(5);
    assert_eq!(dense_direct(&id, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);

    // u = x(1-x) has u'' = -2 and zero boundary values; the linear ghost plus
    // centered stencil reproduce the exact cell averages in the interior.
    let n = 64;
    let h = 1.0 / n as f64;
    let mut b = CooBuilder::new(n);
    for i in 0..n {
        b.push(i, i, -2.0 / (h * h));
        if i > 0 {
            b.push(i, i - 1, 1.0 / (h * h));
        }
        if i + 1 < n {
            b.push(i, i + 1, 1.0 / (h * h));
        }
    }
    let a = b.finalize();
    let avg = |i: usize| {
        let (l, r) = (i as f64 * h, (i + 1) as f64 * h);
        ((r * r / 2.0 - r * r * r / 3.0) - (l * l / 2.0 - l * l * l / 3.0)) / h
    };
    let exact: Vec<f64> = (0..n).map(avg).collect();
    let rhs = a.spmv(&exact).unwrap();
    let x = dense_direct(&a, &rhs).unwrap();
    assert!(common::max_abs_diff(&x, &exact) < 1e-10);
}

#[test]
fn permuted_system_gives_permuted_solution() {
    let rows = vec![vec![3.0, 1.0, 0.5], vec![0.0, 2.0, 1.0], vec![1.0, 0.0, 4.0]];
    let b = [1.0, 2.0, 3.0];
    let x = dense_direct(&SparseMatrix::from_dense(&rows), &b).unwrap();
    let perm = [2, 0, 1];
    let prow: Vec<Vec<f64>> = perm.iter().map(|&i| perm.iter().map(|&j| rows[i][j]).collect()).collect();
    let pb: Vec<f64> = perm.iter().map(|&i| b[i]).collect();
    let px = dense_direct(&SparseMatrix::from_dense(&prow), &pb).unwrap();
    for (k, &i) in perm.iter().enumerate() {
        assert!((px[k] - x[i]).abs() < 1e-14);
    }
}

fn adapted_system(seed: u64) -> (SparseMatrix<f64>, Vec<f64>) {
    let g = Geometry::new(2, &[2, 1], &[0.0, 0.0], &[2.0, 1.0], 5).unwrap();
    let (f, leaves) = common::random_forest(g, seed, 0.35);
    let bc = BcSpec::uniform(BoundaryCondition::dirichlet(1.0));
    let sys = assemble_adapted(&f, &leaves, &FluxScheme::centered(), &OperatorSpec::Laplace, &bc).unwrap();
    let src: Vec<f64> = (0..leaves.len()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
    let rhs = assemble_rhs(&src, &OperatorSpec::Laplace, &sys.rhs_bc).unwrap();
    (sys.matrix, rhs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bicgstab_agrees_with_direct(seed in any::<u64>()) {
        let (a, rhs) = adapted_system(seed);
        let exact = dense_direct(&a, &rhs).unwrap();
        let cfg = SolverConfig::default().with_tolerance(1e-12, 1e-300);
        let (x, rep) = solve(&a, &rhs, &cfg).unwrap();
        prop_assert!(rep.converged);
        let r: Vec<f64> = rhs.iter().zip(a.spmv(&x).unwrap()).map(|(b, y)| b - y).collect();
        prop_assert!(norm2(&r) <= 1e-12 * norm2(&rhs));
        let d: Vec<f64> = x.iter().zip(&exact).map(|(p, q)| p - q).collect();
        prop_assert!(norm2(&d) <= 1e-8);
    }
}

#[test]
fn error_follows_tolerance() {
    let (a, rhs) = adapted_system(11);
    let exact = dense_direct(&a, &rhs).unwrap();
    let mut errors = Vec::new();
    for k in [6, 8, 10, 12] {
        let tol = 10f64.powi(-k);
        let cfg = SolverConfig::default().with_tolerance(tol, 1e-300);
        let (x, rep) = solve(&a, &rhs, &cfg).unwrap();
        assert!(rep.converged && rep.residual_norm <= tol * rep.rhs_norm);
        let d: Vec<f64> = x.iter().zip(&exact).map(|(p, q)| p - q).collect();
        errors.push(norm2(&d) / norm2(&exact));
    }
    for w in errors.windows(2) {
        assert!(w[1] < w[0], "{errors:?}");
    }
}
