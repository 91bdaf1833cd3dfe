use std::time::{Duration, Instant};

use super::{dense_direct, dot, matrix_stats, norm2, SparseMatrix};
use crate::error::{Error, Result};
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Cg,
    BiCgStab,
    Direct,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cg" => Ok(Method::Cg),
            "bicgstab" => Ok(Method::BiCgStab),
            "direct" => Ok(Method::Direct),
            other => Err(Error::Invalid(format!("unknown solver `{other}`"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Cg => "cg",
            Method::BiCgStab => "bicgstab",
            Method::Direct => "direct",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    Jacobi,
}

#[derive(Clone, Debug)]
pub struct SolverConfig<T> {
    pub method: Method,
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_iters: usize,
    pub preconditioner: Preconditioner,
    /// Starting vector; zero when absent.
    pub initial_guess: Option<Vec<T>>,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            method: Method::BiCgStab,
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-14),
            max_iters: 10_000,
            preconditioner: Preconditioner::Jacobi,
            initial_guess: None,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tolerance(mut self, rel: T, abs: T) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        if let Some(x0) = &self.initial_guess {
            if x0.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: x0.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub method: Method,
    pub iterations: usize,
    /// Final true residual `||b - A x||`.
    pub residual_norm: T,
    pub rhs_norm: T,
    pub converged: bool,
    /// Number of BiCGSTAB restarts triggered by breakdown.
    pub restarts: usize,
    pub elapsed: Duration,
}

impl<T: Real> SolveReport<T> {
    pub fn relative_residual(&self) -> T {
        if self.rhs_norm > T::zero() {
            self.residual_norm / self.rhs_norm
        } else {
            self.residual_norm
        }
    }
}

/// Solves `A x = b`. Running out of iterations is reported through
/// `SolveReport::converged`, not as an error.
pub fn solve<T: Real>(
    a: &SparseMatrix<T>,
    b: &[T],
    cfg: &SolverConfig<T>,
) -> Result<(Vec<T>, SolveReport<T>)> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: b.len(),
        });
    }
    cfg.validate(n)?;
    let start = Instant::now();
    let bnorm = norm2(b);
    let target = (cfg.rel_tol * bnorm).max(cfg.abs_tol);
    let (x, iterations, restarts) = match cfg.method {
        Method::Direct => (dense_direct(a, b)?, 1, 0),
        Method::Cg => {
            let sym = matrix_stats(a).symmetry_fraction;
            if sym < 1.0 {
                return Err(Error::NotSymmetric(sym));
            }
            let (x, it) = cg(a, b, cfg, target);
            (x, it, 0)
        }
        Method::BiCgStab => bicgstab(a, b, cfg, target),
    };
    let residual_norm = norm2(&residual(a, b, &x));
    let converged = match cfg.method {
        Method::Direct => residual_norm.is_finite(),
        _ => residual_norm <= target,
    };
    Ok((
        x,
        SolveReport {
            method: cfg.method,
            iterations,
            residual_norm,
            rhs_norm: bnorm,
            converged,
            restarts,
            elapsed: start.elapsed(),
        },
    ))
}

fn residual<T: Real>(a: &SparseMatrix<T>, b: &[T], x: &[T]) -> Vec<T> {
    let mut ax = vec![T::zero(); b.len()];
    a.spmv_into(x, &mut ax);
    b.iter().zip(&ax).map(|(&bi, &yi)| bi - yi).collect()
}

fn inverse_diagonal<T: Real>(a: &SparseMatrix<T>, pc: Preconditioner) -> Option<Vec<T>> {
    match pc {
        Preconditioner::None => None,
        Preconditioner::Jacobi => Some(
            a.diagonal()
                .into_iter()
                .map(|d| if d != T::zero() { T::one() / d } else { T::one() })
                .collect(),
        ),
    }
}

fn apply<T: Real>(m: &Option<Vec<T>>, r: &[T], out: &mut [T]) {
    match m {
        Some(d) => {
            for ((o, &ri), &di) in out.iter_mut().zip(r).zip(d) {
                *o = ri * di;
            }
        }
        None => out.copy_from_slice(r),
    }
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn cg<T: Real>(
    a: &SparseMatrix<T>,
    b: &[T],
    cfg: &SolverConfig<T>,
    target: T,
) -> (Vec<T>, usize) {
    let n = b.len();
    let minv = inverse_diagonal(a, cfg.preconditioner);
    let mut x = cfg.initial_guess.clone().unwrap_or_else(|| vec![T::zero(); n]);
    let mut r = residual(a, b, &x);
    if norm2(&r) <= target {
        return (x, 0);
    }
    let mut z = vec![T::zero(); n];
    apply(&minv, &r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    for it in 1..=cfg.max_iters {
        a.spmv_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap == T::zero() || !pap.is_finite() {
            return (x, it);
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        if norm2(&r) <= target {
            r = residual(a, b, &x);
            if norm2(&r) <= target {
                return (x, it);
            }
            apply(&minv, &r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        apply(&minv, &r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    (x, cfg.max_iters)
}

fn bicgstab<T: Real>(
    a: &SparseMatrix<T>,
    b: &[T],
    cfg: &SolverConfig<T>,
    target: T,
) -> (Vec<T>, usize, usize) {
    let n = b.len();
    let minv = inverse_diagonal(a, cfg.preconditioner);
    let mut x = cfg.initial_guess.clone().unwrap_or_else(|| vec![T::zero(); n]);
    let mut r = residual(a, b, &x);
    if norm2(&r) <= target {
        return (x, 0, 0);
    }
    let tiny = T::min_positive_value().sqrt();
    let mut r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (T::one(), T::one(), T::one());
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut p_hat = vec![T::zero(); n];
    let mut s = vec![T::zero(); n];
    let mut s_hat = vec![T::zero(); n];
    let mut t = vec![T::zero(); n];
    let mut restarts = 0;

    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() <= tiny * norm2(&r_hat) * norm2(&r) || !rho_new.is_finite() {
            // Shadow residual became orthogonal: restart from the current iterate.
            restarts += 1;
            r = residual(a, b, &x);
            r_hat.copy_from_slice(&r);
            rho = T::one();
            alpha = T::one();
            omega = T::one();
            v.iter_mut().for_each(|e| *e = T::zero());
            p.iter_mut().for_each(|e| *e = T::zero());
            if norm2(&r) <= target || restarts > 500 {
                break;
            }
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for ((pi, &ri), &vi) in p.iter_mut().zip(&r).zip(&v) {
            *pi = ri + beta * (*pi - omega * vi);
        }
        apply(&minv, &p, &mut p_hat);
        a.spmv_into(&p_hat, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == T::zero() || !rv.is_finite() {
            rho = T::zero();
            continue;
        }
        alpha = rho / rv;
        for ((si, &ri), &vi) in s.iter_mut().zip(&r).zip(&v) {
            *si = ri - alpha * vi;
        }
        if norm2(&s) <= target {
            axpy(alpha, &p_hat, &mut x);
            r = residual(a, b, &x);
            if norm2(&r) <= target {
                break;
            }
            // Recursive residual drifted from the true one: restart.
            r_hat.iter_mut().for_each(|e| *e = T::zero());
            continue;
        }
        apply(&minv, &s, &mut s_hat);
        a.spmv_into(&s_hat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > T::zero() { dot(&t, &s) / tt } else { T::zero() };
        axpy(alpha, &p_hat, &mut x);
        axpy(omega, &s_hat, &mut x);
        for ((ri, &si), &ti) in r.iter_mut().zip(&s).zip(&t) {
            *ri = si - omega * ti;
        }
        if norm2(&r) <= target {
            r = residual(a, b, &x);
            if norm2(&r) <= target {
                break;
            }
            r_hat.iter_mut().for_each(|e| *e = T::zero());
            continue;
        }
        if omega == T::zero() {
            // Forces a restart on the next pass.
            rho = T::zero();
            r_hat.iter_mut().for_each(|e| *e = T::zero());
        }
    }
    (x, it, restarts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CooBuilder;

    fn laplace_1d(n: usize) -> SparseMatrix<f64> {
        let mut b = CooBuilder::new(n);
        for i in 0..n {
            b.push(i, i, 2.0);
            if i > 0 {
                b.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                b.push(i, i + 1, -1.0);
            }
        }
        b.finalize()
    }

    fn check(method: Method) {
        let a = laplace_1d(50);
        let x_ref: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let rhs = a.spmv(&x_ref).unwrap();
        let cfg = SolverConfig::default().with_method(method).with_tolerance(1e-12, 1e-300);
        let (x, rep) = solve(&a, &rhs, &cfg).unwrap();
        assert!(rep.converged, "{rep:?}");
        for (u, v) in x.iter().zip(&x_ref) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn all_methods_solve_spd_system() {
        check(Method::Cg);
        check(Method::BiCgStab);
        check(Method::Direct);
    }

    #[test]
    fn cg_rejects_nonsymmetric() {
        let a = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![0.0, 2.0]]);
        let cfg = SolverConfig::default().with_method(Method::Cg);
        assert!(matches!(solve(&a, &[1.0, 1.0], &cfg), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn bicgstab_nonsymmetric() {
        let a = SparseMatrix::from_dense(&[
            vec![4.0, 1.0, 0.0],
            vec![-2.0, 5.0, 1.0],
            vec![0.0, -1.0, 3.0],
        ]);
        let cfg = SolverConfig::default().with_tolerance(1e-13, 1e-300);
        let (x, rep) = solve(&a, &[1.0, 2.0, 3.0], &cfg).unwrap();
        assert!(rep.converged);
        let r = residual(&a, &[1.0, 2.0, 3.0], &x);
        assert!(norm2(&r) < 1e-12);
    }

    #[test]
    fn warm_start_at_solution_takes_no_iterations() {
        let a = laplace_1d(10);
        let x_ref = vec![1.0; 10];
        let rhs = a.spmv(&x_ref).unwrap();
        for m in [Method::Cg, Method::BiCgStab] {
            let cfg = SolverConfig {
                initial_guess: Some(x_ref.clone()),
                ..SolverConfig::default().with_method(m)
            };
            let (_, rep) = solve(&a, &rhs, &cfg).unwrap();
            assert_eq!(rep.iterations, 0);
            assert!(rep.converged);
        }
    }

    #[test]
    fn invalid_configuration() {
        let a = laplace_1d(3);
        let cfg = SolverConfig {
            max_iters: 0,
            ..SolverConfig::default()
        };
        assert!(matches!(solve(&a, &[1.0; 3], &cfg), Err(Error::Invalid(_))));
        let cfg = SolverConfig::default().with_tolerance(0.0, 0.0);
        assert!(matches!(solve(&a, &[1.0; 3], &cfg), Err(Error::Invalid(_))));
        assert!(matches!(
            solve(&a, &[1.0; 2], &SolverConfig::default()),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let a = laplace_1d(200);
        let cfg = SolverConfig {
            max_iters: 2,
            ..SolverConfig::default().with_method(Method::Cg)
        };
        let (_, rep) = solve(&a, &vec![1.0; 200], &cfg).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 2);
    }
}
