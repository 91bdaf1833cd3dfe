//! Validation problems.

use std::time::{Duration, Instant};

use mrpoisson_core::assembly::{assemble_adapted, gradient, Assembled};
use mrpoisson_core::grid::{enumerate_leaves, MAX_DIMS};
use mrpoisson_core::mra::{adapt_uniform, norm_l2, sample_uniform};
use mrpoisson_core::sp3::{
    sp3_solve, three_group_air, PhysicalParams, Sp3Boundary, Sp3Options, Sp3Solution,
};
use mrpoisson_core::{
    assemble_rhs, matrix_stats, solve, BcSpec, BoundaryCondition, BoundaryValue, FluxScheme,
    Forest, Geometry, LeafMap, MatrixStats, OperatorSpec, Side, SolveReport, ThresholdSpec,
};

use crate::config::{BcKind, CaseId, RunConfig, Sp3BoundaryChoice};
use crate::error::{HResult, HarnessError};

/// `phi = a exp(-|x|^2 / sigma^2) + b`, solving `div grad phi = rho`.
#[derive(Clone, Copy, Debug)]
pub struct Gaussian {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    pub dims: usize,
}

impl Gaussian {
    fn r2(&self, x: &[f64; MAX_DIMS]) -> f64 {
        x[..self.dims].iter().map(|v| v * v).sum()
    }

    fn bump(&self, x: &[f64; MAX_DIMS]) -> f64 {
        self.a * (-self.r2(x) / (self.sigma * self.sigma)).exp()
    }

    pub fn phi(&self, x: &[f64; MAX_DIMS]) -> f64 {
        self.bump(x) + self.b
    }

    pub fn rho(&self, x: &[f64; MAX_DIMS]) -> f64 {
        let s2 = self.sigma * self.sigma;
        (4.0 * self.r2(x) / (s2 * s2) - 2.0 * self.dims as f64 / s2) * self.bump(x)
    }

    /// Component `axis` of `E = -grad phi`.
    pub fn field(&self, x: &[f64; MAX_DIMS], axis: usize) -> f64 {
        2.0 * x[axis] * self.bump(x) / (self.sigma * self.sigma)
    }
}

pub fn gaussian_geometry(cfg: &RunConfig, level: u8) -> HResult<Geometry<f64>> {
    let (lower, upper): (Vec<f64>, Vec<f64>) = match cfg.case {
        CaseId::Gaussian1d => (vec![-0.5], vec![0.5]),
        CaseId::Gaussian2d => (vec![-0.5, 0.0], vec![0.5, 0.5]),
        CaseId::Sp3demo => {
            let l = cfg.sp3.half_width;
            (vec![-l; cfg.dims()], vec![l; cfg.dims()])
        }
    };
    Geometry::new(cfg.dims(), &cfg.roots(), &lower, &upper, level).map_err(|e| HarnessError::Config(e.to_string()))
}

pub fn gaussian_bc_for(cfg: &RunConfig, g: Gaussian) -> BcSpec<f64> {
    let exact = BoundaryCondition::Dirichlet(BoundaryValue::function(move |x| g.phi(x)));
    let pick = |k: BcKind| match k {
        BcKind::Dirichlet => exact.clone(),
        BcKind::Neumann => BoundaryCondition::Neumann,
        BcKind::Symmetry => BoundaryCondition::Symmetry,
    };
    let b = &cfg.boundary;
    BcSpec::uniform(exact.clone())
        .with(0, Side::Minus, pick(b.x_min))
        .with(0, Side::Plus, pick(b.x_max))
        .with(1, Side::Minus, pick(b.y_min))
        .with(1, Side::Plus, pick(b.y_max))
}

/// One solved Gaussian problem.
#[derive(Clone, Debug)]
pub struct GaussianRun {
    pub level: u8,
    pub eta: f64,
    pub dx: f64,
    pub leaves: usize,
    pub compression: f64,
    pub err_phi: f64,
    /// Error of phi relative to the norm of the exact solution.
    pub rel_err_phi: f64,
    pub err_field: Vec<f64>,
    pub stats: MatrixStats,
    pub iterations: usize,
    pub residual: f64,
    pub assembly_time: Duration,
    pub solve_time: Duration,
    pub forest: Forest<f64>,
    pub leaf_map: LeafMap,
    pub system: Assembled<f64>,
    pub phi: Vec<f64>,
    pub field: Vec<Vec<f64>>,
}

/// Adapted grid for the Gaussian source at `level`.
pub fn gaussian_grid(cfg: &RunConfig, level: u8, eta: f64) -> HResult<(Forest<f64>, LeafMap, Gaussian)> {
    let geom = gaussian_geometry(cfg, level)?;
    let g = Gaussian {
        a: cfg.gaussian.a,
        b: cfg.gaussian.b,
        sigma: cfg.gaussian.sigma,
        dims: cfg.dims(),
    };
    let rho = sample_uniform(&geom, level, |x| g.rho(x));
    let adapted = adapt_uniform(&geom, &[rho], &ThresholdSpec::new(eta, cfg.dims(), level))?;
    Ok((adapted.forest, adapted.leaves, g))
}

pub fn run_gaussian(cfg: &RunConfig, level: u8, eta: f64) -> HResult<GaussianRun> {
    let (forest, leaves, g) = gaussian_grid(cfg, level, eta)?;
    let geom = forest.geometry().clone();
    let bc = gaussian_bc_for(cfg, g);
    let scheme = FluxScheme::centered();
    let op = OperatorSpec::Laplace;

    let t0 = Instant::now();
    let system = assemble_adapted(&forest, &leaves, &scheme, &op, &bc)?;
    let assembly_time = t0.elapsed();

    let centers: Vec<[f64; MAX_DIMS]> = leaves.cells().iter().map(|c| geom.center(c)).collect();
    let source: Vec<f64> = centers.iter().map(|x| g.rho(x)).collect();
    let rhs = assemble_rhs(&source, &op, &system.rhs_bc)?;
    let (phi, report) = solve(&system.matrix, &rhs, &cfg.solver_config(eta)?)?;
    ensure_converged(&report)?;

    let exact: Vec<f64> = centers.iter().map(|x| g.phi(x)).collect();
    let diff: Vec<f64> = phi.iter().zip(&exact).map(|(u, v)| u - v).collect();
    let err_phi = norm_l2(&forest, &leaves, &diff)?;
    let rel_err_phi = err_phi / norm_l2(&forest, &leaves, &exact)?;
    let field = gradient(&forest, &leaves, &scheme, &bc, &phi)?;
    let mut err_field = Vec::with_capacity(cfg.dims());
    for (axis, e) in field.iter().enumerate() {
        let d: Vec<f64> = e.iter().zip(&centers).map(|(v, x)| v - g.field(x, axis)).collect();
        err_field.push(norm_l2(&forest, &leaves, &d)?);
    }
    let stats = matrix_stats(&system.matrix);
    Ok(GaussianRun {
        level,
        eta,
        dx: geom.width(level, 0),
        leaves: leaves.len(),
        compression: 100.0 * leaves.len() as f64 / geom.cells_at(level) as f64,
        err_phi,
        rel_err_phi,
        err_field,
        stats,
        iterations: report.iterations,
        residual: report.residual_norm,
        assembly_time,
        solve_time: report.elapsed,
        forest,
        leaf_map: leaves,
        system,
        phi,
        field,
    })
}

fn ensure_converged(r: &SolveReport<f64>) -> HResult<()> {
    if r.converged {
        Ok(())
    } else {
        Err(mrpoisson_core::Error::NotConverged {
            iterations: r.iterations,
            residual: r.residual_norm,
        }
        .into())
    }
}

/// The SP3 demo for one boundary variant.
pub struct Sp3Run {
    pub boundary: Sp3Boundary,
    pub forest: Forest<f64>,
    pub leaves: LeafMap,
    pub source: Vec<f64>,
    pub solution: Sp3Solution<f64>,
}

pub fn sp3_grid(cfg: &RunConfig) -> HResult<(Forest<f64>, LeafMap, Vec<f64>)> {
    let level = cfg.max_level;
    let geom = gaussian_geometry(cfg, level)?;
    let (amp, s2) = (cfg.sp3.source_amplitude, cfg.sp3.source_sigma.powi(2));
    let dims = cfg.dims();
    let source_at = move |x: &[f64; MAX_DIMS]| {
        amp * (-x[..dims].iter().map(|v| v * v).sum::<f64>() / s2).exp()
    };
    let (forest, leaves) = if cfg.eta > 0.0 {
        let s = sample_uniform(&geom, level, source_at);
        let a = adapt_uniform(&geom, &[s], &ThresholdSpec::new(cfg.eta, dims, level))?;
        (a.forest, a.leaves)
    } else {
        let f = Forest::uniform(geom.clone(), level)?;
        let l = enumerate_leaves(&f);
        (f, l)
    };
    let source = leaves
        .cells()
        .iter()
        .map(|c| source_at(&forest.geometry().center(c)))
        .collect();
    Ok((forest, leaves, source))
}

pub fn run_sp3(cfg: &RunConfig) -> HResult<Vec<Sp3Run>> {
    let (forest, leaves, source) = sp3_grid(cfg)?;
    let variants: &[Sp3Boundary] = match cfg.sp3.boundary {
        Sp3BoundaryChoice::Robin => &[Sp3Boundary::Robin],
        Sp3BoundaryChoice::Neumann => &[Sp3Boundary::Neumann],
        Sp3BoundaryChoice::Both => &[Sp3Boundary::Neumann, Sp3Boundary::Robin],
    };
    let mut solver = cfg.solver_config(cfg.eta)?;
    if cfg.solver.tol.is_none() {
        solver.rel_tol = crate::config::TOL_FLOOR;
        solver.abs_tol = 1e-300;
    }
    let mut runs = Vec::new();
    for &boundary in variants {
        let opts = Sp3Options {
            boundary,
            solver: solver.clone(),
            max_iterations: cfg.sp3.max_iterations,
            update_tol: cfg.sp3.update_tol,
        };
        let solution = sp3_solve(
            &forest,
            &leaves,
            &three_group_air(),
            &PhysicalParams::default(),
            &source,
            &opts,
        )?;
        runs.push(Sp3Run {
            boundary,
            forest: forest.clone(),
            leaves: leaves.clone(),
            source: source.clone(),
            solution,
        });
    }
    Ok(runs)
}
