//! Convergence and complexity sweeps.

use std::time::{Duration, Instant};

use mrpoisson_core::assembly::assemble_adapted;
use mrpoisson_core::{FluxScheme, OperatorSpec};

use crate::cases::{gaussian_grid, run_gaussian, GaussianRun};
use crate::config::RunConfig;
use crate::error::HResult;

/// Rows of one threshold value, ordered by decreasing cell size.
pub struct Sweep {
    pub eta: f64,
    pub runs: Vec<GaussianRun>,
}

impl Sweep {
    /// Observed orders between successive rows for phi and each field
    /// component: `log2(e_k / e_{k+1}) / log2(dx_k / dx_{k+1})`.
    pub fn orders(&self) -> Vec<Vec<f64>> {
        self.runs
            .windows(2)
            .map(|w| {
                let r = (w[0].dx / w[1].dx).log2();
                std::iter::once((w[0].err_phi, w[1].err_phi))
                    .chain(w[0].err_field.iter().copied().zip(w[1].err_field.iter().copied()))
                    .map(|(a, b)| (a / b).log2() / r)
                    .collect()
            })
            .collect()
    }
}

pub fn convergence(cfg: &RunConfig, levels: &[u8], eta: f64) -> HResult<Sweep> {
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    let runs = levels
        .iter()
        .map(|&l| run_gaussian(cfg, l, eta))
        .collect::<HResult<Vec<_>>>()?;
    Ok(Sweep { eta, runs })
}

/// Fastest of `repeats` assemblies on the adapted Gaussian grid.
#[derive(Clone, Debug)]
pub struct TimingPoint {
    pub level: u8,
    pub leaves: usize,
    pub assembly: Duration,
}

pub fn assembly_timings(cfg: &RunConfig, levels: &[u8], eta: f64, repeats: usize) -> HResult<Vec<TimingPoint>> {
    let mut out = Vec::new();
    for &level in levels {
        let (forest, leaves, _) = gaussian_grid(cfg, level, eta)?;
        let bc = mrpoisson_core::BcSpec::uniform(mrpoisson_core::BoundaryCondition::dirichlet(0.0));
        let mut best = Duration::MAX;
        for _ in 0..repeats.max(1) {
            let t = Instant::now();
            let sys = assemble_adapted(&forest, &leaves, &FluxScheme::centered(), &OperatorSpec::Laplace, &bc)?;
            best = best.min(t.elapsed());
            std::hint::black_box(sys);
        }
        out.push(TimingPoint {
            level,
            leaves: leaves.len(),
            assembly: best,
        });
    }
    Ok(out)
}

/// Least-squares slope of `log(y)` against `log(x)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

pub fn complexity_slope(points: &[TimingPoint]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.leaves as f64, p.assembly.as_secs_f64()))
        .collect();
    loglog_slope(&pts)
}
