use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mrpoisson_core::assembly::assemble_adapted;
use mrpoisson_core::{assemble_rhs, FluxScheme, OperatorSpec};

use crate::cases::{gaussian_bc_for, gaussian_grid, run_gaussian, run_sp3};
use crate::config::{CaseId, RunConfig};
use crate::error::{HResult, HarnessError};
use crate::export;
use crate::study;

#[derive(Parser, Debug)]
#[command(name = "mrpoisson", version, about = "Adaptive multiresolution Poisson solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one case and write its fields.
    Run,
    /// Convergence sweep over levels and thresholds, plus assembly timings.
    Study,
    /// Three-group SP3 photoionization demo.
    Sp3,
    /// Write the assembled operator, right-hand side and forest.
    ExportMatrix,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub max_level: Option<u8>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Relative and absolute solver tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// cg, bicgstab or direct.
    #[arg(long, global = true)]
    pub solver: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker thread cap; 1 gives fully reproducible runs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl Common {
    pub fn resolve(&self) -> HResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(l) = self.max_level {
            cfg.max_level = l;
            cfg.study.levels.retain(|&k| k <= l);
            cfg.study.timing_levels.retain(|&k| k <= l);
        }
        if let Some(e) = self.eta {
            cfg.eta = e;
            cfg.study.etas = vec![e];
        }
        if let Some(t) = self.tol {
            cfg.solver.tol = Some(t);
            cfg.solver.abs_tol = Some(t);
        }
        if let Some(s) = &self.solver {
            cfg.solver.method = s.clone();
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> HResult<()> {
    let cfg = cli.common.resolve()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Run if cfg.case == CaseId::Sp3demo => sp3(&cfg),
        Command::Run => run(&cfg),
        Command::Study => study_cmd(&cfg),
        Command::Sp3 => sp3(&cfg),
        Command::ExportMatrix => export_matrix(&cfg),
    })
}

fn gaussian_only(cfg: &RunConfig) -> HResult<()> {
    if cfg.case == CaseId::Sp3demo {
        Err(HarnessError::Config("this command needs a gaussian case".into()))
    } else {
        Ok(())
    }
}

fn out(cfg: &RunConfig, name: &str) -> PathBuf {
    Path::new(&cfg.output_dir).join(name)
}

fn run(cfg: &RunConfig) -> HResult<()> {
    gaussian_only(cfg)?;
    let r = run_gaussian(cfg, cfg.max_level, cfg.eta)?;
    let dims = cfg.dims();
    export::write_csv(&out(cfg, "run.csv"), &export::convergence_header(dims), &[export::convergence_row(&r)])?;
    let (_, _, g) = gaussian_grid(cfg, cfg.max_level, cfg.eta)?;
    let geom = r.forest.geometry();
    let centers: Vec<_> = r.leaf_map.cells().iter().map(|c| geom.center(c)).collect();
    let exact: Vec<f64> = centers.iter().map(|x| g.phi(x)).collect();
    let source: Vec<f64> = centers.iter().map(|x| g.rho(x)).collect();
    let names: Vec<String> = (0..dims).map(|a| format!("e{a}")).collect();
    let mut cols: Vec<(&str, &[f64])> = vec![("phi", &r.phi), ("phi_exact", &exact), ("rho", &source)];
    for (n, e) in names.iter().zip(&r.field) {
        cols.push((n.as_str(), e.as_slice()));
    }
    export::write_fields(&out(cfg, "fields.csv"), &r.forest, &r.leaf_map, &cols)?;
    export::write_timings(
        &out(cfg, "timings.csv"),
        &[study::Sweep {
            eta: cfg.eta,
            runs: vec![r.clone()],
        }],
        &[],
        None,
    )?;
    println!(
        "{} J={} eta={:e}: leaves={} ({:.2}%), err_phi={:.3e}, iterations={}, symmetry={:.3}",
        cfg.case, r.level, r.eta, r.leaves, r.compression, r.err_phi, r.iterations, r.stats.symmetry_fraction
    );
    Ok(())
}

fn study_cmd(cfg: &RunConfig) -> HResult<()> {
    gaussian_only(cfg)?;
    let levels = &cfg.study.levels;
    let sweeps = cfg
        .study
        .etas
        .iter()
        .map(|&eta| study::convergence(cfg, levels, eta))
        .collect::<HResult<Vec<_>>>()?;
    let dims = cfg.dims();
    export::write_convergence(&out(cfg, "convergence.csv"), dims, &sweeps)?;
    export::write_orders(&out(cfg, "orders.csv"), dims, &sweeps)?;
    let timing = study::assembly_timings(cfg, &cfg.study.timing_levels, cfg.study.timing_eta, cfg.study.timing_repeats)?;
    let slope = (timing.len() >= 2).then(|| study::complexity_slope(&timing));
    export::write_timings(&out(cfg, "timings.csv"), &sweeps, &timing, slope)?;
    for s in &sweeps {
        for (w, o) in s.runs.windows(2).zip(s.orders()) {
            println!("eta={:e} J={}->{} orders {:?}", s.eta, w[0].level, w[1].level, o);
        }
    }
    if let Some(s) = slope {
        println!("assembly time slope vs leaves: {s:.3}");
    }
    Ok(())
}

fn sp3(cfg: &RunConfig) -> HResult<()> {
    let runs = run_sp3(cfg)?;
    export::write_sp3_summary(&out(cfg, "sp3_summary.csv"), &runs)?;
    for r in &runs {
        let variant = format!("{:?}", r.boundary).to_lowercase();
        let mut names = Vec::new();
        let mut data: Vec<&[f64]> = vec![&r.source];
        for (l, g) in r.solution.groups.iter().enumerate() {
            names.push(format!("phi1_g{}", l + 1));
            names.push(format!("phi2_g{}", l + 1));
            names.push(format!("psi_g{}", l + 1));
            data.push(&g.phi[0]);
            data.push(&g.phi[1]);
            data.push(&r.solution.psi[l]);
        }
        data.push(&r.solution.source);
        let mut cols: Vec<(&str, &[f64])> = vec![("source", data[0])];
        for (n, d) in names.iter().zip(&data[1..]) {
            cols.push((n.as_str(), d));
        }
        cols.push(("s_ph", &r.solution.source));
        export::write_fields(&out(cfg, &format!("sp3_fields_{variant}.csv")), &r.forest, &r.leaves, &cols)?;
        let negative = r.solution.source.iter().filter(|&&v| v < 0.0).count();
        for (l, g) in r.solution.groups.iter().enumerate() {
            println!(
                "{variant} group {}: {} passes, updates {:?}",
                l + 1,
                g.iterations,
                g.updates
            );
        }
        if negative > 0 {
            println!("{variant}: warning: S_ph negative on {negative} leaves");
        }
    }
    Ok(())
}

fn export_matrix(cfg: &RunConfig) -> HResult<()> {
    gaussian_only(cfg)?;
    let (forest, leaves, g) = gaussian_grid(cfg, cfg.max_level, cfg.eta)?;
    let bc = gaussian_bc_for(cfg, g);
    let op = OperatorSpec::Laplace;
    let sys = assemble_adapted(&forest, &leaves, &FluxScheme::centered(), &op, &bc)?;
    let geom = forest.geometry();
    let source: Vec<f64> = leaves.cells().iter().map(|c| g.rho(&geom.center(c))).collect();
    let rhs = assemble_rhs(&source, &op, &sys.rhs_bc)?;
    export::write_matrix(&out(cfg, "matrix.mtx"), &sys.matrix)?;
    export::write_vector(&out(cfg, "rhs.csv"), "rhs", &rhs)?;
    export::write_forest(&out(cfg, "forest.txt"), &forest)?;
    let s = mrpoisson_core::matrix_stats(&sys.matrix);
    println!(
        "N={} nnz={} nnz/N={:.3} symmetry={:.4}",
        s.n, s.nnz, s.ratio, s.symmetry_fraction
    );
    Ok(())
}
