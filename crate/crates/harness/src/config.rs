//! Run configuration, read from TOML.
//!
//! Every key is optional; unknown keys are rejected. Units: the Gaussian
//! cases are dimensionless, the SP3 demo uses centimeters and Torr.
//!
//! ```toml
//! case = "gaussian2d"        # gaussian1d | gaussian2d | sp3demo
//! max_level = 7              # finest level J
//! eta = 1e-4                 # threshold parameter
//! roots = [4, 2]             # root cells per axis (case default if absent)
//! output_dir = "out"
//! threads = 1
//!
//! [solver]
//! method = "bicgstab"        # cg | bicgstab | direct
//! tol = 1e-7                 # default max(1e-3 * eta, 1e-10)
//! abs_tol = 1e-7             # default equal to tol
//! max_iters = 20000
//! preconditioner = "jacobi"  # jacobi | none
//!
//! [gaussian]                 # phi = a exp(-|x|^2 / sigma^2) + b
//! a = 10.0
//! b = 20.0
//! sigma = 0.05
//!
//! [boundary]                 # dirichlet | neumann | symmetry
//! x_min = "dirichlet"
//! x_max = "dirichlet"
//! y_min = "symmetry"
//! y_max = "dirichlet"
//!
//! [study]
//! levels = [4, 5, 6, 7, 8]
//! etas = [1e-10, 1e-4]
//! timing_levels = [3, 4, 5, 6, 7, 8]
//! timing_eta = 1e-10         # threshold of the grids timed for assembly
//! timing_repeats = 3
//!
//! [sp3]
//! half_width = 1.0           # box [-L, L]^d in cm
//! source_sigma = 0.1         # cm
//! source_amplitude = 1.0
//! boundary = "both"          # robin | neumann | both
//! max_iterations = 3
//! update_tol = 1e-6
//! ```

use std::path::{Path, PathBuf};

use mrpoisson_core::{Method, Preconditioner, SolverConfig};
use serde::Deserialize;

use crate::error::{HResult, HarnessError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseId {
    Gaussian1d,
    Gaussian2d,
    Sp3demo,
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CaseId::Gaussian1d => "gaussian1d",
            CaseId::Gaussian2d => "gaussian2d",
            CaseId::Sp3demo => "sp3demo",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Symmetry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sp3BoundaryChoice {
    Robin,
    Neumann,
    Both,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub method: String,
    pub tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_iters: usize,
    pub preconditioner: String,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            method: "bicgstab".into(),
            tol: None,
            abs_tol: None,
            max_iters: 20_000,
            preconditioner: "jacobi".into(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaussianSection {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
}

impl Default for GaussianSection {
    fn default() -> Self {
        Self {
            a: 10.0,
            b: 20.0,
            sigma: 0.05,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    pub x_min: BcKind,
    pub x_max: BcKind,
    pub y_min: BcKind,
    pub y_max: BcKind,
}

impl Default for BoundarySection {
    fn default() -> Self {
        Self {
            x_min: BcKind::Dirichlet,
            x_max: BcKind::Dirichlet,
            y_min: BcKind::Symmetry,
            y_max: BcKind::Dirichlet,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySection {
    pub levels: Vec<u8>,
    pub etas: Vec<f64>,
    pub timing_levels: Vec<u8>,
    pub timing_eta: f64,
    pub timing_repeats: usize,
}

impl Default for StudySection {
    fn default() -> Self {
        Self {
            levels: vec![4, 5, 6, 7, 8],
            etas: vec![1e-10, 1e-4],
            timing_levels: vec![3, 4, 5, 6, 7, 8],
            timing_eta: 1e-10,
            timing_repeats: 3,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sp3Section {
    pub half_width: f64,
    pub source_sigma: f64,
    pub source_amplitude: f64,
    pub boundary: Sp3BoundaryChoice,
    pub max_iterations: usize,
    pub update_tol: f64,
}

impl Default for Sp3Section {
    fn default() -> Self {
        Self {
            half_width: 1.0,
            source_sigma: 0.1,
            source_amplitude: 1.0,
            boundary: Sp3BoundaryChoice::Both,
            max_iterations: 3,
            update_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub case: CaseId,
    pub dims: Option<usize>,
    pub max_level: u8,
    pub eta: f64,
    pub roots: Option<Vec<u32>>,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
    pub solver: SolverSection,
    pub gaussian: GaussianSection,
    pub boundary: BoundarySection,
    pub study: StudySection,
    pub sp3: Sp3Section,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: CaseId::Gaussian2d,
            dims: None,
            max_level: 7,
            eta: 1e-4,
            roots: None,
            output_dir: PathBuf::from("out"),
            threads: None,
            solver: SolverSection::default(),
            gaussian: GaussianSection::default(),
            boundary: BoundarySection::default(),
            study: StudySection::default(),
            sp3: Sp3Section::default(),
        }
    }
}

/// Floor applied to the default solver tolerance: below it the recomputed
/// residual reaches round-off on the finest desk-scale grids.
pub const TOL_FLOOR: f64 = 1e-10;

impl RunConfig {
    pub fn from_toml(text: &str) -> HResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> HResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn dims(&self) -> usize {
        match self.case {
            CaseId::Gaussian1d => 1,
            CaseId::Gaussian2d => 2,
            CaseId::Sp3demo => self.dims.unwrap_or(2),
        }
    }

    pub fn roots(&self) -> Vec<u32> {
        self.roots.clone().unwrap_or_else(|| match (self.case, self.dims()) {
            (CaseId::Gaussian1d, _) => vec![4],
            (CaseId::Gaussian2d, _) => vec![4, 2],
            (CaseId::Sp3demo, d) => vec![2; d],
        })
    }

    pub fn method(&self) -> HResult<Method> {
        self.solver
            .method
            .parse()
            .map_err(|e: mrpoisson_core::Error| HarnessError::Config(e.to_string()))
    }

    /// Solver settings for threshold parameter `eta`.
    pub fn solver_config(&self, eta: f64) -> HResult<SolverConfig<f64>> {
        let tol = self.solver.tol.unwrap_or_else(|| (1e-3 * eta).max(TOL_FLOOR));
        let preconditioner = match self.solver.preconditioner.as_str() {
            "jacobi" => Preconditioner::Jacobi,
            "none" => Preconditioner::None,
            other => return Err(HarnessError::Config(format!("unknown preconditioner `{other}`"))),
        };
        Ok(SolverConfig {
            method: self.method()?,
            rel_tol: tol,
            abs_tol: self.solver.abs_tol.unwrap_or(tol),
            max_iters: self.solver.max_iters,
            preconditioner,
            initial_guess: None,
        })
    }

    pub fn validate(&self) -> HResult<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        let dims = self.dims();
        if let Some(d) = self.dims {
            let fixed = match self.case {
                CaseId::Gaussian1d => Some(1),
                CaseId::Gaussian2d => Some(2),
                CaseId::Sp3demo => None,
            };
            if fixed.is_some_and(|f| f != d) || !(1..=3).contains(&d) {
                return bad(format!("dims = {d} does not fit case {}", self.case));
            }
        }
        if self.roots().len() != dims || self.roots().contains(&0) {
            return bad(format!("roots must list {dims} positive counts"));
        }
        if self.max_level > 16 {
            return bad(format!("max_level {} exceeds 16", self.max_level));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be a nonnegative number, got {}", self.eta));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if !(self.gaussian.sigma > 0.0) {
            return bad("gaussian.sigma must be positive".into());
        }
        for t in [self.solver.tol, self.solver.abs_tol].into_iter().flatten() {
            if !(t > 0.0) {
                return bad("solver tolerances must be positive".into());
            }
        }
        if self.solver.max_iters == 0 {
            return bad("solver.max_iters must be at least 1".into());
        }
        self.method()?;
        self.solver_config(self.eta)?;
        if self.study.levels.iter().chain(&self.study.timing_levels).any(|&l| l > 16) {
            return bad("study levels must not exceed 16".into());
        }
        if self.study.etas.iter().chain([&self.study.timing_eta]).any(|e| !(*e >= 0.0)) || self.study.timing_repeats == 0 {
            return bad("study etas must be nonnegative and timing_repeats positive".into());
        }
        let s = &self.sp3;
        if !(s.half_width > 0.0 && s.source_sigma > 0.0 && s.update_tol > 0.0) || s.max_iterations == 0 {
            return bad("sp3 lengths, update_tol and max_iterations must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_tolerance_link() {
        let c = RunConfig::from_toml("").unwrap();
        assert_eq!(c.case, CaseId::Gaussian2d);
        assert_eq!(c.roots(), vec![4, 2]);
        let s = c.solver_config(1e-4).unwrap();
        assert!((s.rel_tol - 1e-7).abs() < 1e-22 && s.abs_tol == s.rel_tol);
        assert_eq!(c.solver_config(1e-10).unwrap().rel_tol, TOL_FLOOR);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml("[solver]\nmethod = \"cg\"\nfoo = 2").is_err());
        assert!(RunConfig::from_toml("case = \"gaussian3d\"").is_err());
        assert!(RunConfig::from_toml("case = \"gaussian1d\"\nroots = [1, 2]").is_err());
        assert!(RunConfig::from_toml("[solver]\nmethod = \"gmres\"").is_err());
    }
}
