//! Three-group SP3 photoionization model.
//!
//! Each group solves two screened Poisson equations that couple only through
//! their Robin boundary conditions. The coupling is handled by a fixed point:
//! a first pass ignores it, later passes move the lagged boundary values of
//! the partner equation into the right-hand side. Units are CGS with
//! pressures in Torr.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::sync::Arc;

use crate::assembly::{
    assemble_adapted, assemble_rhs, boundary_faces, BcSpec, BoundaryCondition, BoundaryFace,
    BoundaryValue, FluxScheme, OperatorSpec,
};
use crate::error::{Error, Result};
use crate::grid::{Forest, LeafMap};
use crate::linalg::{solve, SolverConfig};
use crate::Real;

/// Closed-form SP3 coefficients; index 0 holds the `+` root, index 1 the `-`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sp3Constants<T> {
    pub kappa: [T; 2],
    pub alpha: [T; 2],
    pub beta: [T; 2],
    pub gamma: [T; 2],
}

impl<T: Real> Sp3Constants<T> {
    pub fn new() -> Self {
        let r65 = T::lit(6.0 / 5.0).sqrt();
        let r56 = T::lit(5.0 / 6.0).sqrt();
        let pm = |f: &dyn Fn(T) -> T| [f(T::one()), f(-T::one())];
        Self {
            kappa: pm(&|s| (T::lit(3.0) + s * T::lit(2.0) * r65) / T::lit(7.0)),
            alpha: pm(&|s| T::lit(5.0 / 96.0) * (T::lit(34.0) + s * T::lit(11.0) * r65)),
            beta: pm(&|s| T::lit(5.0 / 96.0) * (T::lit(2.0) + s * r65)),
            gamma: pm(&|s| T::lit(5.0 / 7.0) * (T::one() + s * T::lit(3.0) * r56)),
        }
    }
}

impl<T: Real> Default for Sp3Constants<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Weight `A` and absorption `lambda` of one wavelength group, both in
/// cm^-1 Torr^-1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotoGroupParams<T> {
    pub a: T,
    pub lambda: T,
}

/// The standard three-group fit for air.
pub fn three_group_air<T: Real>() -> [PhotoGroupParams<T>; 3] {
    [(0.0067, 0.0447), (0.0346, 0.1121), (0.3059, 0.5994)].map(|(a, l)| PhotoGroupParams {
        a: T::lit(a),
        lambda: T::lit(l),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams<T> {
    /// Oxygen partial pressure (Torr).
    pub p_o2: T,
    /// Total pressure (Torr).
    pub p: T,
    /// Quenching pressure (Torr).
    pub p_q: T,
    /// Photoionization efficiency.
    pub xi: T,
    /// Speed of light (cm/s).
    pub c: T,
}

impl<T: Real> Default for PhysicalParams<T> {
    fn default() -> Self {
        Self {
            p_o2: T::lit(150.0),
            p: T::lit(760.0),
            p_q: T::lit(30.0),
            xi: T::lit(0.1),
            c: T::lit(2.99792458e10),
        }
    }
}

impl<T: Real> PhysicalParams<T> {
    fn validate(&self) -> Result<()> {
        if self.p_o2 > T::zero() && self.p > T::zero() && self.p_q > T::zero() {
            Ok(())
        } else {
            Err(Error::Invalid("pressures must be positive".into()))
        }
    }

    fn quenching(&self) -> T {
        self.p_q / (self.p + self.p_q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sp3Boundary {
    /// Zero flux everywhere; the equations decouple.
    Neumann,
    /// Non-reflecting, non-emitting walls.
    Robin,
}

#[derive(Clone, Debug)]
pub struct Sp3Options<T> {
    pub boundary: Sp3Boundary,
    pub solver: SolverConfig<T>,
    pub max_iterations: usize,
    /// Stop once the relative l2 update of (phi1, phi2) falls below this.
    pub update_tol: T,
}

impl<T: Real> Default for Sp3Options<T> {
    fn default() -> Self {
        Self {
            boundary: Sp3Boundary::Robin,
            solver: SolverConfig::default().with_tolerance(T::lit(1e-12), T::lit(1e-300)),
            max_iterations: 3,
            update_tol: T::lit(1e-6),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroupSolution<T> {
    pub phi: [Vec<T>; 2],
    /// Fixed-point passes performed.
    pub iterations: usize,
    /// Relative update after each correction pass (empty if none ran).
    pub updates: Vec<T>,
    pub solver_iterations: usize,
}

struct Equation<T> {
    n: usize,
    matrix: crate::linalg::SparseMatrix<T>,
    rhs: Vec<T>,
    robin_a: T,
}

/// Solves both equations of one group for the source `s` given on leaves.
pub fn sp3_solve_group<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    group: &PhotoGroupParams<T>,
    params: &PhysicalParams<T>,
    source: &[T],
    opts: &Sp3Options<T>,
) -> Result<GroupSolution<T>> {
    params.validate()?;
    if source.len() != leaves.len() {
        return Err(Error::SizeMismatch {
            expected: leaves.len(),
            got: source.len(),
        });
    }
    if opts.max_iterations == 0 {
        return Err(Error::Invalid("max_iterations must be at least 1".into()));
    }
    let k = Sp3Constants::<T>::new();
    let absorption = group.lambda * params.p_o2;
    let q = params.quenching();
    let scheme = FluxScheme::centered();
    let faces = boundary_faces(forest, leaves);
    let geom = forest.geometry();

    let mut eqs = Vec::with_capacity(2);
    for n in 0..2 {
        let mu2 = (absorption / k.kappa[n]).powi(2);
        let op = OperatorSpec::Screened { mu2 };
        let robin_a = absorption * k.alpha[n];
        let bc = match opts.boundary {
            Sp3Boundary::Neumann => BcSpec::uniform(BoundaryCondition::Neumann),
            Sp3Boundary::Robin => BcSpec::uniform(BoundaryCondition::Robin {
                a: robin_a,
                b: BoundaryValue::Constant(T::zero()),
            }),
        };
        let sys = assemble_adapted(forest, leaves, &scheme, &op, &bc)?;
        let scaled: Vec<T> = source
            .iter()
            .map(|&s| absorption / k.kappa[n].powi(2) * q * s)
            .collect();
        let rhs = assemble_rhs(&scaled, &op, &sys.rhs_bc)?;
        eqs.push(Equation {
            n,
            matrix: sys.matrix,
            rhs,
            robin_a,
        });
    }

    let run = |eq: &Equation<T>, rhs: &[T], guess: Option<&Vec<T>>| -> Result<(Vec<T>, usize)> {
        let mut cfg = opts.solver.clone();
        cfg.initial_guess = guess.cloned();
        let (x, rep) = solve(&eq.matrix, rhs, &cfg)?;
        if !rep.converged {
            return Err(Error::NotConverged {
                iterations: rep.iterations,
                residual: rep.residual_norm.as_f64(),
            });
        }
        Ok((x, rep.iterations))
    };

    let (first, second) = rayon::join(|| run(&eqs[0], &eqs[0].rhs, None), || run(&eqs[1], &eqs[1].rhs, None));
    let (p1, i1) = first?;
    let (p2, i2) = second?;
    let mut phi = [p1, p2];
    let mut solver_iterations = i1 + i2;
    let mut couplings: [Vec<T>; 2] = [vec![T::zero(); faces.len()], vec![T::zero(); faces.len()]];
    let mut updates = Vec::new();
    let mut iterations = 1;

    if opts.boundary == Sp3Boundary::Robin {
        while iterations < opts.max_iterations {
            iterations += 1;
            // Lagged boundary values of each equation under its current data.
            let face_values: Vec<Vec<T>> = (0..2)
                .map(|n| {
                    faces
                        .iter()
                        .zip(&couplings[n])
                        .map(|((i, f), &c)| {
                            let h = geom.width(f.cell.level, f.axis);
                            let two_h = T::lit(2.0) / h;
                            (two_h * phi[n][*i] - c) / (two_h + eqs[n].robin_a)
                        })
                        .collect()
                })
                .collect();
            // Equation 1 couples to phi2 through beta2 and vice versa.
            couplings = [
                face_values[1].iter().map(|&v| absorption * k.beta[1] * v).collect(),
                face_values[0].iter().map(|&v| absorption * k.beta[0] * v).collect(),
            ];
            let rhs: Vec<Vec<T>> = eqs
                .iter()
                .map(|eq| coupled_rhs(eq, &faces, &couplings[eq.n], forest))
                .collect();
            let (a, b) = rayon::join(
                || run(&eqs[0], &rhs[0], Some(&phi[0])),
                || run(&eqs[1], &rhs[1], Some(&phi[1])),
            );
            let (n1, j1) = a?;
            let (n2, j2) = b?;
            solver_iterations += j1 + j2;
            let mut diff = T::zero();
            let mut size = T::zero();
            for (old, new) in phi.iter().zip([&n1, &n2]) {
                for (&o, &v) in old.iter().zip(new.iter()) {
                    diff += (v - o) * (v - o);
                    size += v * v;
                }
            }
            let update = if size > T::zero() { (diff / size).sqrt() } else { diff.sqrt() };
            phi = [n1, n2];
            updates.push(update);
            if update < opts.update_tol {
                break;
            }
        }
    }
    Ok(GroupSolution {
        phi,
        iterations,
        updates,
        solver_iterations,
    })
}

fn coupled_rhs<T: Real>(
    eq: &Equation<T>,
    faces: &[(usize, BoundaryFace)],
    coupling: &[T],
    forest: &Forest<T>,
) -> Vec<T> {
    let geom = forest.geometry();
    let map: FxHashMap<BoundaryFace, T> = faces.iter().map(|(_, f)| *f).zip(coupling.iter().copied()).collect();
    let cond = BoundaryCondition::Robin {
        a: eq.robin_a,
        b: BoundaryValue::PerFace(Arc::new(map)),
    };
    let mut rhs = eq.rhs.clone();
    for (i, f) in faces {
        let h = geom.width(f.cell.level, f.axis);
        let center = geom.face_center(&f.cell, f.axis, f.side);
        let (_, known) = cond.normal_derivative(f, &center, h);
        rhs[*i] -= known / h;
    }
    rhs
}

/// Isotropic photon distribution of one group.
pub fn photon_isotropic<T: Real>(phi1: &[T], phi2: &[T]) -> Result<Vec<T>> {
    if phi1.len() != phi2.len() {
        return Err(Error::SizeMismatch {
            expected: phi1.len(),
            got: phi2.len(),
        });
    }
    let g = Sp3Constants::<T>::new().gamma;
    let den = g[1] - g[0];
    Ok(phi1
        .iter()
        .zip(phi2)
        .map(|(&a, &b)| (g[1] * a - g[0] * b) / den)
        .collect())
}

/// Photoionization source summed over groups.
pub fn photo_source<T: Real>(
    psi: &[Vec<T>],
    groups: &[PhotoGroupParams<T>],
    params: &PhysicalParams<T>,
) -> Result<Vec<T>> {
    if psi.len() != groups.len() {
        return Err(Error::SizeMismatch {
            expected: groups.len(),
            got: psi.len(),
        });
    }
    let n = psi.first().map_or(0, Vec::len);
    let mut s = vec![T::zero(); n];
    for (p, g) in psi.iter().zip(groups) {
        if p.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: p.len(),
            });
        }
        let w = g.a * params.xi * params.p_o2 * params.c;
        for (si, &pi) in s.iter_mut().zip(p) {
            *si += w * pi;
        }
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct Sp3Solution<T> {
    pub groups: Vec<GroupSolution<T>>,
    pub psi: Vec<Vec<T>>,
    pub source: Vec<T>,
}

/// All groups (in parallel), their photon distributions and the total source.
pub fn sp3_solve<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    groups: &[PhotoGroupParams<T>],
    params: &PhysicalParams<T>,
    source: &[T],
    opts: &Sp3Options<T>,
) -> Result<Sp3Solution<T>> {
    let solved: Vec<GroupSolution<T>> = groups
        .par_iter()
        .map(|g| sp3_solve_group(forest, leaves, g, params, source, opts))
        .collect::<Result<_>>()?;
    let psi = solved
        .iter()
        .map(|s| photon_isotropic(&s.phi[0], &s.phi[1]))
        .collect::<Result<Vec<_>>>()?;
    let total = photo_source(&psi, groups, params)?;
    Ok(Sp3Solution {
        groups: solved,
        psi,
        source: total,
    })
}
