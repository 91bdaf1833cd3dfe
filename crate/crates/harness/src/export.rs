//! CSV, Matrix Market and forest exports.
//!
//! Reals are written with 17 significant digits so that files round-trip
//! exactly; wall-clock timings only ever go to `timings.csv`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mrpoisson_core::grid::write_forest_dump;
use mrpoisson_core::{Forest, LeafMap, SparseMatrix};

use crate::cases::{GaussianRun, Sp3Run};
use crate::error::{HResult, HarnessError};
use crate::study::{Sweep, TimingPoint};

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> HResult<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::io(path, e))
}

/// Writes a header and rows as RFC 4180 CSV.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> HResult<()> {
    let io = |e: csv::Error| HarnessError::io(path, e.into());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(create(path)?);
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn convergence_header(dims: usize) -> Vec<String> {
    let mut h = strings(&["eta", "level", "dx", "leaves", "compression_percent", "err_phi", "rel_err_phi"]);
    h.extend((0..dims).map(|a| format!("err_e{a}")));
    h.extend(strings(&["nnz", "nnz_per_row", "symmetry_fraction", "iterations", "residual"]));
    h
}

pub fn convergence_row(r: &GaussianRun) -> Vec<String> {
    let mut row = vec![
        real(r.eta),
        r.level.to_string(),
        real(r.dx),
        r.leaves.to_string(),
        real(r.compression),
        real(r.err_phi),
        real(r.rel_err_phi),
    ];
    row.extend(r.err_field.iter().map(|&e| real(e)));
    row.extend([
        r.stats.nnz.to_string(),
        real(r.stats.ratio),
        real(r.stats.symmetry_fraction),
        r.iterations.to_string(),
        real(r.residual),
    ]);
    row
}

/// Convergence table: one row per (eta, level), cell size descending.
pub fn write_convergence(path: &Path, dims: usize, sweeps: &[Sweep]) -> HResult<()> {
    let rows: Vec<_> = sweeps.iter().flat_map(|s| s.runs.iter().map(convergence_row)).collect();
    write_csv(path, &convergence_header(dims), &rows)
}

pub fn write_orders(path: &Path, dims: usize, sweeps: &[Sweep]) -> HResult<()> {
    let mut header = strings(&["eta", "level_from", "level_to", "order_phi"]);
    header.extend((0..dims).map(|a| format!("order_e{a}")));
    let mut rows = Vec::new();
    for s in sweeps {
        for (w, o) in s.runs.windows(2).zip(s.orders()) {
            let mut row = vec![real(s.eta), w[0].level.to_string(), w[1].level.to_string()];
            row.extend(o.iter().map(|&v| real(v)));
            rows.push(row);
        }
    }
    write_csv(path, &header, &rows)
}

pub fn write_timings(path: &Path, sweeps: &[Sweep], assembly: &[TimingPoint], slope: Option<f64>) -> HResult<()> {
    let header = strings(&["kind", "eta", "level", "leaves", "assembly_s", "solve_s"]);
    let mut rows = Vec::new();
    for s in sweeps {
        for r in &s.runs {
            rows.push(vec![
                "run".into(),
                real(s.eta),
                r.level.to_string(),
                r.leaves.to_string(),
                real(r.assembly_time.as_secs_f64()),
                real(r.solve_time.as_secs_f64()),
            ]);
        }
    }
    for p in assembly {
        rows.push(vec![
            "assembly".into(),
            String::new(),
            p.level.to_string(),
            p.leaves.to_string(),
            real(p.assembly.as_secs_f64()),
            String::new(),
        ]);
    }
    if let Some(s) = slope {
        rows.push(vec!["slope".into(), String::new(), String::new(), String::new(), real(s), String::new()]);
    }
    write_csv(path, &header, &rows)
}

/// Per-leaf field table: cell, center coordinates and the named columns.
pub fn write_fields(
    path: &Path,
    forest: &Forest<f64>,
    leaves: &LeafMap,
    columns: &[(&str, &[f64])],
) -> HResult<()> {
    let g = forest.geometry();
    let dims = g.dims();
    let mut header = strings(&["leaf", "level"]);
    header.extend((0..dims).map(|a| format!("x{a}")));
    header.extend(columns.iter().map(|(n, _)| n.to_string()));
    let rows: Vec<Vec<String>> = leaves
        .cells()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let x = g.center(c);
            let mut row = vec![i.to_string(), c.level.to_string()];
            row.extend(x[..dims].iter().map(|&v| real(v)));
            row.extend(columns.iter().map(|(_, v)| real(v[i])));
            row
        })
        .collect();
    write_csv(path, &header, &rows)
}

pub fn write_sp3_summary(path: &Path, runs: &[Sp3Run]) -> HResult<()> {
    let header = strings(&["boundary", "group", "iterations", "solver_iterations", "last_update", "updates"]);
    let mut rows = Vec::new();
    for r in runs {
        for (l, g) in r.solution.groups.iter().enumerate() {
            rows.push(vec![
                format!("{:?}", r.boundary).to_lowercase(),
                (l + 1).to_string(),
                g.iterations.to_string(),
                g.solver_iterations.to_string(),
                g.updates.last().map_or(String::new(), |&u| real(u)),
                g.updates.iter().map(|&u| real(u)).collect::<Vec<_>>().join(" "),
            ]);
        }
    }
    write_csv(path, &header, &rows)
}

pub fn write_matrix(path: &Path, m: &SparseMatrix<f64>) -> HResult<()> {
    let mut w = create(path)?;
    m.write_matrix_market(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| HarnessError::io(path, e))
}

pub fn write_forest(path: &Path, f: &Forest<f64>) -> HResult<()> {
    let mut w = create(path)?;
    write_forest_dump(f, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| HarnessError::io(path, e))
}

pub fn write_vector(path: &Path, name: &str, v: &[f64]) -> HResult<()> {
    let rows: Vec<_> = v.iter().enumerate().map(|(i, &x)| vec![i.to_string(), real(x)]).collect();
    write_csv(path, &strings(&["row", name]), &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_convergence(&p, 2, &[]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("eta,level,dx"));
    }

    #[test]
    fn reals_carry_17_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
