use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::Real;

/// Triplet accumulator; duplicates are summed on [`CooBuilder::finalize`].
#[derive(Clone, Debug)]
pub struct CooBuilder<T> {
    n: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> CooBuilder<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    /// Number of accumulated triplets (before merging).
    pub fn raw_len(&self) -> usize {
        self.entries.len()
    }

    pub fn extend_from(&mut self, other: CooBuilder<T>) {
        self.entries.extend(other.entries);
    }

    /// Sorts by (row, column), sums duplicates in ascending value order (so
    /// the result does not depend on insertion order) and drops entries that
    /// cancel exactly.
    pub fn finalize(mut self) -> SparseMatrix<T> {
        self.entries.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then(a.2.partial_cmp(&b.2).unwrap_or(std::cmp::Ordering::Equal))
        });
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col = Vec::with_capacity(self.entries.len());
        let mut val = Vec::with_capacity(self.entries.len());
        let mut it = self.entries.into_iter().peekable();
        while let Some((i, j, mut v)) = it.next() {
            while let Some(&(i2, j2, v2)) = it.peek() {
                if i2 == i && j2 == j {
                    v += v2;
                    it.next();
                } else {
                    break;
                }
            }
            if v != T::zero() {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            n: self.n,
            row_ptr,
            col,
            val,
        }
    }
}

/// Square matrix in compressed sparse row form with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<T>,
}

const PARALLEL_ROWS: usize = 16_384;

impl<T: Real> SparseMatrix<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col: (0..n).collect(),
            val: vec![T::one(); n],
        }
    }

    pub fn from_dense(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut b = CooBuilder::new(n);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                b.push(i, j, v);
            }
        }
        b.finalize()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col
    }

    pub fn values(&self) -> &[T] {
        &self.val
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()]
            .binary_search(&j)
            .ok()
            .map(|k| self.val[r.start + k])
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n)
            .map(|i| self.get(i, i).unwrap_or(T::zero()))
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.val.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// Adds `shift` to every diagonal entry.
    pub fn shift_diagonal(&self, shift: T) -> Self {
        let mut b = CooBuilder::with_capacity(self.n, self.nnz() + self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                b.push(i, j, v);
            }
            b.push(i, i, shift);
        }
        b.finalize()
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![T::zero(); self.n];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn spmv_into(&self, x: &[T], y: &mut [T]) {
        let row = |i: usize| -> T {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            acc
        };
        if self.n >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| *yi = row(i));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row(i);
            }
        }
    }

    /// Matrix Market coordinate export (1-based indices, 17 significant
    /// digits), with one comment line carrying the matrix statistics.
    pub fn write_matrix_market<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let stats = matrix_stats(self);
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(
            out,
            "% n={} nnz={} nnz_per_row={:.6} symmetry_fraction={:.6}",
            stats.n, stats.nnz, stats.ratio, stats.symmetry_fraction
        )?;
        writeln!(out, "{} {} {}", self.n, self.n, self.nnz())?;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixStats {
    pub n: usize,
    pub nnz: usize,
    /// nnz / n.
    pub ratio: f64,
    /// Share of nonzeros `(i, j)` whose transpose entry exists and matches
    /// within `1e-12 * max|a|`.
    pub symmetry_fraction: f64,
}

pub fn matrix_stats<T: Real>(m: &SparseMatrix<T>) -> MatrixStats {
    let tol = T::lit(1e-12) * m.max_abs();
    let mut matched = 0usize;
    for i in 0..m.n {
        for (j, v) in m.row(i) {
            if let Some(w) = m.get(j, i) {
                if (v - w).abs() <= tol {
                    matched += 1;
                }
            }
        }
    }
    let nnz = m.nnz();
    MatrixStats {
        n: m.n,
        nnz,
        ratio: if m.n == 0 { 0.0 } else { nnz as f64 / m.n as f64 },
        symmetry_fraction: if nnz == 0 {
            1.0
        } else {
            matched as f64 / nnz as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let mut b = CooBuilder::new(3);
        b.push(2, 0, 1.0);
        b.push(0, 1, 2.0);
        b.push(0, 1, 3.0);
        b.push(1, 1, 4.0);
        b.push(1, 2, 1.0);
        b.push(1, 2, -1.0);
        let m = b.finalize();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 1), Some(5.0));
        assert_eq!(m.get(1, 2), None);
        assert_eq!(m.row_ptr(), &[0, 1, 2, 3]);
    }

    #[test]
    fn spmv_examples() {
        let m = SparseMatrix::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        assert_eq!(m.spmv(&[1.0, 1.0]).unwrap(), vec![5.0, 4.0]);
        let id = SparseMatrix::<f64>::identity(4);
        assert_eq!(id.spmv(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(m.spmv(&[1.0]), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn symmetry_fraction_counts_matching_pairs() {
        let m = SparseMatrix::from_dense(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 0.5],
            vec![0.0, 1.0, 2.0],
        ]);
        let s = matrix_stats(&m);
        assert_eq!(s.nnz, 7);
        assert!((s.symmetry_fraction - 5.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_market_layout() {
        let m = SparseMatrix::from_dense(&[vec![4.0, 1.0], vec![0.0, 0.1]]);
        let mut buf = Vec::new();
        m.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "%%MatrixMarket matrix coordinate real general");
        assert!(lines[1].starts_with('%'));
        assert_eq!(lines[2], "2 2 3");
        assert_eq!(lines[3], "1 1 4.0000000000000000e0");
        assert_eq!(lines[5], "2 2 1.0000000000000001e-1");
    }
}
