use super::SparseMatrix;
use crate::error::{Error, Result};
use crate::Real;

pub const DEFAULT_DENSE_CAP: usize = 8192;

/// Dense LU with partial pivoting; refuses systems above
/// [`DEFAULT_DENSE_CAP`] unknowns.
pub fn dense_direct<T: Real>(a: &SparseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    dense_direct_capped(a, b, DEFAULT_DENSE_CAP)
}

pub fn dense_direct_capped<T: Real>(a: &SparseMatrix<T>, b: &[T], cap: usize) -> Result<Vec<T>> {
    let n = a.dim();
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    if b.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: b.len(),
        });
    }
    // Row-major dense copy; `hi[i]` is one past the last nonzero column of row i,
    // which lets elimination skip the empty tail of sparse rows.
    let mut m = vec![T::zero(); n * n];
    let mut hi = vec![0usize; n];
    for i in 0..n {
        for (j, v) in a.row(i) {
            m[i * n + j] = v;
            hi[i] = hi[i].max(j + 1);
        }
    }
    let mut rhs = b.to_vec();
    let scale = a.max_abs();
    let tiny = scale * T::eps() * T::lit(n.max(1) as f64);
    for k in 0..n {
        let mut p = k;
        let mut best = m[k * n + k].abs();
        for i in k + 1..n {
            let v = m[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= tiny || !best.is_finite() {
            return Err(Error::Singular(k));
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            rhs.swap(k, p);
            hi.swap(k, p);
        }
        let pivot = m[k * n + k];
        let end = hi[k];
        let (top, bottom) = m.split_at_mut((k + 1) * n);
        let row_k = &top[k * n..(k + 1) * n];
        for i in k + 1..n {
            let row_i = &mut bottom[(i - k - 1) * n..(i - k) * n];
            let f = row_i[k];
            if f == T::zero() {
                continue;
            }
            let f = f / pivot;
            row_i[k] = T::zero();
            for j in k + 1..end {
                row_i[j] -= f * row_k[j];
            }
            rhs[i] = rhs[i] - f * rhs[k];
            hi[i] = hi[i].max(end);
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..hi[i].max(i + 1) {
            acc -= m[i * n + j] * x[j];
        }
        x[i] = acc / m[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_system_needs_pivoting() {
        let a = SparseMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 1.0]]);
        let x: Vec<f64> = dense_direct(&a, &[2.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(dense_direct(&a, &[1.0, 1.0]), Err(Error::Singular(1))));
    }

    #[test]
    fn cap_is_enforced() {
        let a = SparseMatrix::<f64>::identity(5);
        assert!(matches!(
            dense_direct_capped(&a, &[1.0; 5], 4),
            Err(Error::TooLarge { size: 5, cap: 4 })
        ));
    }
}
