use crate::Real;

use super::transform::MultiScale;

/// Level-dependent thresholds `eps_j = 2^(d (j - J) / 2) * eta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdSpec<T> {
    pub eta: T,
    pub dims: usize,
    pub max_level: u8,
}

impl<T: Real> ThresholdSpec<T> {
    pub fn new(eta: T, dims: usize, max_level: u8) -> Self {
        Self {
            eta,
            dims,
            max_level,
        }
    }

    pub fn epsilon(&self, level: u8) -> T {
        let expo = self.dims as f64 * (level as f64 - self.max_level as f64) / 2.0;
        T::lit(2f64.powf(expo)) * self.eta
    }
}

/// Stored detail slots that survived thresholding, per level (`kept[j - 1]`
/// for level `j`). Level 0 averages are always kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeptSet {
    pub kept: Vec<Vec<bool>>,
}

impl KeptSet {
    pub fn count(&self) -> usize {
        self.kept.iter().flatten().filter(|&&k| k).count()
    }

    /// Whether any stored detail of parent `p` (lexicographic at `level - 1`)
    /// is kept at `level`.
    pub fn parent_kept(&self, level: u8, p: usize, stored_per_parent: usize) -> bool {
        self.kept[level as usize - 1][p * stored_per_parent..(p + 1) * stored_per_parent]
            .iter()
            .any(|&k| k)
    }
}

/// Zeroes every stored detail with `|d| < eps_level` (absolute thresholds).
pub fn threshold<T: Real>(m: &MultiScale<T>, spec: &ThresholdSpec<T>) -> (MultiScale<T>, KeptSet) {
    let mut out = m.clone();
    let mut kept = Vec::with_capacity(m.details.len());
    for (j, d) in out.details.iter_mut().enumerate() {
        let eps = spec.epsilon(j as u8 + 1);
        let mut k = Vec::with_capacity(d.len());
        for v in d.iter_mut() {
            let keep = v.abs() >= eps;
            if !keep {
                *v = T::zero();
            }
            k.push(keep);
        }
        kept.push(k);
    }
    (out, KeptSet { kept })
}
