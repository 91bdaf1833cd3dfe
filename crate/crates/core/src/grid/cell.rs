use std::fmt;

use crate::error::{Error, Result};
use crate::Real;

pub const MAX_DIMS: usize = 3;

/// One dyadic cell.
///
/// `index` is the global position of the cell among all cells of its level,
/// counted across root trees, so that neighbors in adjacent roots are found by
/// plain index arithmetic. Unused axes (for `dims < 3`) stay at zero. The root
/// tree and the position inside it are recovered through [`Geometry`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CellId {
    pub level: u8,
    pub index: [u32; MAX_DIMS],
}

impl CellId {
    pub const fn new(level: u8, index: [u32; MAX_DIMS]) -> Self {
        Self { level, index }
    }

    pub fn parent(&self) -> Option<CellId> {
        if self.level == 0 {
            return None;
        }
        Some(CellId {
            level: self.level - 1,
            index: [self.index[0] >> 1, self.index[1] >> 1, self.index[2] >> 1],
        })
    }

    /// Child number `c`, whose bit `a` selects the upper half along axis `a`.
    pub fn child(&self, c: usize) -> CellId {
        let mut index = [0; MAX_DIMS];
        for (a, k) in index.iter_mut().enumerate() {
            *k = (self.index[a] << 1) | ((c >> a) & 1) as u32;
        }
        CellId { level: self.level + 1, index }
    }

    /// Position of this cell among its siblings, same encoding as [`CellId::child`].
    pub fn child_position(&self) -> usize {
        (0..MAX_DIMS).fold(0, |acc, a| acc | (((self.index[a] & 1) as usize) << a))
    }

    pub fn is_ancestor_of(&self, other: &CellId) -> bool {
        if other.level < self.level {
            return false;
        }
        let shift = other.level - self.level;
        (0..MAX_DIMS).all(|a| other.index[a] >> shift == self.index[a])
    }

    pub fn ancestor_at(&self, level: u8) -> CellId {
        debug_assert!(level <= self.level);
        let shift = self.level - level;
        CellId {
            level,
            index: [
                self.index[0] >> shift,
                self.index[1] >> shift,
                self.index[2] >> shift,
            ],
        }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(j={}, k=[{}, {}, {}])",
            self.level, self.index[0], self.index[1], self.index[2]
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn sign(self) -> i64 {
        match self {
            Side::Minus => -1,
            Side::Plus => 1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    pub fn slot(self) -> usize {
        match self {
            Side::Minus => 0,
            Side::Plus => 1,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Neighbor {
    Cell(CellId),
    Boundary,
}

/// Root grid layout of a box domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry<T> {
    dims: usize,
    roots: [u32; MAX_DIMS],
    lower: [T; MAX_DIMS],
    root_size: [T; MAX_DIMS],
    max_level: u8,
}

impl<T: Real> Geometry<T> {
    /// Box `[lower, upper]` split into `roots` root cells per axis, refinable
    /// down to `max_level`.
    pub fn new(
        dims: usize,
        roots: &[u32],
        lower: &[T],
        upper: &[T],
        max_level: u8,
    ) -> Result<Self> {
        if !(1..=MAX_DIMS).contains(&dims) {
            return Err(Error::Invalid(format!("dimension {dims} not in 1..=3")));
        }
        if roots.len() != dims || lower.len() != dims || upper.len() != dims {
            return Err(Error::Invalid(format!(
                "roots and bounds must have {dims} entries"
            )));
        }
        if max_level > 24 {
            return Err(Error::Invalid(format!("max level {max_level} too deep")));
        }
        let mut g = Geometry {
            dims,
            roots: [1; MAX_DIMS],
            lower: [T::zero(); MAX_DIMS],
            root_size: [T::one(); MAX_DIMS],
            max_level,
        };
        for a in 0..dims {
            if roots[a] == 0 {
                return Err(Error::Invalid("root count must be positive".into()));
            }
            if !(upper[a] > lower[a]) {
                return Err(Error::Invalid(format!("empty extent along axis {a}")));
            }
            g.roots[a] = roots[a];
            g.lower[a] = lower[a];
            g.root_size[a] = (upper[a] - lower[a]) / T::lit(roots[a] as f64);
        }
        Ok(g)
    }

    /// Unit cube `[0,1]^d` with one root.
    pub fn unit(dims: usize, max_level: u8) -> Result<Self> {
        let ones = vec![1; dims];
        Self::new(
            dims,
            &ones,
            &vec![T::zero(); dims],
            &vec![T::one(); dims],
            max_level,
        )
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn max_level(&self) -> u8 {
        self.max_level
    }

    pub fn roots(&self) -> &[u32] {
        &self.roots[..self.dims]
    }

    pub fn root_count(&self) -> usize {
        self.roots().iter().map(|&r| r as usize).product()
    }

    pub fn children_count(&self) -> usize {
        1 << self.dims
    }

    /// Number of cells along `axis` at `level`.
    pub fn extent(&self, level: u8, axis: usize) -> u32 {
        if axis >= self.dims {
            1
        } else {
            self.roots[axis] << level
        }
    }

    /// Total number of cells of the uniform grid at `level`.
    pub fn cells_at(&self, level: u8) -> usize {
        (0..self.dims)
            .map(|a| self.extent(level, a) as usize)
            .product()
    }

    pub fn width(&self, level: u8, axis: usize) -> T {
        self.root_size[axis] / T::lit((1u64 << level) as f64)
    }

    pub fn measure(&self, level: u8) -> T {
        (0..self.dims).fold(T::one(), |m, a| m * self.width(level, a))
    }

    pub fn domain_measure(&self) -> T {
        self.measure(0) * T::lit(self.root_count() as f64)
    }

    pub fn lower(&self, axis: usize) -> T {
        self.lower[axis]
    }

    pub fn upper(&self, axis: usize) -> T {
        self.lower[axis] + self.root_size[axis] * T::lit(self.roots[axis] as f64)
    }

    pub fn contains(&self, c: &CellId) -> bool {
        c.level <= self.max_level
            && (0..MAX_DIMS).all(|a| c.index[a] < self.extent(c.level, a))
    }

    pub fn center(&self, c: &CellId) -> [T; MAX_DIMS] {
        let mut x = [T::zero(); MAX_DIMS];
        for (a, xa) in x.iter_mut().enumerate().take(self.dims) {
            let h = self.width(c.level, a);
            *xa = self.lower[a] + h * (T::lit(c.index[a] as f64) + T::lit(0.5));
        }
        x
    }

    /// Center of the face of `c` on `side` of `axis`.
    pub fn face_center(&self, c: &CellId, axis: usize, side: Side) -> [T; MAX_DIMS] {
        let mut x = self.center(c);
        let half = self.width(c.level, axis) * T::lit(0.5);
        x[axis] = match side {
            Side::Minus => x[axis] - half,
            Side::Plus => x[axis] + half,
        };
        x
    }

    pub fn neighbor(&self, c: &CellId, axis: usize, side: Side) -> Neighbor {
        self.offset(c, axis, side.sign())
    }

    /// Same-level cell `delta` steps away along `axis`.
    pub fn offset(&self, c: &CellId, axis: usize, delta: i64) -> Neighbor {
        let k = c.index[axis] as i64 + delta;
        if k < 0 || k >= self.extent(c.level, axis) as i64 {
            return Neighbor::Boundary;
        }
        let mut n = *c;
        n.index[axis] = k as u32;
        Neighbor::Cell(n)
    }

    /// The `2^d` children of `c` in child-number order.
    pub fn children(&self, c: &CellId) -> Result<Vec<CellId>> {
        if c.level >= self.max_level {
            return Err(Error::LevelOverflow(*c));
        }
        Ok((0..self.children_count()).map(|i| c.child(i)).collect())
    }

    pub fn root_of(&self, c: &CellId) -> usize {
        let mut r = 0usize;
        for a in (0..self.dims).rev() {
            r = r * self.roots[a] as usize + (c.index[a] >> c.level) as usize;
        }
        r
    }

    pub fn local_index(&self, c: &CellId) -> [u32; MAX_DIMS] {
        let mask = (1u32 << c.level) - 1;
        [c.index[0] & mask, c.index[1] & mask, c.index[2] & mask]
    }

    /// Root cell number `r` (root-major order, axis 0 fastest).
    pub fn root_cell(&self, r: usize) -> CellId {
        let mut index = [0; MAX_DIMS];
        let mut rem = r;
        for (a, k) in index.iter_mut().enumerate().take(self.dims) {
            *k = (rem % self.roots[a] as usize) as u32;
            rem /= self.roots[a] as usize;
        }
        CellId { level: 0, index }
    }

    /// Lexicographic position of `c` in the uniform grid of its level.
    pub fn linear_index(&self, c: &CellId) -> usize {
        let mut i = 0usize;
        for a in (0..self.dims).rev() {
            i = i * self.extent(c.level, a) as usize + c.index[a] as usize;
        }
        i
    }

    pub fn cell_at(&self, level: u8, linear: usize) -> CellId {
        let mut index = [0; MAX_DIMS];
        let mut rem = linear;
        for (a, k) in index.iter_mut().enumerate().take(self.dims) {
            let n = self.extent(level, a) as usize;
            *k = (rem % n) as u32;
            rem /= n;
        }
        CellId { level, index }
    }

    /// All same-level cells within one step of `c` along every axis,
    /// diagonals included, clipped to the domain. `c` itself is included.
    pub fn neighborhood(&self, c: &CellId) -> Vec<CellId> {
        let mut out = Vec::with_capacity(27);
        let span = |a: usize| if a < self.dims { -1i64..=1 } else { 0..=0 };
        for dz in span(2) {
            for dy in span(1) {
                for dx in span(0) {
                    let d = [dx, dy, dz];
                    let mut n = *c;
                    let mut inside = true;
                    for a in 0..MAX_DIMS {
                        let k = c.index[a] as i64 + d[a];
                        if k < 0 || k >= self.extent(c.level, a) as i64 {
                            inside = false;
                            break;
                        }
                        n.index[a] = k as u32;
                    }
                    if inside {
                        out.push(n);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_1d_doubles_index() {
        let g = Geometry::<f64>::unit(1, 4).unwrap();
        let c = CellId::new(2, [3, 0, 0]);
        let ch = g.children(&c).unwrap();
        assert_eq!(ch, vec![CellId::new(3, [6, 0, 0]), CellId::new(3, [7, 0, 0])]);
    }

    #[test]
    fn children_2d_lexicographic() {
        let g = Geometry::<f64>::unit(2, 4).unwrap();
        let ch = g.children(&CellId::new(0, [0, 0, 0])).unwrap();
        assert_eq!(
            ch,
            vec![
                CellId::new(1, [0, 0, 0]),
                CellId::new(1, [1, 0, 0]),
                CellId::new(1, [0, 1, 0]),
                CellId::new(1, [1, 1, 0]),
            ]
        );
    }

    #[test]
    fn children_overflow_at_max_level() {
        let g = Geometry::<f64>::unit(1, 2).unwrap();
        assert!(matches!(
            g.children(&CellId::new(2, [0, 0, 0])),
            Err(Error::LevelOverflow(_))
        ));
    }

    #[test]
    fn parent_child_inverse() {
        let g = Geometry::<f64>::new(2, &[3, 2], &[0.0, 0.0], &[3.0, 2.0], 5).unwrap();
        for l in 0..4u8 {
            for i in 0..g.cells_at(l) {
                let c = g.cell_at(l, i);
                for ch in g.children(&c).unwrap() {
                    assert_eq!(ch.parent(), Some(c));
                }
                if let Some(p) = c.parent() {
                    assert!(g.children(&p).unwrap().contains(&c));
                }
            }
        }
    }

    #[test]
    fn neighbors_1d() {
        let g = Geometry::<f64>::unit(1, 2).unwrap();
        assert_eq!(
            g.neighbor(&CellId::new(2, [0, 0, 0]), 0, Side::Minus),
            Neighbor::Boundary
        );
        assert_eq!(
            g.neighbor(&CellId::new(2, [1, 0, 0]), 0, Side::Plus),
            Neighbor::Cell(CellId::new(2, [2, 0, 0]))
        );
    }

    #[test]
    fn neighbor_crosses_roots() {
        let g = Geometry::<f64>::new(2, &[2, 1], &[0.0, 0.0], &[2.0, 1.0], 3).unwrap();
        // last column of root (0,0) at level 2
        let c = CellId::new(2, [3, 1, 0]);
        assert_eq!(g.root_of(&c), 0);
        let Neighbor::Cell(n) = g.neighbor(&c, 0, Side::Plus) else {
            panic!("expected a cell")
        };
        assert_eq!(g.root_of(&n), 1);
        assert_eq!(g.local_index(&n), [0, 1, 0]);
    }

    #[test]
    fn linear_index_roundtrip() {
        let g = Geometry::<f64>::new(3, &[2, 3, 1], &[0.0; 3], &[2.0, 3.0, 1.0], 3).unwrap();
        for i in 0..g.cells_at(2) {
            assert_eq!(g.linear_index(&g.cell_at(2, i)), i);
        }
    }
}
