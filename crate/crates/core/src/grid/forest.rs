use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use super::cell::{CellId, Geometry, Neighbor};
use super::leaves::LeafMap;
use crate::error::{Error, Result};
use crate::mra::PredictionScheme;
use crate::Real;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum CellKind {
    /// Unknown of the adapted grid.
    Leaf,
    /// Ancestor of leaves; its value is the projection of its children.
    Inner,
    /// Ghost child of a leaf; its value is predicted from coarser data.
    Phantom,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellRecord<T> {
    pub kind: CellKind,
    pub value: T,
}

/// Graded trees over the root grid.
///
/// Grading rule: every inner cell has all of its same-level neighbors
/// (faces and corners) in the tree, and so does every leaf touching a finer
/// leaf. The first part keeps adjacent leaves within one level of each other
/// and makes every prediction stencil of the transform available; the second
/// makes the prediction stencil of every phantom available.
#[derive(Clone, Debug)]
pub struct Forest<T> {
    geom: Geometry<T>,
    cells: FxHashMap<CellId, CellRecord<T>>,
    prediction: PredictionScheme<T>,
}

impl<T: Real> Forest<T> {
    /// Forest made of the root cells only.
    pub fn new(geom: Geometry<T>) -> Self {
        let mut cells = FxHashMap::default();
        for r in 0..geom.root_count() {
            cells.insert(
                geom.root_cell(r),
                CellRecord {
                    kind: CellKind::Leaf,
                    value: T::zero(),
                },
            );
        }
        Self {
            geom,
            cells,
            prediction: PredictionScheme::third_order(),
        }
    }

    /// Full tree whose leaves are the uniform grid at `level`.
    pub fn uniform(geom: Geometry<T>, level: u8) -> Result<Self> {
        if level > geom.max_level() {
            return Err(Error::Invalid(format!(
                "level {level} beyond max level {}",
                geom.max_level()
            )));
        }
        let mut f = Self::new(geom);
        for l in 0..level {
            for i in 0..f.geom.cells_at(l) {
                let c = f.geom.cell_at(l, i);
                f.refine(&c)?;
            }
        }
        Ok(f)
    }

    pub fn geometry(&self) -> &Geometry<T> {
        &self.geom
    }

    pub fn prediction(&self) -> &PredictionScheme<T> {
        &self.prediction
    }

    pub fn dims(&self) -> usize {
        self.geom.dims()
    }

    pub fn max_level(&self) -> u8 {
        self.geom.max_level()
    }

    pub fn get(&self, c: &CellId) -> Option<&CellRecord<T>> {
        self.cells.get(c)
    }

    pub fn kind(&self, c: &CellId) -> Option<CellKind> {
        self.cells.get(c).map(|r| r.kind)
    }

    /// Leaf or inner cell (phantoms are not part of the tree proper).
    pub fn in_tree(&self, c: &CellId) -> bool {
        matches!(self.kind(c), Some(CellKind::Leaf | CellKind::Inner))
    }

    pub fn is_leaf(&self, c: &CellId) -> bool {
        self.kind(c) == Some(CellKind::Leaf)
    }

    /// Number of records, phantoms included.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.values().filter(|r| r.kind == kind).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.count(CellKind::Leaf)
    }

    pub fn phantom_count(&self) -> usize {
        self.count(CellKind::Phantom)
    }

    /// Finest level holding a leaf.
    pub fn finest_leaf_level(&self) -> u8 {
        self.cells
            .iter()
            .filter(|(_, r)| r.kind == CellKind::Leaf)
            .map(|(c, _)| c.level)
            .max()
            .unwrap_or(0)
    }

    /// All records sorted by cell id. Deterministic.
    pub fn cells_sorted(&self) -> Vec<(CellId, CellRecord<T>)> {
        let mut v: Vec<_> = self.cells.iter().map(|(c, r)| (*c, *r)).collect();
        v.sort_unstable_by_key(|(c, _)| *c);
        v
    }

    pub(crate) fn cells_of_kind_sorted(&self, kind: CellKind) -> Vec<CellId> {
        let mut v: Vec<_> = self
            .cells
            .iter()
            .filter(|(_, r)| r.kind == kind)
            .map(|(c, _)| *c)
            .collect();
        v.sort_unstable();
        v
    }

    /// Splits leaf `c` into its children. The children inherit the parent
    /// value until the next [`Forest::sync`] or value assignment.
    pub fn refine(&mut self, c: &CellId) -> Result<()> {
        let value = match self.cells.get(c) {
            Some(r) if r.kind == CellKind::Leaf => r.value,
            Some(_) => return Err(Error::Invalid(format!("refining non-leaf cell {c}"))),
            None => return Err(Error::OutOfDomain(*c)),
        };
        let children = self.geom.children(c)?;
        self.cells.get_mut(c).unwrap().kind = CellKind::Inner;
        for ch in children {
            self.cells.insert(
                ch,
                CellRecord {
                    kind: CellKind::Leaf,
                    value,
                },
            );
        }
        Ok(())
    }

    /// Nearest leaf or inner cell among `c` and its ancestors.
    pub fn covering(&self, c: &CellId) -> Option<(CellId, CellKind)> {
        let mut cur = *c;
        loop {
            if let Some(r) = self.cells.get(&cur) {
                if r.kind != CellKind::Phantom {
                    return Some((cur, r.kind));
                }
            }
            cur = cur.parent()?;
        }
    }

    /// Refines leaves until `target` is in the tree; newly refined cells are
    /// appended to `refined`.
    fn make_present(&mut self, target: &CellId, refined: &mut Vec<CellId>) -> Result<()> {
        loop {
            match self.covering(target) {
                Some((c, _)) if c == *target => return Ok(()),
                Some((c, CellKind::Leaf)) => {
                    self.refine(&c)?;
                    refined.push(c);
                }
                Some((c, _)) => {
                    return Err(Error::Invalid(format!(
                        "inner cell {c} is missing children"
                    )))
                }
                None => return Err(Error::OutOfDomain(*target)),
            }
        }
    }

    fn has_inner_neighbor(&self, c: &CellId) -> bool {
        self.geom
            .neighborhood(c)
            .iter()
            .any(|n| n != c && self.kind(n) == Some(CellKind::Inner))
    }

    fn needs_full_neighborhood(&self, c: &CellId) -> bool {
        match self.kind(c) {
            Some(CellKind::Inner) => true,
            Some(CellKind::Leaf) => self.has_inner_neighbor(c),
            _ => false,
        }
    }

    /// Refines the minimal set of leaves needed to satisfy the grading rule.
    /// Returns the number of refinements performed (zero on a graded forest).
    pub fn ensure_graded(&mut self) -> Result<usize> {
        let mut queue: VecDeque<CellId> = self
            .cells
            .iter()
            .filter(|(_, r)| r.kind != CellKind::Phantom)
            .map(|(c, _)| *c)
            .collect::<Vec<_>>()
            .into();
        queue.make_contiguous().sort_unstable();
        let mut queued: FxHashSet<CellId> = queue.iter().copied().collect();
        let mut refinements = 0;
        let mut refined = Vec::new();
        while let Some(c) = queue.pop_front() {
            queued.remove(&c);
            if !self.needs_full_neighborhood(&c) {
                continue;
            }
            refined.clear();
            for n in self.geom.neighborhood(&c) {
                self.make_present(&n, &mut refined)?;
            }
            refinements += refined.len();
            for r in refined.drain(..) {
                let mut touched = self.geom.neighborhood(&r);
                touched.extend(self.geom.children(&r)?);
                for t in touched {
                    if self.in_tree(&t) && queued.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
        }
        Ok(refinements)
    }

    /// First cell breaking the grading rule or the tree structure, if any.
    pub fn grading_violation(&self) -> Option<CellId> {
        for (c, cell) in self.cells_sorted() {
            match cell.kind {
                CellKind::Inner => {
                    let children = self.geom.children(&c).ok()?;
                    if children.iter().any(|ch| !self.in_tree(ch)) {
                        return Some(c);
                    }
                }
                CellKind::Phantom => {
                    if c.parent().map(|p| self.is_leaf(&p)) != Some(true) {
                        return Some(c);
                    }
                    continue;
                }
                CellKind::Leaf => {}
            }
            if let Some(p) = c.parent() {
                if self.kind(&p) != Some(CellKind::Inner) {
                    return Some(c);
                }
            }
            if self.needs_full_neighborhood(&c)
                && self
                    .geom
                    .neighborhood(&c)
                    .iter()
                    .any(|n| !self.in_tree(n))
            {
                return Some(c);
            }
        }
        None
    }

    pub fn is_graded(&self) -> bool {
        self.grading_violation().is_none()
    }

    /// Drops every phantom record.
    pub fn remove_phantoms(&mut self) {
        self.cells.retain(|_, r| r.kind != CellKind::Phantom);
    }

    /// Materializes the phantoms needed by same-level flux stencils reaching
    /// `radius` cells along each axis from every leaf. Existing phantoms are
    /// rebuilt; returns the number of phantoms present afterwards.
    pub fn insert_phantoms(&mut self, radius: u32) -> usize {
        self.remove_phantoms();
        let leaves = self.cells_of_kind_sorted(CellKind::Leaf);
        let mut phantoms = Vec::new();
        for leaf in &leaves {
            for axis in 0..self.dims() {
                for step in 1..=radius as i64 {
                    for delta in [-step, step] {
                        let Neighbor::Cell(n) = self.geom.offset(leaf, axis, delta) else {
                            continue;
                        };
                        if self.cells.contains_key(&n) {
                            continue;
                        }
                        if let Some(p) = n.parent() {
                            if self.is_leaf(&p) {
                                phantoms.push(n);
                            }
                        }
                    }
                }
            }
        }
        for p in phantoms {
            let value = self.cells[&p.parent().unwrap()].value;
            self.cells.entry(p).or_insert(CellRecord {
                kind: CellKind::Phantom,
                value,
            });
        }
        self.phantom_count()
    }

    /// Assigns leaf values from a vector ordered by `leaves`.
    pub fn set_leaf_values(&mut self, leaves: &LeafMap, values: &[T]) -> Result<()> {
        if values.len() != leaves.len() {
            return Err(Error::SizeMismatch {
                expected: leaves.len(),
                got: values.len(),
            });
        }
        for (c, &v) in leaves.cells().iter().zip(values) {
            match self.cells.get_mut(c) {
                Some(r) if r.kind == CellKind::Leaf => r.value = v,
                _ => return Err(Error::Unresolved(*c)),
            }
        }
        Ok(())
    }

    pub fn leaf_values(&self, leaves: &LeafMap) -> Vec<T> {
        leaves.cells().iter().map(|c| self.cells[c].value).collect()
    }

    /// Recomputes inner values by projection and phantom values by prediction.
    pub fn sync(&mut self) -> Result<()> {
        let mut inner = self.cells_of_kind_sorted(CellKind::Inner);
        inner.sort_by_key(|c| std::cmp::Reverse(c.level));
        let nchild = self.geom.children_count();
        let scale = T::one() / T::lit(nchild as f64);
        for c in inner {
            let mut acc = T::zero();
            for i in 0..nchild {
                acc += self.cells[&c.child(i)].value;
            }
            self.cells.get_mut(&c).unwrap().value = acc * scale;
        }
        let phantoms = self.cells_of_kind_sorted(CellKind::Phantom);
        let mut predicted = Vec::with_capacity(phantoms.len());
        for p in &phantoms {
            predicted.push(self.predicted_value(p, 0)?);
        }
        for (p, v) in phantoms.iter().zip(predicted) {
            self.cells.get_mut(p).unwrap().value = v;
        }
        Ok(())
    }

    /// Value of any cell in the domain: stored value for leaves and inner
    /// cells, prediction from coarser data otherwise. Inner values are only
    /// meaningful after [`Forest::sync`].
    pub fn value_of(&self, c: &CellId) -> Result<T> {
        match self.cells.get(c) {
            Some(r) if r.kind != CellKind::Phantom => Ok(r.value),
            _ => self.predicted_value(c, 0),
        }
    }

    fn predicted_value(&self, c: &CellId, depth: usize) -> Result<T> {
        if depth > c.level as usize {
            return Err(Error::Unresolved(*c));
        }
        let mut stencil = Vec::with_capacity(27);
        self.prediction.stencil_into(&self.geom, c, &mut stencil);
        let mut acc = T::zero();
        for (s, w) in stencil {
            let v = match self.cells.get(&s) {
                Some(r) if r.kind != CellKind::Phantom => r.value,
                _ => self.predicted_value(&s, depth + 1)?,
            };
            acc += w * v;
        }
        Ok(acc)
    }

    /// Sum of leaf measures; equals the domain measure for a valid forest.
    pub fn leaf_measure_sum(&self) -> T {
        self.cells
            .iter()
            .filter(|(_, r)| r.kind == CellKind::Leaf)
            .map(|(c, _)| self.geom.measure(c.level))
            .sum()
    }
}
