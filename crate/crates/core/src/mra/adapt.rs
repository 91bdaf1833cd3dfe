use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::grid::{enumerate_leaves, CellId, CellKind, Forest, Geometry, LeafMap};
use crate::Real;

use super::threshold::ThresholdSpec;

/// Field values on every tree cell of a forest, inner cells by projection.
struct FieldTree<'a, T> {
    forest: &'a Forest<T>,
    values: FxHashMap<CellId, T>,
}

impl<'a, T: Real> FieldTree<'a, T> {
    fn new(forest: &'a Forest<T>, leaves: &LeafMap, field: &[T]) -> Result<Self> {
        if field.len() != leaves.len() {
            return Err(Error::SizeMismatch {
                expected: leaves.len(),
                got: field.len(),
            });
        }
        let mut values: FxHashMap<CellId, T> = leaves
            .cells()
            .iter()
            .copied()
            .zip(field.iter().copied())
            .collect();
        let mut inner: Vec<CellId> = forest
            .cells_sorted()
            .into_iter()
            .filter(|(_, r)| r.kind == CellKind::Inner)
            .map(|(c, _)| c)
            .collect();
        inner.sort_by_key(|c| std::cmp::Reverse(c.level));
        let nc = forest.geometry().children_count();
        let inv = T::one() / T::lit(nc as f64);
        for c in inner {
            let v = (0..nc).map(|i| values[&c.child(i)]).sum::<T>() * inv;
            values.insert(c, v);
        }
        Ok(Self { forest, values })
    }

    fn value(&self, c: &CellId) -> T {
        if let Some(v) = self.values.get(c) {
            return *v;
        }
        let mut stencil = Vec::with_capacity(27);
        self.forest
            .prediction()
            .stencil_into(self.forest.geometry(), c, &mut stencil);
        stencil.iter().map(|(s, w)| *w * self.value(s)).sum()
    }
}

/// Details of the children of every inner cell of a forest.
#[derive(Clone, Debug)]
pub struct ForestDetails<T> {
    /// `(parent, details of its 2^d children)` in cell order.
    pub groups: Vec<(CellId, Vec<T>)>,
}

/// Multi-scale decomposition of a leaf field on an arbitrary graded forest:
/// each inner cell carries the details of its children.
pub fn encode_forest<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    field: &[T],
) -> Result<ForestDetails<T>> {
    let tree = FieldTree::new(forest, leaves, field)?;
    Ok(details_of(&tree))
}

fn details_of<T: Real>(tree: &FieldTree<'_, T>) -> ForestDetails<T> {
    let forest = tree.forest;
    let geom = forest.geometry();
    let nc = geom.children_count();
    let mut groups = Vec::new();
    let mut stencil = Vec::with_capacity(27);
    for (p, rec) in forest.cells_sorted() {
        if rec.kind != CellKind::Inner {
            continue;
        }
        let mut d = Vec::with_capacity(nc);
        for i in 0..nc {
            let child = p.child(i);
            stencil.clear();
            forest.prediction().stencil_into(geom, &child, &mut stencil);
            let pred: T = stencil
                .iter()
                .map(|(s, w)| *w * tree.value(s))
                .sum();
            d.push(tree.values[&child] - pred);
        }
        groups.push((p, d));
    }
    ForestDetails { groups }
}

/// Result of [`adapt`]: the new forest, its leaf numbering and every input
/// field transferred onto the new leaves.
#[derive(Clone, Debug)]
pub struct Adapted<T> {
    pub forest: Forest<T>,
    pub leaves: LeafMap,
    pub fields: Vec<Vec<T>>,
}

impl<T: Real> Adapted<T> {
    /// Leaves as a percentage of the uniform grid at the maximum level.
    pub fn compression_percent(&self) -> f64 {
        let g = self.forest.geometry();
        100.0 * self.leaves.len() as f64 / g.cells_at(g.max_level()) as f64
    }
}

/// Builds a new graded forest from the significant details of `fields`.
///
/// A parent keeps its children when one of its first `2^d - 1` child details
/// satisfies `|d| >= eps_j * max|f|` for some field (thresholds are relative
/// to each field's maximum magnitude). The kept set is closed under
/// ancestors, graded, and given phantoms. Field values are transferred by
/// projection where the new leaf exists in the source tree and by prediction
/// otherwise.
pub fn adapt<T: Real>(
    forest: &Forest<T>,
    leaves: &LeafMap,
    fields: &[Vec<T>],
    spec: &ThresholdSpec<T>,
) -> Result<Adapted<T>> {
    if fields.is_empty() {
        return Err(Error::Invalid("adapt needs at least one field".into()));
    }
    let geom = forest.geometry().clone();
    let nc = geom.children_count();
    let trees = fields
        .iter()
        .map(|f| FieldTree::new(forest, leaves, f))
        .collect::<Result<Vec<_>>>()?;

    let mut significant: FxHashSet<CellId> = FxHashSet::default();
    for (tree, field) in trees.iter().zip(fields) {
        let mut scale = field.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if scale == T::zero() {
            scale = T::one();
        }
        for (p, d) in details_of(tree).groups {
            let eps = spec.epsilon(p.level + 1) * scale;
            if d[..nc - 1].iter().any(|v| v.abs() >= eps) {
                significant.insert(p);
            }
        }
    }

    let mut refine: FxHashSet<CellId> = FxHashSet::default();
    for c in &significant {
        let mut cur = Some(*c);
        while let Some(x) = cur {
            if !refine.insert(x) {
                break;
            }
            cur = x.parent();
        }
    }
    let mut order: Vec<CellId> = refine.into_iter().collect();
    order.sort_unstable_by_key(|c| (c.level, *c));

    let mut out = Forest::new(geom);
    for c in &order {
        out.refine(c)?;
    }
    out.ensure_graded()?;
    out.insert_phantoms(1);
    let new_leaves = enumerate_leaves(&out);
    let new_fields: Vec<Vec<T>> = trees
        .iter()
        .map(|t| {
            new_leaves
                .cells()
                .iter()
                .map(|c| t.value(c))
                .collect()
        })
        .collect();
    out.set_leaf_values(&new_leaves, &new_fields[0])?;
    out.sync()?;
    Ok(Adapted {
        forest: out,
        leaves: new_leaves,
        fields: new_fields,
    })
}

/// [`adapt`] starting from fields given on the uniform grid at the maximum
/// level (lexicographic order).
pub fn adapt_uniform<T: Real>(
    geom: &Geometry<T>,
    fields: &[Vec<T>],
    spec: &ThresholdSpec<T>,
) -> Result<Adapted<T>> {
    let top = geom.max_level();
    let full = Forest::uniform(geom.clone(), top)?;
    let leaves = enumerate_leaves(&full);
    let mut on_leaves = Vec::with_capacity(fields.len());
    for f in fields {
        if f.len() != geom.cells_at(top) {
            return Err(Error::SizeMismatch {
                expected: geom.cells_at(top),
                got: f.len(),
            });
        }
        on_leaves.push(
            leaves
                .cells()
                .iter()
                .map(|c| f[geom.linear_index(c)])
                .collect::<Vec<_>>(),
        );
    }
    adapt(&full, &leaves, &on_leaves, spec)
}
