use std::io::Write;

use super::forest::{CellKind, Forest};
use crate::Real;

/// Diagnostic text dump, one cell per line in tree order:
///
/// ```text
/// <kind> <root> <level> <k0> [<k1> [<k2>]] <value>
/// ```
///
/// `kind` is `leaf`, `inner` or `phantom`; `k` is the index inside the root.
pub fn write_forest_dump<T: Real, W: Write>(forest: &Forest<T>, out: &mut W) -> std::io::Result<()> {
    let geom = forest.geometry();
    let nchild = geom.children_count();
    let mut stack = Vec::new();
    for r in 0..geom.root_count() {
        stack.push(geom.root_cell(r));
        while let Some(c) = stack.pop() {
            let Some(rec) = forest.get(&c) else { continue };
            let kind = match rec.kind {
                CellKind::Leaf => "leaf",
                CellKind::Inner => "inner",
                CellKind::Phantom => "phantom",
            };
            write!(out, "{kind} {} {}", geom.root_of(&c), c.level)?;
            let k = geom.local_index(&c);
            for ka in k.iter().take(geom.dims()) {
                write!(out, " {ka}")?;
            }
            writeln!(out, " {:.16e}", rec.value)?;
            if rec.kind != CellKind::Phantom && c.level < geom.max_level() {
                for i in (0..nchild).rev() {
                    stack.push(c.child(i));
                }
            }
        }
    }
    Ok(())
}
