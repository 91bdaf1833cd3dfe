//! Dyadic cell addressing and graded-tree forests.

mod cell;
mod dump;
mod forest;
mod leaves;
mod resolve;

pub use cell::{CellId, Geometry, Neighbor, Side, MAX_DIMS};
pub use dump::write_forest_dump;
pub use forest::{CellKind, CellRecord, Forest};
pub use leaves::{enumerate_leaves, LeafMap};
pub use resolve::MAX_PHANTOM_DEPTH;
