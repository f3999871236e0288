//! LTL formulas as a hash-consed DAG: construction, metrics, hierarchy
//! classification, exact evaluation and text syntax.

mod classify;
mod eval;
pub(crate) mod metrics;
mod simplify;
mod store;
mod text;

pub use classify::HierarchyClass;
pub use eval::{cycle_chunks, word_of_index, Program, LANES};
pub use metrics::{LetterCost, Metrics};
pub use store::{FormulaId, FormulaStore, Node, NodeKind};
