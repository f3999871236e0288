//! Translation of counter-free deterministic omega-automata into LTL through
//! reset cascades, with exact lasso semantics and a unary-alphabet toolkit.
//!
//! The pipeline is `automata` → `cascade` (holonomy decomposition and
//! acceptance lifting) → `reach` (reachability formulas) → `translate`.
//! `verify` holds the independent oracles used to test every stage.

pub mod alphabet;
pub mod automata;
pub mod cascade;
mod error;
pub mod ltl;
pub mod reach;
pub mod translate;
pub mod unary;
pub mod verify;

pub use alphabet::{ApSet, Lasso, Letter};
pub use automata::{AcceptanceCondition, OmegaAutomaton, Semiautomaton, StateSet};
pub use cascade::{Action, CascadeAutomaton, Configuration, Homomorphism, ResetCascade};
pub use error::{Error, Result};
pub use ltl::{FormulaId, FormulaStore, HierarchyClass, Metrics, Node};
pub use translate::{translate, Fragment, TranslateOptions, TranslationResult};
