//! Dual-graph calculus for the blow-analytic classification of embedded
//! real plane-curve germs.
//!
//! A good resolution of a germ is summarised by its dual graph: a tree of
//! exceptional curves weighted by self-intersection parity, with the
//! strict-transform branches attached. This crate provides the mod-2
//! intersection invariants of such graphs, the blow-up/blow-down rewrite
//! moves, reduction to standard form, bounded equivalence search,
//! enumeration and classification of standard forms, the counting formulas
//! for three branches, and chord diagrams.

pub mod chords;
pub mod enumerate;
pub mod formulas;
pub mod gf2;
pub mod graph;
pub mod invariants;
pub mod moves;
pub mod random;
pub mod search;
pub mod text;

pub use graph::{DualGraph, GraphError, Parity, SubgraphForest, VertexClass, Violation};
pub use moves::{Move, MoveError, MoveTrace};
