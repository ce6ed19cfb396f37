//! Uniform generalized word problem for benign graphs of groups with free and
//! free-abelian vertex groups, decided by dual-automaton saturation.

pub mod brute;
pub mod cli;
pub mod dual_automaton;
pub mod free_oracle;
pub mod gog;
pub mod groups;
pub mod lattice;
pub mod oracle;
pub mod raag;
pub mod saturation;
pub mod spec;
pub mod words;

pub use dual_automaton::{DualAutomaton, VertexCoset};
pub use gog::{CycleTypeWord, GraphOfGroups};

pub use words::{SymbolTable, Word};
pub use saturation::{decide, Verdict};
