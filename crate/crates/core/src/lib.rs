//! Ordinal diagrams: terms, a decidable well-ordering on them, stage
//! provisos, the pi-substitution embedding, and an exhaustive verifier.

pub mod cli;
pub mod harness;
pub mod order;
pub mod subst;
pub mod term;
pub mod wf;

pub use order::{compare, OrderError};
pub use term::{normalize, parse, render, SystemFlavor, Term};
