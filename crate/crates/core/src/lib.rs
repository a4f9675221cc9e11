//! Consistency analysis for requirements written as property specification
//! patterns over boolean signals and numerical constraints.
//!
//! The pipeline is: parse `.req` sentences ([`psp`]), translate each to LTL
//! with `x < c` / `x = c` atoms, replace numerical atoms by region
//! propositions ([`abstraction`]), and decide the resulting propositional
//! LTL problem with a tableau engine ([`engine`]). The [`analyses`] module
//! builds consistency, minimal-inconsistent-subset, vacuity and connectivity
//! reports on top; [`emit`] writes the abstracted problem for external model
//! checkers.

pub mod abstraction;
pub mod analyses;
pub mod constant;
pub mod emit;
pub mod engine;
pub mod ltl;
pub mod psp;

pub use constant::Constant;
pub use ltl::{Atom, Formula, LassoTrace, Rel};
