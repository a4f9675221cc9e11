//! LTL formulas over boolean propositions and numerical constraint atoms.

mod formula;
mod lasso;
mod nnf;
mod syntax;

pub use formula::{is_identifier, Atom, Formula, Node, Rel};
pub use lasso::{eval_on_lasso, eval_on_valued_lasso, EvalError, LassoTrace, State, ValuedLasso, ValuedState};
pub use nnf::{closure, is_nnf, to_nnf};
pub use syntax::{is_usable_name, parse_formula, render, Dialect, SyntaxError, RESERVED_WORDS};
