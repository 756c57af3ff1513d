//! Weighted regular expressions over a semiring and their Glushkov
//! automata, in both directions.
//!
//! * [`glushkov::build_wfa`] turns a proper K-expression into its Glushkov
//!   WFA.
//! * [`orbit::recover_expression`] decides whether a WFA is the Glushkov
//!   automaton of an expression in star normal form and, if so, returns
//!   an equivalent expression.
//!
//! Four semirings are provided: booleans, naturals, the tropical
//! semiring `(ℕ ∪ {∞}, min, +)` and exact rationals.

pub mod cli;
pub mod dynamic;
pub mod error;
pub mod expr;
pub mod glushkov;
pub mod graph;
pub mod orbit;
pub mod reduce;
pub mod semiring;
pub mod series;
pub mod wfa;

pub use dynamic::{AnyExpr, AnyWfa};
pub use error::{ExprError, ParseError, RejectReason, Rejection, SchemaError, SemiringError};
pub use expr::{parse_expr, render_expr, KExpr};
pub use glushkov::{build_wfa, wfa_to_kgraph};
pub use graph::KGraph;
pub use orbit::{recover_expression, Recovery};
pub use reduce::{reduce_acyclic, ScanOrder};
pub use semiring::{Boolean, Natural, Rational, Semiring, SemiringKind, Side, Tropical};
pub use wfa::Wfa;
