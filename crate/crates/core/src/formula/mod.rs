//! Formula front end: s-expression and DIMACS parsing, clause form,
//! Skolemization, and Herbrand grounding.

mod dimacs;
mod fol;
mod herbrand;
mod prop;
mod sexpr;

pub use dimacs::parse_dimacs;
pub use fol::{parse_fol, parse_fol_problem, skolemize, skolemize_all, Atom, FolClause, FolFormula, FolProblem, Literal, Term};
pub use herbrand::{
    ground, ground_capped, ground_instance_count, herbrand_universe, herbrand_universe_capped, propositionalize,
    DEFAULT_GROUND_CAP, INJECTED_CONSTANT,
};
pub use prop::{parse_prop, parse_prop_problem, to_cnf, Clause, ClauseSet, Polarity, PropFormula, PropProblem};
pub use sexpr::{parse_all as parse_sexprs, SExpr, Span};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown operator '{op}' at {line}:{col}")]
    UnknownOperator { op: String, line: usize, col: usize },
    #[error("{what}: {count} exceeds cap {cap}")]
    Budget { what: &'static str, count: usize, cap: usize },
    #[error("Herbrand universe is empty")]
    EmptyUniverse,
    #[error("no clauses given")]
    EmptyClauseList,
}
