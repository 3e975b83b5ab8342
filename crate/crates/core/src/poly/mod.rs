//! Exact multivariate integer polynomials and Wu's method.
//!
//! Pseudo-division is fraction-free: each step computes
//! `lc(T,y)·S − lc(S,y)·T·y^(Ds−Dt)`, so coefficients stay in ℤ.  The prover
//! triangulates the hypotheses and then pseudo-divides the conclusion by the
//! chain, last dependent variable first; the theorem holds generically iff
//! the final remainder is the zero polynomial.

mod parse;
mod polynomial;
mod wu;

pub use parse::{parse_geo, parse_poly, parse_poly_file, GeoProblem, PolyFile};
pub use polynomial::{vars, Monomial, Polynomial, VariableId, Vars};
pub use wu::{prem, pseudo_step, reduce, triangulate, wu_prove, ChainElement, Prem, TriangularSystem, WuProof, WuStep, WuVerdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable orderings differ: [{left}] vs [{right}]")]
    OrderingMismatch { left: String, right: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate system: {0}")]
    Degenerate(String),
    #[error("no value for variable {0}")]
    MissingVariable(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}
