//! Classical resolution: propositional batch saturation over positional
//! clauses, and a first-order given-clause prover used as a reference.

mod fol;
mod prop;

pub use fol::{
    binary_resolvents, factors, refute_fol, rename_apart, resolve_fol, subsumes, unify, unify_terms, DerivedClause, FolBudget, FolProof, Inference,
    Substitution,
};
pub use prop::{resolve_pair, round_resolvents, saturate, Budget, ProofResult, ProofStats, ResolventKind, ResolventOutcome, TraceStep, Verdict};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("clauses range over different vocabularies ({left} vs {right} variables)")]
    VocabularyMismatch { left: usize, right: usize },
}
