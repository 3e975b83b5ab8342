//! Quantum resolution: ququart clause encoding, the U_KB loader, the
//! parallel per-variable resolution U_R, the U_J validity counter, and the
//! amplified sample-and-insert saturation loop.

mod circuits;
mod round;

pub use circuits::{
    build_round_circuits, build_uj, build_ukb, build_ur, counter_width, decode_resolvent, encode_clause, index_width, ur_table, Decoded, Layout, QuquartWord,
};
pub use round::{quantum_prove, quantum_round, simulated_ukb_count, Engine, QResolutionParams, QuantumProof, Recovered, RoundReport};

use thiserror::Error;

use crate::amplify::AmplifyError;
use crate::qsim::QsimError;

#[derive(Debug, Error)]
pub enum QResolutionError {
    #[error("word {word} has {resolved} resolved entries, expected exactly one")]
    MalformedWord { word: String, resolved: usize },
    #[error("round needs {qubits} qubits, simulator supports {cap}")]
    Capacity { qubits: usize, cap: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Amplify(#[from] AmplifyError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}
