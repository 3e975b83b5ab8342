//! Gate IR and two interchangeable simulators.
//!
//! `StateVector` is a plain dense amplitude array, capped by the
//! `QATP_MAX_QUBITS` environment variable (default 26).  `SparseState` keeps
//! only nonzero amplitudes and handles the wide-but-shallow-support circuits
//! built by the resolution and polynomial pipelines (up to 256 qubits).
//! Qubit `q` is bit `q` of the basis index (little-endian registers).

mod circuit;
mod dense;
mod emulate;
mod key;
mod sparse;
mod state;

use std::f64::consts::PI;

pub use circuit::{depth_of, Call, Circuit, Control, FlatOp, Gate, GateKind, Op, QueryCounter, Register};
pub use dense::StateVector;
pub use emulate::{emulate_basis, eval_basis, eval_basis_flat};
pub use key::{BasisKey, MAX_KEY_QUBITS};
pub use num_complex::Complex64;
pub use sparse::SparseState;
pub use state::{Backend, Measurement, State};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QsimError {
    #[error("circuit needs {qubits} qubits, simulator cap is {cap}")]
    Capacity { qubits: usize, cap: usize },
    #[error("sparse state grew to {entries} amplitudes (cap {cap})")]
    AmplitudeCap { entries: usize, cap: usize },
    #[error("qubit {qubit} out of range for {n}-qubit state")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
}

pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Dense qubit cap from `QATP_MAX_QUBITS`.
pub fn max_dense_qubits() -> usize {
    std::env::var("QATP_MAX_QUBITS").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_QUBITS)
}

/// Sparse amplitude cap from `QATP_MAX_AMPLITUDES` (default 2^23).
pub fn max_sparse_amplitudes() -> usize {
    std::env::var("QATP_MAX_AMPLITUDES").ok().and_then(|v| v.parse().ok()).unwrap_or(1 << 23)
}

/// Apply one gate, returning the new state.
pub fn apply(mut state: State, gate: &Gate) -> Result<State, QsimError> {
    state.apply(gate)?;
    Ok(state)
}

/// Append the QFT on `qubits` (qubits[0] least significant):
/// |x⟩ ↦ 2^{-a/2} Σ_k e^{2πi·xk/2^a} |k⟩, including the final bit reversal.
pub fn append_qft(c: &mut Circuit, qubits: &[usize]) {
    let a = qubits.len();
    for i in (0..a).rev() {
        c.h(qubits[i]);
        for j in (0..i).rev() {
            c.cphase(vec![Control::on(qubits[j])], qubits[i], PI / (1u64 << (i - j)) as f64);
        }
    }
    for k in 0..a / 2 {
        c.swap(qubits[k], qubits[a - 1 - k]);
    }
}

pub fn append_iqft(c: &mut Circuit, qubits: &[usize]) {
    let mut f = Circuit::new(c.num_qubits);
    append_qft(&mut f, qubits);
    c.append(&f.inverse());
}

/// In the Fourier basis of `qubits` (width a), add `value` mod 2^a, gated by
/// `controls`.  `value` is given as residue in [0, 2^a).
pub fn append_fourier_add(c: &mut Circuit, qubits: &[usize], value: u128, controls: &[Control]) {
    let a = qubits.len();
    assert!(a <= 100);
    let modulus = 1u128 << a;
    let v = value % modulus;
    if v == 0 {
        return;
    }
    for (b, &q) in qubits.iter().enumerate() {
        let r = (v << b) % modulus;
        if r == 0 {
            continue;
        }
        let theta = 2.0 * PI * (r as f64) / (modulus as f64);
        c.cphase(controls.to_vec(), q, theta);
    }
}

/// QFT of a register of an existing state.
pub fn qft(state: State, register: &Register) -> Result<State, QsimError> {
    if register.start + register.len > state.num_qubits() {
        return Err(QsimError::QubitOutOfRange { qubit: register.start + register.len - 1, n: state.num_qubits() });
    }
    let mut c = Circuit::new(state.num_qubits());
    append_qft(&mut c, &register.qubits());
    let mut s = state;
    s.run(&c, &mut QueryCounter::default())?;
    Ok(s)
}

/// Measure a register; returns the outcome and the collapsed state.
pub fn measure(mut state: State, register: &Register, rng: &mut impl rand::Rng) -> (Measurement, State) {
    let m = state.measure(&register.qubits(), rng);
    (m, state)
}

/// Run `c` on the basis input `key` and return the (unique) output key;
/// None if the circuit does not map this input to a basis state.
pub fn run_basis(c: &Circuit, key: BasisKey, counter: &mut QueryCounter) -> Result<Option<BasisKey>, QsimError> {
    let mut s = State::basis(c.num_qubits, key, Backend::Sparse)?;
    s.run(c, counter)?;
    Ok(s.as_basis())
}
