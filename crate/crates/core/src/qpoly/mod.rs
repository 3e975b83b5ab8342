//! Polynomials encoded as reversible circuits, and quantum pseudo-division.
//!
//! A `PolyCircuit` maps |x⟩|0⟩ → |x⟩|F(x) mod 2^w⟩; a `CoeffCircuit` maps
//! |d⟩|x⟩|0⟩ → |d⟩|x⟩|coeff_d(x)⟩ with respect to one eliminated variable.
//! All arithmetic is Fourier-basis accumulation: QFT the output register,
//! add constants with controlled phases, inverse QFT.  Remainder circuits
//! are composed from the coefficient circuits of dividend and divisor without
//! ever expanding the remainder's monomials.

mod arith;
mod kravchuk;
mod hybrid;
mod remainder;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::poly::PolyError;
use crate::qsim::{eval_basis_flat, BasisKey, Circuit, FlatOp, QsimError, QueryCounter, Register, MAX_KEY_QUBITS};

pub use arith::{append_add_register, append_mac, build_arith, build_arith_coeff, build_datadriven, u_add, u_mul, u_sub};
pub use kravchuk::{
    build_coeff_circuit, kravchuk, kravchuk_coefficients, kravchuk_reconstruct, kravchuk_to_monomial, kravchuk_weight, monomial_conversion,
};
pub use hybrid::{prove_geo_hybrid, CircuitStats, CoeffPath, HybridError, HybridParams, HybridProof};
pub use remainder::{build_remainder_circuit, reset_ancillas};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QpolyError {
    #[error("capacity: {0}")]
    Capacity(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("incompatible circuits: {0}")]
    Mismatch(String),
    #[error("bad input: {0}")]
    Input(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Register widths for circuit-encoded polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterSpec {
    /// Output width w; values live in ℤ/2^w (two's complement).
    pub word_bits: usize,
    /// Unsigned input width per variable.
    pub input_bits: Vec<usize>,
    /// Width of the exponent register |d⟩ of coefficient circuits.
    pub degree_bits: usize,
}

impl RegisterSpec {
    pub fn new(word_bits: usize, input_bits: Vec<usize>) -> Result<Self, QpolyError> {
        let s = RegisterSpec { word_bits, input_bits, degree_bits: 2 };
        s.validate()?;
        Ok(s)
    }

    pub fn uniform(word_bits: usize, num_vars: usize, bits: usize) -> Result<Self, QpolyError> {
        Self::new(word_bits, vec![bits; num_vars])
    }

    pub fn with_degree_bits(mut self, bits: usize) -> Result<Self, QpolyError> {
        self.degree_bits = bits;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), QpolyError> {
        if !(2..=64).contains(&self.word_bits) {
            return Err(QpolyError::Capacity(format!("word width {} outside 2..=64", self.word_bits)));
        }
        if self.degree_bits == 0 || self.input_bits.iter().any(|&b| b == 0 || b > 63) {
            return Err(QpolyError::Capacity("register widths must be 1..=63".into()));
        }
        Ok(())
    }
}

/// Common view of encoded polynomials for evaluation and search.
pub trait Encoded {
    fn circuit(&self) -> &Arc<Circuit>;
    /// Named basis inputs, in order.
    fn input_registers(&self) -> Vec<(String, Register)>;
    fn output(&self) -> &Register;
    fn ancilla_registers(&self) -> &[Register];
    fn word_bits(&self) -> usize;
}

/// U_F |x⟩|0⟩ = |x⟩|F(x) mod 2^w⟩.
#[derive(Clone, Debug)]
pub struct PolyCircuit {
    pub circuit: Arc<Circuit>,
    pub inputs: Vec<(String, Register)>,
    pub output: Register,
    pub ancillas: Vec<Register>,
    pub word_bits: usize,
    pub degree_bits: usize,
    pub meta: String,
}

impl Encoded for PolyCircuit {
    fn circuit(&self) -> &Arc<Circuit> {
        &self.circuit
    }
    fn input_registers(&self) -> Vec<(String, Register)> {
        self.inputs.clone()
    }
    fn output(&self) -> &Register {
        &self.output
    }
    fn ancilla_registers(&self) -> &[Register] {
        &self.ancillas
    }
    fn word_bits(&self) -> usize {
        self.word_bits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CoeffBasis {
    /// Output is `scale` times the coefficient of y^d.
    Monomial,
    /// Output is the unnormalized Kravchuk coefficient c_d.
    Kravchuk,
}

/// How a coefficient circuit was assembled; used for structural depth bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Composition {
    Leaf { depth: usize },
    Remainder { s_depth: usize, t_depth: usize, arith_depth: usize, depth: usize, s: Box<Composition>, t: Box<Composition> },
}

impl Composition {
    pub fn depth(&self) -> usize {
        match self {
            Composition::Leaf { depth } | Composition::Remainder { depth, .. } => *depth,
        }
    }
}

/// U_{S,y} |d⟩|x⟩|0⟩ = |d⟩|x⟩|coeff_d(x)⟩.
#[derive(Clone, Debug)]
pub struct CoeffCircuit {
    pub circuit: Arc<Circuit>,
    pub degree: Register,
    pub inputs: Vec<(String, Register)>,
    pub output: Register,
    pub ancillas: Vec<Register>,
    /// Appended by `reset_ancillas` to return every ancilla to |0⟩.
    pub uncompute: Arc<Circuit>,
    pub word_bits: usize,
    pub var: String,
    /// Largest exponent the circuit addresses meaningfully.
    pub degree_bound: usize,
    pub basis: CoeffBasis,
    pub scale: BigInt,
    pub node: Composition,
}

impl CoeffCircuit {
    pub fn is_clean(&self) -> bool {
        self.uncompute.ops.is_empty()
    }
}

impl Encoded for CoeffCircuit {
    fn circuit(&self) -> &Arc<Circuit> {
        &self.circuit
    }
    fn input_registers(&self) -> Vec<(String, Register)> {
        let mut v = vec![("d".to_string(), self.degree.clone())];
        v.extend(self.inputs.iter().cloned());
        v
    }
    fn output(&self) -> &Register {
        &self.output
    }
    fn ancilla_registers(&self) -> &[Register] {
        &self.ancillas
    }
    fn word_bits(&self) -> usize {
        self.word_bits
    }
}

/// Reduce an integer into [0, 2^w).
pub fn residue(v: &BigInt, w: usize) -> u64 {
    let m = BigInt::from(1u128 << w);
    let r = ((v % &m) + &m) % &m;
    u64::try_from(r).expect("fits in 64 bits")
}

/// Interpret a w-bit word as two's complement.
pub fn signed(v: u64, w: usize) -> i64 {
    if w < 64 && v >> (w - 1) & 1 == 1 {
        v as i64 - (1i64 << w)
    } else {
        v as i64
    }
}

/// Caches the flattened gate list of an encoded circuit for repeated
/// basis-state evaluation.
pub struct Evaluator<'a, E: Encoded> {
    enc: &'a E,
    ops: Vec<FlatOp>,
    inputs: Vec<(String, Register)>,
}

impl<'a, E: Encoded> Evaluator<'a, E> {
    pub fn new(enc: &'a E) -> Result<Self, QpolyError> {
        let n = enc.circuit().num_qubits;
        if n > MAX_KEY_QUBITS {
            return Err(QpolyError::Capacity(format!("{n} qubits exceeds the {MAX_KEY_QUBITS}-qubit basis key")));
        }
        Ok(Evaluator { enc, ops: enc.circuit().flatten(), inputs: enc.input_registers() })
    }

    pub fn input_key(&self, values: &[u64]) -> Result<BasisKey, QpolyError> {
        if values.len() != self.inputs.len() {
            return Err(QpolyError::Input(format!("expected {} inputs, got {}", self.inputs.len(), values.len())));
        }
        let mut key = BasisKey::default();
        for ((name, reg), &v) in self.inputs.iter().zip(values) {
            if reg.len < 64 && v >> reg.len != 0 {
                return Err(QpolyError::Capacity(format!("value {v} does not fit the {}-bit register {name}", reg.len)));
            }
            key.write(reg, v);
        }
        Ok(key)
    }

    /// Full output key and its global phase.
    pub fn run(&self, values: &[u64], counter: &mut QueryCounter) -> Result<(BasisKey, f64), QpolyError> {
        let key = self.input_key(values)?;
        Ok(eval_basis_flat(&self.ops, self.enc.circuit().num_qubits, &key, counter)?)
    }

    pub fn eval(&self, values: &[u64]) -> Result<u64, QpolyError> {
        let (k, _) = self.run(values, &mut QueryCounter::default())?;
        Ok(k.read(self.enc.output()))
    }

    pub fn ops(&self) -> &[FlatOp] {
        &self.ops
    }
}

/// Prepare the basis input, run the circuit, read the output register.
/// Inputs are given by register name; missing inputs are 0.
pub fn evaluate_circuit(c: &impl Encoded, inputs: &BTreeMap<String, u64>) -> Result<u64, QpolyError> {
    let regs = c.input_registers();
    for name in inputs.keys() {
        if !regs.iter().any(|(n, _)| n == name) {
            return Err(QpolyError::Input(format!("no input register named {name}")));
        }
    }
    let values: Vec<u64> = regs.iter().map(|(n, _)| inputs.get(n).copied().unwrap_or(0)).collect();
    Evaluator::new(c)?.eval(&values)
}

/// Smallest width holding `v` (at least 1).
pub(crate) fn bits_for(v: u64) -> usize {
    ((u64::BITS - v.leading_zeros()) as usize).max(1)
}
