//! Polynomial identity testing.
//!
//! Classically: Schwartz–Zippel sampling over a grid.  Quantumly: fixed-point
//! amplitude amplification over the uniform superposition of grid points,
//! marking points where the evaluation circuit outputs a nonzero word.
//! A short L=1 attempt runs first (it succeeds outright when most points are
//! nonzero), then one fixed-point schedule sized for the smallest marked
//! count `h_min` of interest.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde_json::{json, Value};

use crate::amplify::{fixed_point_length, fixed_point_phases, subspace_success, AmplifyError, Amplifier, SearchSpec};
use crate::poly::Polynomial;
use crate::qpoly::{build_arith, signed, Encoded, Evaluator, QpolyError, RegisterSpec};
use crate::qsim::{Backend, Circuit};

const MASS_EPS: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum PitError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("delta must lie in (0,1), got {0}")]
    InvalidDelta(f64),
    #[error("capacity: {0}")]
    Capacity(String),
    #[error(transparent)]
    Qpoly(#[from] QpolyError),
    #[error(transparent)]
    Amplify(#[from] AmplifyError),
}

/// Product grid with values {0..g_i−1} on axis i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalGrid {
    sizes: Vec<u64>,
}

impl EvalGrid {
    pub fn new(sizes: Vec<u64>) -> Result<Self, PitError> {
        if sizes.iter().any(|&g| g == 0) {
            return Err(PitError::InvalidGrid("every axis needs at least one value".into()));
        }
        if sizes.iter().try_fold(1u128, |acc, &g| acc.checked_mul(g as u128)).is_none() {
            return Err(PitError::InvalidGrid("grid too large".into()));
        }
        Ok(EvalGrid { sizes })
    }

    pub fn uniform(num_vars: usize, g: u64) -> Result<Self, PitError> {
        Self::new(vec![g; num_vars])
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn num_vars(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> u128 {
        self.sizes.iter().map(|&g| g as u128).product()
    }

    /// Smallest per-axis size, the |G| of the Schwartz–Zippel bound.
    pub fn min_size(&self) -> u64 {
        self.sizes.iter().copied().min().unwrap_or(1)
    }

    /// Mixed-radix decoding, axis 0 least significant.
    pub fn point(&self, mut index: u128) -> Vec<u64> {
        self.sizes
            .iter()
            .map(|&g| {
                let v = (index % g as u128) as u64;
                index /= g as u128;
                v
            })
            .collect()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<u64> {
        self.sizes.iter().map(|&g| rng.gen_range(0..g)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PitOutcome {
    NonzeroWitness { point: Vec<u64>, value: BigInt },
    LikelyZero { confidence: f64 },
    ExactZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PitMode {
    Sampled,
    SimulatedExact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PitVerdict {
    pub outcome: PitOutcome,
    /// Oracle calls: evaluations classically, U_P applications quantumly.
    pub queries: u64,
    pub mode: PitMode,
    /// Fraction of grid points with nonzero output (simulation only).
    pub marked_mass: Option<f64>,
    /// Schedule lengths actually run.
    pub schedules: Vec<usize>,
    /// Worst-case U_P cost of the full ladder.
    pub budget: u64,
}

impl PitVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self.outcome, PitOutcome::NonzeroWitness { .. })
    }

    pub fn to_json(&self) -> Value {
        let (verdict, witness, confidence) = match &self.outcome {
            PitOutcome::NonzeroWitness { point, value } => ("NonzeroWitness", json!({"point": point, "value": value.to_string()}), Value::Null),
            PitOutcome::LikelyZero { confidence } => ("LikelyZero", Value::Null, json!(confidence)),
            PitOutcome::ExactZero => ("ExactZero", Value::Null, json!(1.0)),
        };
        json!({
            "verdict": verdict,
            "witness": witness,
            "queries": self.queries,
            "confidence": confidence,
            "mode": match self.mode { PitMode::Sampled => "sampled", PitMode::SimulatedExact => "simulated-exact" },
            "marked_mass": self.marked_mass,
            "schedules": self.schedules,
        })
    }
}

/// Schwartz–Zippel: `m` uniform samples; the first nonzero is re-evaluated
/// and returned.  Confidence of a zero verdict is 1 − (D/|G|)^m.
pub fn sz_classical(mut oracle: impl FnMut(&[u64]) -> BigInt, grid: &EvalGrid, degree: u32, m: usize, rng: &mut impl Rng) -> PitVerdict {
    let mut queries = 0;
    for _ in 0..m {
        let x = grid.sample(rng);
        queries += 1;
        let v = oracle(&x);
        if !v.is_zero() && oracle(&x) == v {
            return PitVerdict {
                outcome: PitOutcome::NonzeroWitness { point: x, value: v },
                queries,
                mode: PitMode::Sampled,
                marked_mass: None,
                schedules: Vec::new(),
                budget: m as u64,
            };
        }
    }
    let ratio = (degree as f64 / grid.min_size() as f64).min(1.0);
    PitVerdict {
        outcome: PitOutcome::LikelyZero { confidence: 1.0 - ratio.powi(m as i32) },
        queries,
        mode: PitMode::Sampled,
        marked_mass: None,
        schedules: Vec::new(),
        budget: m as u64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PitEngine {
    /// Gate-level when the amplitude support is small, else emulated.
    Auto,
    /// Full state-vector simulation of every reflection.
    GateLevel,
    /// Exact marked fraction from per-point basis emulation; schedule
    /// success from the two-dimensional amplitude recursion.
    Emulated,
}

#[derive(Clone, Copy, Debug)]
pub struct QuantumPitParams {
    /// Smallest number of nonzero grid points the search must catch.
    pub h_min: f64,
    pub engine: PitEngine,
}

impl Default for QuantumPitParams {
    fn default() -> Self {
        QuantumPitParams { h_min: 1.0, engine: PitEngine::Auto }
    }
}

/// Schedule lengths of the ladder: a plain L=1 attempt, then fixed-point.
pub fn quantum_ladder(total: u128, delta: f64, h_min: f64) -> Vec<usize> {
    let l = fixed_point_length(delta, (h_min / total as f64).min(1.0));
    if l <= 1 {
        vec![1]
    } else {
        vec![1, l]
    }
}

fn check_grid(pc: &impl Encoded, grid: &EvalGrid) -> Result<Vec<usize>, PitError> {
    let regs = pc.input_registers();
    if regs.len() != grid.num_vars() {
        return Err(PitError::InvalidGrid(format!("grid has {} axes, circuit has {} inputs", grid.num_vars(), regs.len())));
    }
    regs.iter()
        .zip(grid.sizes())
        .map(|((name, reg), &g)| {
            if !g.is_power_of_two() {
                return Err(PitError::InvalidGrid(format!("axis {name} has {g} values; the superposition needs a power of two")));
            }
            let bits = g.trailing_zeros() as usize;
            if bits > reg.len {
                return Err(PitError::Capacity(format!("{g} values do not fit the {}-bit register {name}", reg.len)));
            }
            Ok(bits)
        })
        .collect()
}

/// Point × operation cap for computing the exact marked set by emulation.
pub const EMULATION_WORK_LIMIT: f64 = 2e10;

/// Quantum PIT on an evaluation circuit.  Inputs are the circuit's input
/// registers, in order, matched to the grid axes.
pub fn pit_quantum(pc: &impl Encoded, grid: &EvalGrid, delta: f64, params: &QuantumPitParams, rng: &mut impl Rng) -> Result<PitVerdict, PitError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(PitError::InvalidDelta(delta));
    }
    let bits = check_grid(pc, grid)?;
    let total = grid.total();
    let ladder = quantum_ladder(total, delta, params.h_min);
    let budget = ladder.iter().sum::<usize>() as u64;
    let ev = Evaluator::new(pc)?;
    let support = total as f64 * 2f64.powi(pc.word_bits() as i32);
    let gate_level = match params.engine {
        PitEngine::GateLevel => true,
        PitEngine::Emulated => false,
        PitEngine::Auto => support <= 4096.0 && support * ev.ops().len() as f64 <= 1.5e8,
    };
    let verify = |point: &[u64]| -> Result<Option<BigInt>, PitError> {
        let v = ev.eval(point)?;
        Ok((v != 0).then(|| BigInt::from(signed(v, pc.word_bits()))))
    };
    let finish = |outcome, queries, schedules, mass| PitVerdict { outcome, queries, mode: PitMode::SimulatedExact, marked_mass: Some(mass), schedules, budget };

    if gate_level {
        let amp = gate_level_amplifier(pc, &bits, delta)?;
        let lambda = amp.initial_mass()?;
        if lambda <= MASS_EPS {
            return Ok(finish(PitOutcome::ExactZero, 1, vec![1], lambda));
        }
        let mut queries = 0;
        let mut run = Vec::new();
        let flag = amp.spec().flag;
        let mut lines = amp.spec().output.clone();
        lines.push(flag);
        for &l in &ladder {
            let mut a = amp.run_fixed_point(l)?;
            queries += a.counter.get("U_P");
            run.push(l);
            let m = a.state.measure(&lines, rng);
            if m.value >> (lines.len() - 1) & 1 == 1 {
                let point = decode(m.value, &bits);
                if let Some(value) = verify(&point)? {
                    return Ok(finish(PitOutcome::NonzeroWitness { point, value }, queries, run, lambda));
                }
            }
        }
        return Ok(finish(PitOutcome::LikelyZero { confidence: 1.0 - delta * delta }, queries, run, lambda));
    }

    let work = total as f64 * ev.ops().len() as f64;
    if work > EMULATION_WORK_LIMIT {
        return Err(PitError::Capacity(format!("exact emulation of {total} grid points × {} operations exceeds {EMULATION_WORK_LIMIT:e}", ev.ops().len())));
    }
    let mut marked: Vec<u128> = Vec::new();
    for i in 0..total {
        if ev.eval(&grid.point(i))? != 0 {
            marked.push(i);
        }
    }
    let lambda = marked.len() as f64 / total as f64;
    if marked.is_empty() {
        return Ok(finish(PitOutcome::ExactZero, 1, vec![1], 0.0));
    }
    let mut queries = 0;
    let mut run = Vec::new();
    for &l in &ladder {
        queries += l as u64;
        run.push(l);
        let p = subspace_success(lambda, &fixed_point_phases(l, delta));
        if rng.gen::<f64>() < p {
            let point = grid.point(marked[rng.gen_range(0..marked.len())]);
            if let Some(value) = verify(&point)? {
                return Ok(finish(PitOutcome::NonzeroWitness { point, value }, queries, run, lambda));
            }
        }
    }
    Ok(finish(PitOutcome::LikelyZero { confidence: 1.0 - delta * delta }, queries, run, lambda))
}

fn decode(mut v: u64, bits: &[usize]) -> Vec<u64> {
    bits.iter()
        .map(|&b| {
            let x = v & ((1u64 << b) - 1);
            v >>= b;
            x
        })
        .collect()
}

/// A = (uniform superposition on the grid bits) then U_P; the oracle sets a
/// fresh flag line iff the output register is nonzero.
fn gate_level_amplifier(pc: &impl Encoded, bits: &[usize], delta: f64) -> Result<Amplifier, PitError> {
    let base = pc.circuit();
    let n = base.num_qubits + 1;
    let flag = base.num_qubits;
    let mut prep = Circuit::new(n);
    let mut output = Vec::new();
    for ((_, reg), &b) in pc.input_registers().iter().zip(bits) {
        for i in 0..b {
            prep.h(reg.qubit(i));
            output.push(reg.qubit(i));
        }
    }
    prep.call(Some("U_P"), base, (0..base.num_qubits).collect(), Vec::new(), false);
    let mut oracle = Circuit::new(n);
    oracle.x(flag);
    oracle.cx(pc.output().pattern(0), flag);
    let mut spec = SearchSpec::new(Arc::new(prep), Arc::new(oracle), flag, output);
    spec.delta = delta;
    spec.backend = Backend::Sparse;
    Ok(Amplifier::new(spec)?)
}

/// Quantum PIT of a polynomial through its arithmetic circuit.  A verdict
/// without witness is re-tested at a wider word, since a value can vanish
/// mod 2^w without vanishing over ℤ.  Witnesses carry the exact value.
pub fn pit_polynomial_quantum(
    p: &Polynomial,
    grid: &EvalGrid,
    word_bits: usize,
    delta: f64,
    params: &QuantumPitParams,
    rng: &mut impl Rng,
) -> Result<(PitVerdict, Option<usize>), PitError> {
    if grid.num_vars() != p.vars().len() {
        return Err(PitError::InvalidGrid(format!("grid has {} axes for {} variables", grid.num_vars(), p.vars().len())));
    }
    let input_bits: Vec<usize> = grid.sizes().iter().map(|&g| (64 - (g.max(2) - 1).leading_zeros()) as usize).collect();
    let run = |w: usize, rng: &mut _| -> Result<PitVerdict, PitError> {
        let spec = RegisterSpec::new(w, input_bits.clone())?;
        let pc = build_arith(p, &spec)?;
        let mut v = pit_quantum(&pc, grid, delta, params, rng)?;
        if let PitOutcome::NonzeroWitness { point, value } = &mut v.outcome {
            let x: Vec<BigInt> = point.iter().map(|&a| BigInt::from(a)).collect();
            *value = p.eval_at(&x);
        }
        Ok(v)
    };
    let first = run(word_bits, rng)?;
    if !first.is_zero() || word_bits >= 64 {
        return Ok((first, None));
    }
    let wide = (word_bits + 16).min(64);
    let second = run(wide, rng)?;
    let queries = first.queries + second.queries;
    let mut merged = if second.is_zero() { first } else { second };
    merged.queries = queries;
    Ok((merged, Some(wide)))
}

/// Classical evaluation oracle for a polynomial on grid points.
pub fn poly_oracle(p: &Polynomial) -> impl FnMut(&[u64]) -> BigInt + '_ {
    move |x: &[u64]| {
        let v: Vec<BigInt> = x.iter().map(|&a| BigInt::from(a)).collect();
        p.eval_at(&v)
    }
}
