use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{
    bits_for, build_arith, build_arith_coeff, build_coeff_circuit, build_remainder_circuit, kravchuk_to_monomial, CoeffCircuit, QpolyError,
    RegisterSpec,
};
use crate::pit::{pit_quantum, EvalGrid, PitEngine, PitError, PitOutcome, PitVerdict, QuantumPitParams};
use crate::poly::{wu_prove, PolyError, Polynomial, VariableId, WuProof, WuVerdict};
use crate::qsim::MAX_KEY_QUBITS;
use crate::seed::sub_seed;

/// How leaf coefficient circuits are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CoeffPath {
    /// Evaluation circuit → Kravchuk coefficients → monomial basis.
    Kravchuk,
    /// Monomial coefficients straight from the controlled-phase encoding.
    Direct,
}

#[derive(Clone, Copy, Debug)]
pub struct HybridParams {
    pub word_bits: usize,
    /// Pseudo-division steps, counted from the end of the chain, to run as
    /// circuits.  Only a trailing run in one variable can be composed.
    pub chain_limit: usize,
    /// Values {0..grid−1} per input variable in the final zero test.
    pub grid: u64,
    pub delta: f64,
    pub coeff_path: CoeffPath,
    pub engine: PitEngine,
    pub seed: u64,
}

impl Default for HybridParams {
    fn default() -> Self {
        HybridParams { word_bits: 16, chain_limit: 1, grid: 4, delta: 0.1, coeff_path: CoeffPath::Kravchuk, engine: PitEngine::Auto, seed: 0 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HybridError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Qpoly(#[from] QpolyError),
    #[error(transparent)]
    Pit(#[from] PitError),
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CircuitStats {
    pub label: String,
    pub qubits: usize,
    pub gates: usize,
    pub depth: usize,
    pub u_s_calls: u64,
    pub u_t_calls: u64,
}

fn stats(label: String, c: &CoeffCircuit) -> CircuitStats {
    let q = c.circuit.query_counts();
    CircuitStats {
        label,
        qubits: c.circuit.num_qubits,
        gates: c.circuit.gate_count(),
        depth: c.node.depth(),
        u_s_calls: q.get("U_S"),
        u_t_calls: q.get("U_T"),
    }
}

#[derive(Clone, Debug)]
pub struct HybridProof {
    pub classical: WuProof,
    /// Index of the first chain step run as a circuit (= steps.len() if none).
    pub quantum_from: usize,
    pub circuits: Vec<CircuitStats>,
    pub pit: PitVerdict,
    pub verdict: WuVerdict,
    /// Every variable's degree in the tested polynomial is below the grid
    /// size, so vanishing on the grid means vanishing identically.
    pub grid_certifies: bool,
}

impl HybridProof {
    pub fn agrees(&self) -> bool {
        self.verdict == self.classical.verdict
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict,
            "classical_verdict": self.classical.verdict,
            "quantum_steps": self.classical.steps.len() - self.quantum_from,
            "classical_steps": self.quantum_from,
            "circuits": self.circuits,
            "pit": self.pit.to_json(),
            "grid_certifies": self.grid_certifies,
            "side_conditions": self.classical.side_conditions.iter().map(Polynomial::to_json).collect::<Vec<_>>(),
        })
    }
}

fn leaf(p: &Polynomial, y: VariableId, degree: usize, spec: &RegisterSpec, path: CoeffPath) -> Result<CoeffCircuit, QpolyError> {
    match path {
        CoeffPath::Direct => build_arith_coeff(p, y, spec),
        CoeffPath::Kravchuk => kravchuk_to_monomial(&build_coeff_circuit(&build_arith(p, spec)?, y, degree)?),
    }
}

fn max_var_degree(p: &Polynomial) -> u32 {
    (0..p.vars().len()).filter_map(|v| p.degree_in(v)).max().unwrap_or(0)
}

fn capacity(c: &CoeffCircuit) -> Result<(), QpolyError> {
    if c.circuit.num_qubits > MAX_KEY_QUBITS {
        return Err(QpolyError::Capacity(format!("{} qubits exceed the {MAX_KEY_QUBITS}-line basis key; lower --chain-limit or --word-bits", c.circuit.num_qubits)));
    }
    Ok(())
}

/// Wu's method with the trailing pseudo-division steps executed as composed
/// coefficient circuits and the final zero check done by quantum PIT.
pub fn prove_geo_hybrid(hyps: &[Polynomial], dep_order: &[VariableId], conclusion: &Polynomial, params: &HybridParams) -> Result<HybridProof, HybridError> {
    let classical = wu_prove(hyps, dep_order, conclusion)?;
    let steps = &classical.steps;
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(params.seed, "hybrid-pit"));
    let pit_params = QuantumPitParams { h_min: 1.0, engine: params.engine };
    let vars = conclusion.vars().clone();
    let gbits = bits_for(params.grid.max(2) - 1);
    if !params.grid.is_power_of_two() {
        return Err(PitError::InvalidGrid(format!("grid size {} is not a power of two", params.grid)).into());
    }

    let trailing = match steps.last() {
        Some(last) => steps.iter().rev().take_while(|s| s.var == last.var && s.divisor == last.divisor).count(),
        None => 0,
    };
    let k = trailing.min(params.chain_limit);
    let quantum_from = steps.len() - k;
    let final_poly = classical.final_remainder().clone();
    let grid_certifies = max_var_degree(&final_poly) < params.grid as u32;

    if k == 0 {
        // Nothing to compose: zero-test the classical final remainder directly.
        let spec = RegisterSpec::uniform(params.word_bits, vars.len(), gbits)?;
        let pc = build_arith(&final_poly, &spec)?;
        // Variables absent from the polynomial touch no gate: pin them to 0.
        let grid = EvalGrid::new((0..vars.len()).map(|v| if final_poly.involves(v) { params.grid } else { 1 }).collect())?;
        let pit = pit_quantum(&pc, &grid, params.delta, &pit_params, &mut rng)?;
        let verdict = if pit.is_zero() { WuVerdict::Proved } else { WuVerdict::NotReduced };
        return Ok(HybridProof { classical, quantum_from, circuits: Vec::new(), pit, verdict, grid_certifies });
    }

    let y = steps[quantum_from].var;
    let divisor = &classical.triangular.chain[steps[quantum_from].divisor].poly;
    let dividend = if quantum_from == 0 { conclusion } else { &steps[quantum_from - 1].remainder };
    let ds = dividend.degree_in(y).unwrap_or(0) as usize;
    let dt = divisor.degree_in(y).unwrap_or(0) as usize;
    let db = bits_for(ds.max(dt) as u64);
    let mut input_bits = vec![gbits; vars.len()];
    input_bits[y] = gbits.max(bits_for(ds as u64));
    let spec = RegisterSpec::new(params.word_bits, input_bits)?.with_degree_bits(db)?;

    let us = leaf(dividend, y, ds, &spec, params.coeff_path)?;
    let ut = leaf(divisor, y, dt, &spec, params.coeff_path)?;
    let mut circuits = vec![stats(format!("dividend in {}", vars[y]), &us), stats(format!("divisor in {}", vars[y]), &ut)];
    let mut cur = us;
    let mut cur_deg = ds;
    for (i, step) in steps[quantum_from..].iter().enumerate() {
        let r = build_remainder_circuit(&cur, &ut, cur_deg, dt)?;
        capacity(&r)?;
        circuits.push(stats(format!("remainder step {}", quantum_from + i + 1), &r));
        cur_deg = step.remainder.degree_in(y).unwrap_or(0) as usize;
        cur = r;
    }
    let mut axes = vec![1u64 << db];
    // Inputs that neither S nor T involves touch no gate: pin them to 0.
    for (name, _) in &cur.inputs {
        let v = conclusion.var_id(name).expect("inputs are named by variable");
        axes.push(if dividend.involves(v) || divisor.involves(v) { params.grid } else { 1 });
    }
    let grid = EvalGrid::new(axes)?;
    let pit = pit_quantum(&cur, &grid, params.delta, &pit_params, &mut rng)?;
    let verdict = if pit.is_zero() { WuVerdict::Proved } else { WuVerdict::NotReduced };
    let grid_certifies = grid_certifies && !matches!(pit.outcome, PitOutcome::LikelyZero { .. });
    Ok(HybridProof { classical, quantum_from, circuits, pit, verdict, grid_certifies })
}

