use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use super::QsimError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Z,
    /// diag(1, e^{iθ}) on the target.
    Phase(f64),
    Swap,
}

/// A control line: the gate fires only when `qubit` reads `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, value: true }
    }
    pub fn off(qubit: usize) -> Self {
        Control { qubit, value: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Gate { kind, targets, controls: Vec::new() }
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    pub fn adjoint(&self) -> Gate {
        let kind = match self.kind {
            GateKind::Phase(t) => GateKind::Phase(-t),
            k => k,
        };
        Gate { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    /// Targets and controls must be in range and pairwise distinct.
    pub fn validate(&self, n: usize) -> Result<(), QsimError> {
        let want = match self.kind {
            GateKind::Swap => 2,
            _ => 1,
        };
        if self.targets.len() != want {
            return Err(QsimError::InvalidGate(format!(
                "{:?} expects {want} target(s), got {}",
                self.kind,
                self.targets.len()
            )));
        }
        let mut seen = Vec::with_capacity(self.targets.len() + self.controls.len());
        for q in self.targets.iter().copied().chain(self.controls.iter().map(|c| c.qubit)) {
            if q >= n {
                return Err(QsimError::QubitOutOfRange { qubit: q, n });
            }
            if seen.contains(&q) {
                return Err(QsimError::InvalidGate(format!("qubit {q} used twice")));
            }
            seen.push(q);
        }
        Ok(())
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().copied().chain(self.controls.iter().map(|c| c.qubit))
    }

    fn remapped(&self, map: &[usize], extra: &[Control]) -> Gate {
        Gate {
            kind: self.kind,
            targets: self.targets.iter().map(|&q| map[q]).collect(),
            controls: self
                .controls
                .iter()
                .map(|c| Control { qubit: map[c.qubit], value: c.value })
                .chain(extra.iter().copied())
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, theta) = match self.kind {
            GateKind::H => ("h", None),
            GateKind::X => ("x", None),
            GateKind::Z => ("z", None),
            GateKind::Phase(t) => ("phase", Some(t)),
            GateKind::Swap => ("swap", None),
        };
        let pos: Vec<usize> = self.controls.iter().filter(|c| c.value).map(|c| c.qubit).collect();
        let neg: Vec<usize> = self.controls.iter().filter(|c| !c.value).map(|c| c.qubit).collect();
        let mut v = json!({ "kind": kind, "targets": self.targets, "controls": pos });
        if !neg.is_empty() {
            v["zero_controls"] = json!(neg);
        }
        if let Some(t) = theta {
            v["theta"] = json!(t);
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn qubit(&self, i: usize) -> usize {
        assert!(i < self.len, "bit {i} outside register {}", self.name);
        self.start + i
    }

    pub fn qubits(&self) -> Vec<usize> {
        (self.start..self.start + self.len).collect()
    }

    /// Controls selecting the basis value `v` of this register.
    pub fn pattern(&self, v: u64) -> Vec<Control> {
        (0..self.len).map(|i| Control { qubit: self.start + i, value: (v >> i) & 1 == 1 }).collect()
    }
}

/// Invocation of a sub-circuit on a subset of lines, optionally controlled,
/// optionally inverted.  A labelled call is counted as one oracle query.
#[derive(Clone, Debug)]
pub struct Call {
    pub label: Option<Arc<str>>,
    pub circuit: Arc<Circuit>,
    pub qubit_map: Vec<usize>,
    pub controls: Vec<Control>,
    pub adjoint: bool,
}

#[derive(Clone, Debug)]
pub enum Op {
    Gate(Gate),
    Call(Call),
}

/// Flattened instruction stream: gates plus query ticks.
#[derive(Clone, Debug)]
pub enum FlatOp {
    Gate(Gate),
    Tick(Arc<str>),
}

#[derive(Clone, Debug, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub registers: Vec<Register>,
    pub ops: Vec<Op>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, registers: Vec::new(), ops: Vec::new() }
    }

    /// Allocate a fresh register at the top of the line range.
    pub fn add_register(&mut self, name: impl Into<String>, len: usize) -> Register {
        let r = Register { name: name.into(), start: self.num_qubits, len };
        self.num_qubits += len;
        self.registers.push(r.clone());
        r
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn push(&mut self, g: Gate) {
        debug_assert!(g.validate(self.num_qubits).is_ok(), "bad gate {g:?}");
        self.ops.push(Op::Gate(g));
    }

    pub fn h(&mut self, q: usize) {
        self.push(Gate::new(GateKind::H, vec![q]));
    }
    pub fn x(&mut self, q: usize) {
        self.push(Gate::new(GateKind::X, vec![q]));
    }
    pub fn z(&mut self, q: usize) {
        self.push(Gate::new(GateKind::Z, vec![q]));
    }
    pub fn phase(&mut self, q: usize, theta: f64) {
        self.push(Gate::new(GateKind::Phase(theta), vec![q]));
    }
    pub fn swap(&mut self, a: usize, b: usize) {
        self.push(Gate::new(GateKind::Swap, vec![a, b]));
    }
    pub fn cx(&mut self, controls: Vec<Control>, t: usize) {
        self.push(Gate::new(GateKind::X, vec![t]).with_controls(controls));
    }
    pub fn cphase(&mut self, controls: Vec<Control>, t: usize, theta: f64) {
        self.push(Gate::new(GateKind::Phase(theta), vec![t]).with_controls(controls));
    }

    /// Load a classical constant with one layer of X gates.
    pub fn set_const(&mut self, reg: &Register, v: u64) {
        for i in 0..reg.len {
            if (v >> i) & 1 == 1 {
                self.x(reg.qubit(i));
            }
        }
    }

    pub fn call(
        &mut self,
        label: Option<&str>,
        sub: &Arc<Circuit>,
        qubit_map: Vec<usize>,
        controls: Vec<Control>,
        adjoint: bool,
    ) {
        assert_eq!(qubit_map.len(), sub.num_qubits, "qubit map width mismatch");
        debug_assert!(qubit_map.iter().chain(controls.iter().map(|c| &c.qubit)).all(|&q| q < self.num_qubits));
        self.ops.push(Op::Call(Call {
            label: label.map(Arc::from),
            circuit: Arc::clone(sub),
            qubit_map,
            controls,
            adjoint,
        }));
    }

    /// Inline all ops of `other` (same line numbering).
    pub fn append(&mut self, other: &Circuit) {
        assert!(other.num_qubits <= self.num_qubits);
        self.ops.extend(other.ops.iter().cloned());
    }

    pub fn inverse(&self) -> Circuit {
        let ops = self
            .ops
            .iter()
            .rev()
            .map(|op| match op {
                Op::Gate(g) => Op::Gate(g.adjoint()),
                Op::Call(c) => Op::Call(Call { adjoint: !c.adjoint, ..c.clone() }),
            })
            .collect();
        Circuit { num_qubits: self.num_qubits, registers: self.registers.clone(), ops }
    }

    pub fn flatten(&self) -> Vec<FlatOp> {
        let mut out = Vec::new();
        let id: Vec<usize> = (0..self.num_qubits).collect();
        self.flatten_into(&id, &[], false, &mut out);
        out
    }

    fn flatten_into(&self, map: &[usize], ctrl: &[Control], adjoint: bool, out: &mut Vec<FlatOp>) {
        let emit = |op: &Op, out: &mut Vec<FlatOp>| match op {
            Op::Gate(g) => {
                let g = g.remapped(map, ctrl);
                out.push(FlatOp::Gate(if adjoint { g.adjoint() } else { g }));
            }
            Op::Call(c) => {
                if let Some(l) = &c.label {
                    out.push(FlatOp::Tick(Arc::clone(l)));
                }
                let sub_map: Vec<usize> = c.qubit_map.iter().map(|&q| map[q]).collect();
                let mut sub_ctrl: Vec<Control> = ctrl.to_vec();
                sub_ctrl.extend(c.controls.iter().map(|k| Control { qubit: map[k.qubit], value: k.value }));
                c.circuit.flatten_into(&sub_map, &sub_ctrl, adjoint ^ c.adjoint, out);
            }
        };
        if adjoint {
            for op in self.ops.iter().rev() {
                emit(op, out);
            }
        } else {
            for op in &self.ops {
                emit(op, out);
            }
        }
    }

    pub fn gates(&self) -> Vec<Gate> {
        self.flatten()
            .into_iter()
            .filter_map(|f| match f {
                FlatOp::Gate(g) => Some(g),
                FlatOp::Tick(_) => None,
            })
            .collect()
    }

    pub fn gate_count(&self) -> usize {
        self.gates().len()
    }

    /// ASAP layer count over the flattened gate list.
    pub fn depth(&self) -> usize {
        depth_of(self.gates().iter())
    }

    /// Number of labelled calls (with multiplicity, through nesting) per label.
    pub fn query_counts(&self) -> QueryCounter {
        let mut qc = QueryCounter::default();
        for f in self.flatten() {
            if let FlatOp::Tick(l) = f {
                qc.add(&l, 1);
            }
        }
        qc
    }

    pub fn to_json(&self) -> Value {
        json!({
            "num_qubits": self.num_qubits,
            "registers": self.registers.iter().map(|r| json!({"name": r.name, "start": r.start, "len": r.len})).collect::<Vec<_>>(),
            "gates": self.gates().iter().map(Gate::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn depth_of<'a>(gates: impl Iterator<Item = &'a Gate>) -> usize {
    let mut level: Vec<usize> = Vec::new();
    let mut depth = 0;
    for g in gates {
        let top = g.qubits().max().unwrap_or(0);
        if level.len() <= top {
            level.resize(top + 1, 0);
        }
        let l = g.qubits().map(|q| level[q]).max().unwrap_or(0) + 1;
        for q in g.qubits() {
            level[q] = l;
        }
        depth = depth.max(l);
    }
    depth
}

/// Named oracle-call counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryCounter {
    counts: std::collections::BTreeMap<String, u64>,
}

impl QueryCounter {
    pub fn add(&mut self, name: &str, k: u64) {
        *self.counts.entry(name.to_string()).or_insert(0) += k;
    }
    pub fn get(&self, name: &str) -> u64 {
        self.counts.get(name).copied().unwrap_or(0)
    }
    pub fn merge(&mut self, other: &QueryCounter) {
        for (k, v) in &other.counts {
            self.add(k, *v);
        }
    }
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl fmt::Display for QueryCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}
