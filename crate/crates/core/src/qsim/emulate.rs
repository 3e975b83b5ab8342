//! Exact fast path for circuits that map basis states to basis states.
//!
//! Every line is tracked either as a definite bit or as the equal-weight
//! superposition |0⟩ + e^{iφ}|1⟩ that a register takes between a QFT and its
//! inverse.  Fourier-basis arithmetic (controlled phases driven by definite
//! lines) stays within this product form, so a w-bit adder costs O(w) work
//! instead of O(2^w) amplitudes.  Any gate that would entangle two phased
//! lines makes the emulator give up, and callers fall back to simulation.

use std::f64::consts::{PI, TAU};

use super::circuit::{Circuit, FlatOp, Gate, GateKind, QueryCounter};
use super::key::BasisKey;
use super::{Backend, QsimError, State};

#[derive(Clone, Copy, Debug)]
enum Line {
    Bit(bool),
    Phased(f64),
}

const SNAP: f64 = 1e-6;

fn wrap(phi: f64) -> f64 {
    phi.rem_euclid(TAU)
}

struct Emulator {
    lines: Vec<Line>,
    global: f64,
}

impl Emulator {
    fn new(n: usize, key: &BasisKey) -> Self {
        Emulator { lines: (0..n).map(|q| Line::Bit(key.bit(q))).collect(), global: 0.0 }
    }

    /// None = not emulable; Some(false) = controls unsatisfied.
    fn controls(&self, g: &Gate) -> Option<(bool, Vec<(usize, bool)>)> {
        let mut phased = Vec::new();
        for c in &g.controls {
            match self.lines[c.qubit] {
                Line::Bit(b) if b != c.value => return Some((false, Vec::new())),
                Line::Bit(_) => {}
                Line::Phased(_) => phased.push((c.qubit, c.value)),
            }
        }
        Some((true, phased))
    }

    fn diag_phase(&mut self, mut parts: Vec<(usize, bool)>, theta: f64) -> Option<()> {
        match parts.len() {
            0 => self.global += theta,
            1 => {
                let (q, v) = parts.pop().unwrap();
                let Line::Phased(phi) = self.lines[q] else { unreachable!() };
                if v {
                    self.lines[q] = Line::Phased(wrap(phi + theta));
                } else {
                    self.global += theta;
                    self.lines[q] = Line::Phased(wrap(phi - theta));
                }
            }
            _ => return None,
        }
        Some(())
    }

    fn apply(&mut self, g: &Gate) -> Option<()> {
        let (fires, mut phased) = self.controls(g)?;
        if !fires {
            return Some(());
        }
        let diag = match g.kind {
            GateKind::Phase(t) => Some(t),
            GateKind::Z => Some(PI),
            _ => None,
        };
        if let Some(theta) = diag {
            let t = g.targets[0];
            return match self.lines[t] {
                Line::Bit(false) => Some(()),
                Line::Bit(true) => self.diag_phase(phased, theta),
                Line::Phased(_) => {
                    phased.push((t, true));
                    self.diag_phase(phased, theta)
                }
            };
        }
        if !phased.is_empty() {
            return None;
        }
        match g.kind {
            GateKind::X => {
                let t = g.targets[0];
                self.lines[t] = match self.lines[t] {
                    Line::Bit(b) => Line::Bit(!b),
                    Line::Phased(phi) => {
                        self.global += phi;
                        Line::Phased(wrap(-phi))
                    }
                };
            }
            GateKind::H => {
                let t = g.targets[0];
                self.lines[t] = match self.lines[t] {
                    Line::Bit(b) => Line::Phased(if b { PI } else { 0.0 }),
                    Line::Phased(phi) => {
                        if phi < SNAP || TAU - phi < SNAP {
                            Line::Bit(false)
                        } else if (phi - PI).abs() < SNAP {
                            Line::Bit(true)
                        } else {
                            return None;
                        }
                    }
                };
            }
            GateKind::Swap => self.lines.swap(g.targets[0], g.targets[1]),
            GateKind::Phase(_) | GateKind::Z => unreachable!(),
        }
        Some(())
    }

    fn finish(&self) -> Option<(BasisKey, f64)> {
        let mut key = BasisKey::default();
        for (q, l) in self.lines.iter().enumerate() {
            match l {
                Line::Bit(b) => key.set(q, *b),
                Line::Phased(_) => return None,
            }
        }
        Some((key, wrap(self.global)))
    }
}

/// Emulate `ops` on the basis input `key`.  Returns the output key and the
/// global phase, or None when the circuit leaves the trackable product form.
pub fn emulate_basis(ops: &[FlatOp], num_qubits: usize, key: &BasisKey, counter: &mut QueryCounter) -> Option<(BasisKey, f64)> {
    let mut em = Emulator::new(num_qubits, key);
    let mut ticks: Vec<&str> = Vec::new();
    for op in ops {
        match op {
            FlatOp::Gate(g) => em.apply(g)?,
            FlatOp::Tick(l) => ticks.push(l),
        }
    }
    let out = em.finish()?;
    for l in ticks {
        counter.add(l, 1);
    }
    Some(out)
}

/// Basis-in, basis-out evaluation: the emulator when it applies, otherwise
/// the sparse simulator.  Errors if the output is not a single basis state.
pub fn eval_basis(c: &Circuit, key: &BasisKey, counter: &mut QueryCounter) -> Result<(BasisKey, f64), QsimError> {
    let ops = c.flatten();
    eval_basis_flat(&ops, c.num_qubits, key, counter)
}

pub fn eval_basis_flat(ops: &[FlatOp], num_qubits: usize, key: &BasisKey, counter: &mut QueryCounter) -> Result<(BasisKey, f64), QsimError> {
    if let Some(r) = emulate_basis(ops, num_qubits, key, counter) {
        return Ok(r);
    }
    let mut s = State::basis(num_qubits, *key, Backend::Sparse)?;
    s.run_flat(ops, counter)?;
    let out = s.as_basis().ok_or_else(|| QsimError::InvalidGate("circuit output is not a basis state".into()))?;
    let a = s.amplitude(&out);
    Ok((out, wrap(a.arg())))
}
