use num_complex::Complex64;

use super::circuit::{Gate, GateKind};
use super::key::{BasisKey, MAX_KEY_QUBITS};
use super::{max_sparse_amplitudes, QsimError};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Amplitudes below this magnitude are dropped after branching gates.
const PRUNE: f64 = 1e-12;

/// Sparse state: unique basis keys with nonzero amplitudes.
///
/// Permutation and diagonal gates act in place; only `H` can grow the
/// support, after which entries are re-sorted and merged.
#[derive(Clone, Debug)]
pub struct SparseState {
    n: usize,
    entries: Vec<(BasisKey, Complex64)>,
}

#[inline]
fn matches(k: &BasisKey, g: &Gate) -> bool {
    g.controls.iter().all(|c| k.bit(c.qubit) == c.value)
}

impl SparseState {
    pub fn basis(n: usize, key: BasisKey) -> Result<Self, QsimError> {
        if n > MAX_KEY_QUBITS {
            return Err(QsimError::Capacity { qubits: n, cap: MAX_KEY_QUBITS });
        }
        Ok(SparseState { n, entries: vec![(key, Complex64::new(1.0, 0.0))] })
    }

    pub fn from_entries(n: usize, mut entries: Vec<(BasisKey, Complex64)>) -> Result<Self, QsimError> {
        if n > MAX_KEY_QUBITS {
            return Err(QsimError::Capacity { qubits: n, cap: MAX_KEY_QUBITS });
        }
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut s = SparseState { n, entries };
        s.merge();
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(BasisKey, Complex64)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(BasisKey, Complex64)> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    fn merge(&mut self) {
        let mut out: Vec<(BasisKey, Complex64)> = Vec::with_capacity(self.entries.len());
        for (k, a) in self.entries.drain(..) {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 += a,
                _ => out.push((k, a)),
            }
        }
        out.retain(|e| e.1.norm() >= PRUNE);
        self.entries = out;
    }

    pub fn apply(&mut self, g: &Gate) -> Result<(), QsimError> {
        g.validate(self.n)?;
        match g.kind {
            GateKind::X => {
                let t = g.targets[0];
                for (k, _) in self.entries.iter_mut().filter(|(k, _)| matches(k, g)) {
                    k.flip(t);
                }
            }
            GateKind::Swap => {
                let (a, b) = (g.targets[0], g.targets[1]);
                for (k, _) in self.entries.iter_mut() {
                    if k.bit(a) != k.bit(b) && matches(k, g) {
                        k.flip(a);
                        k.flip(b);
                    }
                }
            }
            GateKind::Z | GateKind::Phase(_) => {
                let t = g.targets[0];
                let w = match g.kind {
                    GateKind::Phase(th) => Complex64::from_polar(1.0, th),
                    _ => Complex64::new(-1.0, 0.0),
                };
                for (k, a) in self.entries.iter_mut() {
                    if k.bit(t) && matches(k, g) {
                        *a *= w;
                    }
                }
            }
            GateKind::H => {
                let t = g.targets[0];
                let cap = max_sparse_amplitudes();
                let mut next = Vec::with_capacity(self.entries.len() * 2);
                for &(k, a) in &self.entries {
                    if !matches(&k, g) {
                        next.push((k, a));
                        continue;
                    }
                    let mut k0 = k;
                    k0.set(t, false);
                    let mut k1 = k;
                    k1.set(t, true);
                    let s = a * FRAC_1_SQRT_2;
                    next.push((k0, s));
                    next.push((k1, if k.bit(t) { -s } else { s }));
                }
                next.sort_unstable_by(|a, b| a.0.cmp(&b.0));
                self.entries = next;
                self.merge();
                if self.entries.len() > cap {
                    return Err(QsimError::AmplitudeCap { entries: self.entries.len(), cap });
                }
            }
        }
        Ok(())
    }

    /// Restore sorted order after permutation gates (needed before lookups).
    pub fn normalize_order(&mut self) {
        self.entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    }

    pub fn amplitude(&self, key: &BasisKey) -> Complex64 {
        self.entries.iter().find(|e| &e.0 == key).map(|e| e.1).unwrap_or_default()
    }

    pub(crate) fn retain(&mut self, f: impl FnMut(&(BasisKey, Complex64)) -> bool) {
        self.entries.retain(f);
    }

    pub(crate) fn scale(&mut self, s: f64) {
        for e in &mut self.entries {
            e.1 *= s;
        }
    }
}
