use num_complex::Complex64;
use rand::Rng;

use super::circuit::{Circuit, FlatOp, Gate, QueryCounter};
use super::dense::StateVector;
use super::key::BasisKey;
use super::sparse::SparseState;
use super::{max_dense_qubits, QsimError};

/// Which simulator to use.  `Auto` picks dense for narrow circuits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    Dense,
    Sparse,
    #[default]
    Auto,
}

const AUTO_DENSE_LIMIT: usize = 14;

impl Backend {
    fn resolve(self, n: usize) -> Backend {
        match self {
            Backend::Auto if n <= AUTO_DENSE_LIMIT.min(max_dense_qubits()) => Backend::Dense,
            Backend::Auto => Backend::Sparse,
            b => b,
        }
    }
}

/// Outcome of measuring a list of qubits; bit i of `value` is the i-th qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub value: u64,
    pub bits: usize,
}

impl std::fmt::Display for Measurement {
    /// Most significant qubit first.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in (0..self.bits).rev() {
            write!(f, "{}", (self.value >> i) & 1)?;
        }
        Ok(())
    }
}

/// A simulated register state on either backend.
#[derive(Clone, Debug)]
pub enum State {
    Dense(StateVector),
    Sparse(SparseState),
}

impl State {
    pub fn zero(n: usize, backend: Backend) -> Result<Self, QsimError> {
        Self::basis(n, BasisKey::default(), backend)
    }

    pub fn basis(n: usize, key: BasisKey, backend: Backend) -> Result<Self, QsimError> {
        match backend.resolve(n) {
            Backend::Dense => {
                if n > 64 || key.0[1..].iter().any(|&w| w != 0) || (n < 64 && key.low() >> n != 0) {
                    return Err(QsimError::Capacity { qubits: n, cap: max_dense_qubits() });
                }
                Ok(State::Dense(StateVector::basis(n, key.low() as usize)?))
            }
            _ => Ok(State::Sparse(SparseState::basis(n, key)?)),
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            State::Dense(s) => s.num_qubits(),
            State::Sparse(s) => s.num_qubits(),
        }
    }

    pub fn apply(&mut self, g: &Gate) -> Result<(), QsimError> {
        match self {
            State::Dense(s) => s.apply(g),
            State::Sparse(s) => s.apply(g),
        }
    }

    pub fn run_flat(&mut self, ops: &[FlatOp], counter: &mut QueryCounter) -> Result<(), QsimError> {
        for op in ops {
            match op {
                FlatOp::Gate(g) => self.apply(g)?,
                FlatOp::Tick(l) => counter.add(l, 1),
            }
        }
        Ok(())
    }

    pub fn run(&mut self, c: &Circuit, counter: &mut QueryCounter) -> Result<(), QsimError> {
        if c.num_qubits > self.num_qubits() {
            return Err(QsimError::QubitOutOfRange { qubit: c.num_qubits - 1, n: self.num_qubits() });
        }
        self.run_flat(&c.flatten(), counter)
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            State::Dense(s) => s.norm_sqr(),
            State::Sparse(s) => s.norm_sqr(),
        }
    }

    /// Nonzero amplitudes (|a| > 1e-12), sorted by key.
    pub fn entries(&self) -> Vec<(BasisKey, Complex64)> {
        let mut v: Vec<(BasisKey, Complex64)> = match self {
            State::Dense(s) => s
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm() > 1e-12)
                .map(|(i, a)| (BasisKey::from_u64(i as u64), *a))
                .collect(),
            State::Sparse(s) => s.entries().to_vec(),
        };
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn amplitude(&self, key: &BasisKey) -> Complex64 {
        match self {
            State::Dense(s) => s.amplitudes()[key.low() as usize],
            State::Sparse(s) => s.amplitude(key),
        }
    }

    /// Total probability of basis states satisfying `pred`.
    pub fn mass(&self, pred: impl Fn(&BasisKey) -> bool) -> f64 {
        match self {
            State::Dense(s) => s
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(i, _)| pred(&BasisKey::from_u64(*i as u64)))
                .map(|(_, a)| a.norm_sqr())
                .sum(),
            State::Sparse(s) => s.entries().iter().filter(|e| pred(&e.0)).map(|e| e.1.norm_sqr()).sum(),
        }
    }

    /// Probability of each outcome of `qubits`, ascending by value.
    pub fn distribution(&self, qubits: &[usize]) -> Vec<(u64, f64)> {
        let mut m = std::collections::BTreeMap::new();
        for (k, a) in self.entries() {
            *m.entry(k.read_qubits(qubits)).or_insert(0.0) += a.norm_sqr();
        }
        m.into_iter().collect()
    }

    /// Born-rule sample of `qubits`, collapsing and renormalizing the state.
    pub fn measure(&mut self, qubits: &[usize], rng: &mut impl Rng) -> Measurement {
        assert!(qubits.len() <= 64);
        let dist = self.distribution(qubits);
        let total: f64 = dist.iter().map(|d| d.1).sum();
        let mut r = rng.gen::<f64>() * total;
        let mut value = dist.last().map(|d| d.0).unwrap_or(0);
        for &(v, p) in &dist {
            if r < p {
                value = v;
                break;
            }
            r -= p;
        }
        self.collapse(qubits, value);
        Measurement { value, bits: qubits.len() }
    }

    /// Project onto `qubits == value` and renormalize.
    pub fn collapse(&mut self, qubits: &[usize], value: u64) {
        let keep = |k: &BasisKey| k.read_qubits(qubits) == value;
        let p = self.mass(keep);
        if p <= 0.0 {
            return;
        }
        let s = 1.0 / p.sqrt();
        match self {
            State::Dense(sv) => {
                let amps: Vec<Complex64> = sv
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| if keep(&BasisKey::from_u64(i as u64)) { a * s } else { Complex64::default() })
                    .collect();
                *sv = StateVector::from_amplitudes(amps).expect("same size");
            }
            State::Sparse(sp) => {
                sp.retain(|e| keep(&e.0));
                sp.scale(s);
            }
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &State) -> Complex64 {
        let a = self.entries();
        let b = other.entries();
        let (mut i, mut j) = (0, 0);
        let mut acc = Complex64::default();
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1.conj() * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// If the state is (numerically) a single basis state, return it.
    pub fn as_basis(&self) -> Option<BasisKey> {
        let e = self.entries();
        let big: Vec<_> = e.iter().filter(|x| x.1.norm_sqr() > 1e-6).collect();
        match big.as_slice() {
            [one] if (one.1.norm_sqr() - 1.0).abs() < 1e-6 => Some(one.0),
            _ => None,
        }
    }
}
