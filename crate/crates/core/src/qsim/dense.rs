use num_complex::Complex64;

use super::circuit::{Gate, GateKind};
use super::{max_dense_qubits, QsimError};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Dense 2^n amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

/// Iterate all indices `i` with `i & fixed == value`, in increasing order.
fn for_each_matching(n: usize, fixed: usize, value: usize, mut f: impl FnMut(usize)) {
    let free = ((1usize << n) - 1) & !fixed;
    let mut s = 0usize;
    loop {
        f(s | value);
        if s == free {
            break;
        }
        s = ((s | !free).wrapping_add(1)) & free;
    }
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self, QsimError> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, QsimError> {
        let cap = max_dense_qubits();
        if n > cap {
            return Err(QsimError::Capacity { qubits: n, cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1usize << n {
            return Err(QsimError::InvalidGate("amplitude count is not a power of two".into()));
        }
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, g: &Gate) -> Result<(), QsimError> {
        g.validate(self.n)?;
        let (mut fixed, mut value) = (0usize, 0usize);
        for c in &g.controls {
            fixed |= 1 << c.qubit;
            if c.value {
                value |= 1 << c.qubit;
            }
        }
        let amps = &mut self.amps;
        match g.kind {
            GateKind::X | GateKind::H => {
                let t = 1usize << g.targets[0];
                let h = matches!(g.kind, GateKind::H);
                for_each_matching(self.n, fixed | t, value, |i| {
                    let j = i | t;
                    if h {
                        let (a, b) = (amps[i], amps[j]);
                        amps[i] = (a + b) * FRAC_1_SQRT_2;
                        amps[j] = (a - b) * FRAC_1_SQRT_2;
                    } else {
                        amps.swap(i, j);
                    }
                });
            }
            GateKind::Z | GateKind::Phase(_) => {
                let t = 1usize << g.targets[0];
                let w = match g.kind {
                    GateKind::Phase(th) => Complex64::from_polar(1.0, th),
                    _ => Complex64::new(-1.0, 0.0),
                };
                for_each_matching(self.n, fixed | t, value | t, |i| amps[i] *= w);
            }
            GateKind::Swap => {
                let (a, b) = (1usize << g.targets[0], 1usize << g.targets[1]);
                for_each_matching(self.n, fixed | a | b, value | a, |i| amps.swap(i, i ^ a ^ b));
            }
        }
        Ok(())
    }
}
