use super::circuit::Register;

/// Computational-basis label for up to 256 qubits; qubit q is bit q.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKey(pub [u64; 4]);

pub const MAX_KEY_QUBITS: usize = 256;

impl BasisKey {
    pub fn from_u64(v: u64) -> Self {
        BasisKey([v, 0, 0, 0])
    }

    #[inline]
    pub fn bit(&self, q: usize) -> bool {
        (self.0[q >> 6] >> (q & 63)) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, q: usize) {
        self.0[q >> 6] ^= 1 << (q & 63);
    }

    #[inline]
    pub fn set(&mut self, q: usize, b: bool) {
        if self.bit(q) != b {
            self.flip(q);
        }
    }

    pub fn read(&self, reg: &Register) -> u64 {
        assert!(reg.len <= 64);
        (0..reg.len).fold(0u64, |acc, i| acc | ((self.bit(reg.start + i) as u64) << i))
    }

    pub fn write(&mut self, reg: &Register, v: u64) {
        for i in 0..reg.len {
            self.set(reg.start + i, (v >> i) & 1 == 1);
        }
    }

    pub fn read_qubits(&self, qubits: &[usize]) -> u64 {
        qubits.iter().enumerate().fold(0u64, |acc, (i, &q)| acc | ((self.bit(q) as u64) << i))
    }

    /// Low 64 bits (the dense index when n ≤ 64).
    pub fn low(&self) -> u64 {
        self.0[0]
    }
}
