use crate::formula::{Clause, ClauseSet, Polarity};
use crate::qsim::{append_fourier_add, append_iqft, append_qft, BasisKey, Circuit, Control, Register};

use super::QResolutionError;

/// One ququart per variable: 0 absent, 1 positive, 2 negative, 3 resolved.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuquartWord(pub Vec<u8>);

impl QuquartWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Low bit on qubit start+2j, high bit on start+2j+1.
    pub fn to_bits(&self) -> u64 {
        self.0.iter().enumerate().fold(0, |acc, (j, &v)| acc | (v as u64) << (2 * j))
    }

    pub fn read(key: &BasisKey, reg: &Register) -> QuquartWord {
        QuquartWord((0..reg.len / 2).map(|j| key.bit(reg.start + 2 * j) as u8 | (key.bit(reg.start + 2 * j + 1) as u8) << 1).collect())
    }
}

impl std::fmt::Display for QuquartWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn encode_clause(c: &Clause) -> QuquartWord {
    QuquartWord(
        c.polarities()
            .iter()
            .map(|p| match p {
                Polarity::Absent => 0,
                Polarity::Pos => 1,
                Polarity::Neg => 2,
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Clause(Clause),
    EmptyClause,
}

impl Decoded {
    pub fn into_clause(self, num_vars: usize) -> Clause {
        match self {
            Decoded::Clause(c) => c,
            Decoded::EmptyClause => Clause::empty(num_vars),
        }
    }
}

/// Map a word with exactly one resolved entry back to a clause.
pub fn decode_resolvent(w: &QuquartWord) -> Result<Decoded, QResolutionError> {
    let threes = w.0.iter().filter(|&&v| v == 3).count();
    if threes != 1 {
        return Err(QResolutionError::MalformedWord { word: w.to_string(), resolved: threes });
    }
    let pols: Vec<Polarity> = w
        .0
        .iter()
        .map(|v| match v {
            1 => Polarity::Pos,
            2 => Polarity::Neg,
            _ => Polarity::Absent,
        })
        .collect();
    if pols.iter().all(|p| *p == Polarity::Absent) {
        Ok(Decoded::EmptyClause)
    } else {
        Ok(Decoded::Clause(Clause::from_polarities(pols)))
    }
}

/// Single-variable resolution table.
pub fn ur_table(a: u8, b: u8) -> u8 {
    match (a, b) {
        (0, x) | (x, 0) if x < 3 => x,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) | (2, 1) => 3,
        _ => 0,
    }
}

/// Number of index qubits for M clauses (0 when M = 1).
pub fn index_width(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

/// Counter width able to hold 0..=N.
pub fn counter_width(n: usize) -> usize {
    ((usize::BITS - n.leading_zeros()) as usize).max(1)
}

/// |m⟩|0…0⟩ → |m⟩|encode(c_m)⟩; indices ≥ M keep the all-zero sentinel.
pub fn build_ukb(kb: &ClauseSet) -> Circuit {
    let k = index_width(kb.len());
    let mut c = Circuit::new(0);
    let idx = c.add_register("index", k);
    let data = c.add_register("clause", 2 * kb.num_vars());
    for (m, clause) in kb.clauses().iter().enumerate() {
        let bits = encode_clause(clause).to_bits();
        for b in 0..data.len {
            if bits >> b & 1 == 1 {
                c.cx(idx.pattern(m as u64), data.qubit(b));
            }
        }
    }
    c
}

/// Per-variable resolution into a zeroed result register.
pub fn build_ur(n: usize) -> Circuit {
    let mut c = Circuit::new(0);
    let p1 = c.add_register("p1", 2 * n);
    let p2 = c.add_register("p2", 2 * n);
    let r = c.add_register("result", 2 * n);
    for j in 0..n {
        for a in 0..3u8 {
            for b in 0..3u8 {
                let t = ur_table(a, b);
                if t == 0 {
                    continue;
                }
                let ctrl: Vec<Control> = vec![
                    Control { qubit: p1.qubit(2 * j), value: a & 1 == 1 },
                    Control { qubit: p1.qubit(2 * j + 1), value: a & 2 == 2 },
                    Control { qubit: p2.qubit(2 * j), value: b & 1 == 1 },
                    Control { qubit: p2.qubit(2 * j + 1), value: b & 2 == 2 },
                ];
                for bit in 0..2 {
                    if t >> bit & 1 == 1 {
                        c.cx(ctrl.clone(), r.qubit(2 * j + bit));
                    }
                }
            }
        }
    }
    c
}

/// Count resolved (|11⟩) ququarts with a Fourier-basis counter, flag the
/// count-one case, then uncompute the counter.
pub fn build_uj(n: usize) -> Circuit {
    let a = counter_width(n);
    let mut c = Circuit::new(0);
    let r = c.add_register("result", 2 * n);
    let cnt = c.add_register("count", a);
    let flag = c.add_register("flag", 1);
    let cq = cnt.qubits();
    let modulus = 1u128 << a;
    let count = |c: &mut Circuit, v: u128| {
        append_qft(c, &cq);
        for j in 0..n {
            append_fourier_add(c, &cq, v, &[Control::on(r.qubit(2 * j)), Control::on(r.qubit(2 * j + 1))]);
        }
        append_iqft(c, &cq);
    };
    count(&mut c, 1);
    c.cx(cnt.pattern(1), flag.qubit(0));
    count(&mut c, modulus - 1);
    c
}

/// Line assignment of a resolution round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub num_vars: usize,
    pub m: usize,
    pub m_padded: usize,
    pub idx1: Register,
    pub idx2: Register,
    pub p1: Register,
    pub p2: Register,
    pub result: Register,
    pub count: Register,
    pub flag: usize,
    pub total: usize,
}

impl Layout {
    pub fn new(num_vars: usize, m: usize) -> Layout {
        let k = index_width(m);
        let mut c = Circuit::new(0);
        let idx1 = c.add_register("i", k);
        let idx2 = c.add_register("j", k);
        let p1 = c.add_register("p1", 2 * num_vars);
        let p2 = c.add_register("p2", 2 * num_vars);
        let result = c.add_register("result", 2 * num_vars);
        let count = c.add_register("count", counter_width(num_vars));
        let flag = c.add_register("flag", 1).start;
        Layout { num_vars, m, m_padded: 1 << k, idx1, idx2, p1, p2, result, count, flag, total: c.num_qubits }
    }
}

/// State preparation (index superposition, two loads, U_R) and the U_J oracle
/// on the full round layout.
pub fn build_round_circuits(kb: &ClauseSet) -> (Layout, Circuit, Circuit) {
    let lay = Layout::new(kb.num_vars(), kb.len());
    let ukb = std::sync::Arc::new(build_ukb(kb));
    let ur = std::sync::Arc::new(build_ur(kb.num_vars()));
    let uj = std::sync::Arc::new(build_uj(kb.num_vars()));
    let mut prep = Circuit::new(lay.total);
    for q in lay.idx1.qubits().into_iter().chain(lay.idx2.qubits()) {
        prep.h(q);
    }
    prep.call(Some("U_KB"), &ukb, lay.idx1.qubits().into_iter().chain(lay.p1.qubits()).collect(), vec![], false);
    prep.call(Some("U_KB"), &ukb, lay.idx2.qubits().into_iter().chain(lay.p2.qubits()).collect(), vec![], false);
    prep.call(None, &ur, lay.p1.qubits().into_iter().chain(lay.p2.qubits()).chain(lay.result.qubits()).collect(), vec![], false);
    let mut oracle = Circuit::new(lay.total);
    oracle.call(None, &uj, lay.result.qubits().into_iter().chain(lay.count.qubits()).chain([lay.flag]).collect(), vec![], false);
    (lay, prep, oracle)
}
