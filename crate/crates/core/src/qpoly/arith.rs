use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{bits_for, residue, CoeffBasis, CoeffCircuit, Composition, PolyCircuit, QpolyError, RegisterSpec};
use crate::poly::{Polynomial, VariableId};
use crate::qsim::{append_fourier_add, append_iqft, append_qft, Circuit, Control, Register};

/// Controlled Fourier add of `sign`·src into `out` (out already in the Fourier basis).
pub fn append_add_register(c: &mut Circuit, src: &Register, out: &Register, negate: bool, controls: &[Control]) {
    let w = out.len;
    let q = out.qubits();
    for i in 0..src.len.min(w) {
        let v = BigInt::one() << i;
        let v = if negate { -v } else { v };
        let mut ctl = controls.to_vec();
        ctl.push(Control::on(src.qubit(i)));
        append_fourier_add(c, &q, residue(&v, w) as u128, &ctl);
    }
}

/// Multiply-accumulate ±a·b into `out` (Fourier basis), one doubly
/// controlled add per bit pair.
pub fn append_mac(c: &mut Circuit, a: &Register, b: &Register, out: &Register, negate: bool, controls: &[Control]) {
    let w = out.len;
    let q = out.qubits();
    for i in 0..a.len {
        for j in 0..b.len {
            if i + j >= w {
                continue;
            }
            let v = BigInt::one() << (i + j);
            let v = if negate { -v } else { v };
            let mut ctl = controls.to_vec();
            ctl.push(Control::on(a.qubit(i)));
            ctl.push(Control::on(b.qubit(j)));
            append_fourier_add(c, &q, residue(&v, w) as u128, &ctl);
        }
    }
}

fn binary_op(spec: &RegisterSpec, name: &str, body: impl Fn(&mut Circuit, &Register, &Register, &Register)) -> PolyCircuit {
    let w = spec.word_bits;
    let mut c = Circuit::new(0);
    let a = c.add_register("a", w);
    let b = c.add_register("b", w);
    let out = c.add_register("out", w);
    append_qft(&mut c, &out.qubits());
    body(&mut c, &a, &b, &out);
    append_iqft(&mut c, &out.qubits());
    PolyCircuit {
        circuit: Arc::new(c),
        inputs: vec![("a".into(), a), ("b".into(), b)],
        output: out,
        ancillas: Vec::new(),
        word_bits: w,
        degree_bits: spec.degree_bits,
        meta: name.into(),
    }
}

/// |a⟩|b⟩|0⟩ → |a⟩|b⟩|a+b mod 2^w⟩.
pub fn u_add(spec: &RegisterSpec) -> PolyCircuit {
    binary_op(spec, "add", |c, a, b, out| {
        append_add_register(c, a, out, false, &[]);
        append_add_register(c, b, out, false, &[]);
    })
}

/// |a⟩|b⟩|0⟩ → |a⟩|b⟩|a−b mod 2^w⟩.
pub fn u_sub(spec: &RegisterSpec) -> PolyCircuit {
    binary_op(spec, "sub", |c, a, b, out| {
        append_add_register(c, a, out, false, &[]);
        append_add_register(c, b, out, true, &[]);
    })
}

/// |a⟩|b⟩|0⟩ → |a⟩|b⟩|a·b mod 2^w⟩.
pub fn u_mul(spec: &RegisterSpec) -> PolyCircuit {
    binary_op(spec, "mul", |c, a, b, out| append_mac(c, a, b, out, false, &[]))
}

/// Expand Π_v x_v^{e_v} over the bits of each input register.  Because
/// bits are idempotent, every product of bits collapses to a set of control
/// lines; the result maps each set to its accumulated weight.
fn expand_monomial(exps: &[u32], regs: &[Option<&Register>]) -> BTreeMap<Vec<usize>, BigInt> {
    let mut acc: BTreeMap<Vec<usize>, BigInt> = BTreeMap::from([(Vec::new(), BigInt::one())]);
    for (v, &e) in exps.iter().enumerate() {
        let Some(reg) = regs[v] else { continue };
        for _ in 0..e {
            let mut next: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
            for (set, wgt) in &acc {
                for i in 0..reg.len {
                    let q = reg.qubit(i);
                    let mut s = set.clone();
                    if let Err(pos) = s.binary_search(&q) {
                        s.insert(pos, q);
                    }
                    *next.entry(s).or_default() += wgt << i;
                }
            }
            acc = next;
        }
    }
    acc
}

fn input_registers(c: &mut Circuit, p: &Polynomial, spec: &RegisterSpec, skip: Option<VariableId>) -> Result<Vec<Option<Register>>, QpolyError> {
    let vars = p.vars();
    if spec.input_bits.len() != vars.len() {
        return Err(QpolyError::Mismatch(format!("spec has {} input widths for {} variables", spec.input_bits.len(), vars.len())));
    }
    Ok(vars
        .iter()
        .enumerate()
        .map(|(i, name)| (Some(i) != skip).then(|| c.add_register(name.clone(), spec.input_bits[i])))
        .collect())
}

/// Arithmetic encoding of an integer polynomial:
/// |x⟩|0⟩ → |x⟩|p(x) mod 2^w⟩ using QFT(out), controlled constant adds, IQFT.
pub fn build_arith(p: &Polynomial, spec: &RegisterSpec) -> Result<PolyCircuit, QpolyError> {
    let w = spec.word_bits;
    let mut c = Circuit::new(0);
    let regs = input_registers(&mut c, p, spec, None)?;
    let out = c.add_register("out", w);
    let views: Vec<Option<&Register>> = regs.iter().map(Option::as_ref).collect();
    let mut adds: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    for (exps, coeff) in p.terms() {
        for (set, wgt) in expand_monomial(exps, &views) {
            *adds.entry(set).or_default() += coeff * wgt;
        }
    }
    append_qft(&mut c, &out.qubits());
    for (set, v) in &adds {
        let ctl: Vec<Control> = set.iter().map(|&q| Control::on(q)).collect();
        append_fourier_add(&mut c, &out.qubits(), residue(v, w) as u128, &ctl);
    }
    append_iqft(&mut c, &out.qubits());
    let vars = p.vars();
    Ok(PolyCircuit {
        circuit: Arc::new(c),
        inputs: vars.iter().cloned().zip(regs.into_iter().map(|r| r.expect("all inputs"))).collect(),
        output: out,
        ancillas: Vec::new(),
        word_bits: w,
        degree_bits: spec.degree_bits,
        meta: format!("arith: {p}"),
    })
}

/// Coefficient extraction in the monomial basis:
/// |d⟩|x⟩|0⟩ → |d⟩|x⟩|coeff of y^d in p, at x⟩.  Each monomial's adds are
/// additionally controlled on the exponent register equalling its y-degree.
pub fn build_arith_coeff(p: &Polynomial, y: VariableId, spec: &RegisterSpec) -> Result<CoeffCircuit, QpolyError> {
    let w = spec.word_bits;
    let vars = p.vars();
    if y >= vars.len() {
        return Err(QpolyError::Range(format!("variable index {y} out of range")));
    }
    let max_e = p.degree_in(y).unwrap_or(0) as u64;
    if bits_for(max_e) > spec.degree_bits {
        return Err(QpolyError::Capacity(format!("degree {max_e} in {} needs more than {} exponent bits", vars[y], spec.degree_bits)));
    }
    let mut c = Circuit::new(0);
    let d = c.add_register("d", spec.degree_bits);
    let regs = input_registers(&mut c, p, spec, Some(y))?;
    let out = c.add_register("out", w);
    let views: Vec<Option<&Register>> = regs.iter().map(Option::as_ref).collect();
    let mut adds: BTreeMap<(u32, Vec<usize>), BigInt> = BTreeMap::new();
    for (exps, coeff) in p.terms() {
        for (set, wgt) in expand_monomial(exps, &views) {
            *adds.entry((exps[y], set)).or_default() += coeff * wgt;
        }
    }
    append_qft(&mut c, &out.qubits());
    for ((e, set), v) in &adds {
        let mut ctl = d.pattern(*e as u64);
        ctl.extend(set.iter().map(|&q| Control::on(q)));
        append_fourier_add(&mut c, &out.qubits(), residue(v, w) as u128, &ctl);
    }
    append_iqft(&mut c, &out.qubits());
    let depth = c.depth();
    let inputs = vars.iter().cloned().zip(regs).filter_map(|(n, r)| r.map(|r| (n, r))).collect();
    Ok(CoeffCircuit {
        uncompute: Arc::new(Circuit::new(c.num_qubits)),
        circuit: Arc::new(c),
        degree: d,
        inputs,
        output: out,
        ancillas: Vec::new(),
        word_bits: w,
        var: vars[y].clone(),
        degree_bound: max_e as usize,
        basis: CoeffBasis::Monomial,
        scale: BigInt::one(),
        node: Composition::Leaf { depth },
    })
}

/// XOR the table value selected by `index` into `target`: one multi-controlled
/// X per set bit.  Self-inverse.
pub(crate) fn append_table_load(c: &mut Circuit, index: &Register, target: &Register, table: &[(u64, u64)]) {
    for &(i, v) in table {
        for b in 0..target.len {
            if (v >> b) & 1 == 1 {
                c.cx(index.pattern(i), target.qubit(b));
            }
        }
    }
}

/// Data-driven encoding from explicit (index, value) pairs:
/// |i⟩|0⟩ → |i⟩|value_i mod 2^w⟩, 0 for indices not listed.
pub fn build_datadriven(points: &[(u64, BigInt)], word_bits: usize) -> Result<PolyCircuit, QpolyError> {
    if points.is_empty() {
        return Err(QpolyError::Input("no data points".into()));
    }
    if !(2..=64).contains(&word_bits) {
        return Err(QpolyError::Capacity(format!("word width {word_bits} outside 2..=64")));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (i, _) in points {
        if !seen.insert(*i) {
            return Err(QpolyError::Input(format!("duplicate index {i}")));
        }
    }
    let max = *seen.last().expect("nonempty");
    let mut c = Circuit::new(0);
    let index = c.add_register("index", bits_for(max));
    let out = c.add_register("out", word_bits);
    let table: Vec<(u64, u64)> = points.iter().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (*i, residue(v, word_bits))).collect();
    append_table_load(&mut c, &index, &out, &table);
    Ok(PolyCircuit {
        circuit: Arc::new(c),
        inputs: vec![("index".into(), index)],
        output: out,
        ancillas: Vec::new(),
        word_bits,
        degree_bits: 2,
        meta: format!("table of {} points", points.len()),
    })
}
