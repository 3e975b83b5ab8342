use std::sync::Arc;

use num_bigint::BigInt;

use super::arith::append_mac;
use super::{bits_for, residue, CoeffBasis, CoeffCircuit, Composition, QpolyError};
use crate::qsim::{append_fourier_add, append_iqft, append_qft, Circuit, Control, Register};

/// Line map for calling a sub-circuit: each sub register is placed on the
/// paired parent register (same width).
pub(crate) fn qubit_map(sub_qubits: usize, pairs: &[(Register, Register)]) -> Vec<usize> {
    let mut map = vec![usize::MAX; sub_qubits];
    for (sub, parent) in pairs {
        assert_eq!(sub.len, parent.len, "register {} mapped onto {}", sub.name, parent.name);
        for i in 0..sub.len {
            map[sub.qubit(i)] = parent.qubit(i);
        }
    }
    assert!(map.iter().all(|&q| q != usize::MAX), "unmapped sub-circuit line");
    map
}

fn slice(reg: &Register, offset: usize, len: usize) -> Register {
    assert!(offset + len <= reg.len);
    Register { name: format!("{}[{offset}..{}]", reg.name, offset + len), start: reg.start + offset, len }
}

fn with_depth(node: &Composition, depth: usize) -> Composition {
    match node.clone() {
        Composition::Leaf { .. } => Composition::Leaf { depth },
        Composition::Remainder { s_depth, t_depth, arith_depth, s, t, .. } => Composition::Remainder { s_depth, t_depth, arith_depth, depth, s, t },
    }
}

/// Append the stored uncomputation so every ancilla returns to |0⟩.
/// Idempotent: a clean circuit is returned unchanged.
pub fn reset_ancillas(c: &CoeffCircuit) -> CoeffCircuit {
    if c.is_clean() {
        return c.clone();
    }
    let mut circ = (*c.circuit).clone();
    circ.append(&c.uncompute);
    let depth = circ.depth();
    CoeffCircuit {
        circuit: Arc::new(circ),
        uncompute: Arc::new(Circuit::new(c.circuit.num_qubits)),
        node: with_depth(&c.node, depth),
        ..c.clone()
    }
}

fn compatible(s: &CoeffCircuit, t: &CoeffCircuit) -> Result<(), QpolyError> {
    if s.basis != CoeffBasis::Monomial || t.basis != CoeffBasis::Monomial {
        return Err(QpolyError::Precondition("remainder circuits need monomial-basis coefficients".into()));
    }
    if s.word_bits != t.word_bits || s.degree.len != t.degree.len || s.var != t.var {
        return Err(QpolyError::Mismatch("word width, exponent width or variable differ".into()));
    }
    let shape = |c: &CoeffCircuit| c.inputs.iter().map(|(n, r)| (n.clone(), r.len)).collect::<Vec<_>>();
    if shape(s) != shape(t) {
        return Err(QpolyError::Mismatch("input registers differ".into()));
    }
    Ok(())
}

/// Coefficient circuit of the pseudo-division step
/// R = lc(T)·S − lc(S)·T·y^(Ds−Dt), assembled from the coefficient circuits
/// of S and T:  r_d = s_d·t_Dt − t_(d+Dt−Ds)·s_Ds, with t at a negative index
/// treated as 0.  Uses two calls each to U_Sy ("U_S") and U_Ty ("U_T").
pub fn build_remainder_circuit(usy: &CoeffCircuit, uty: &CoeffCircuit, ds: usize, dt: usize) -> Result<CoeffCircuit, QpolyError> {
    if dt < 1 || ds < dt {
        return Err(QpolyError::Precondition(format!("need Ds={ds} >= Dt={dt} >= 1")));
    }
    compatible(usy, uty)?;
    let db = usy.degree.len;
    if bits_for(ds as u64) > db {
        return Err(QpolyError::Capacity(format!("exponent register of {db} bits cannot hold {ds}")));
    }
    let s = reset_ancillas(usy);
    let t = reset_ancillas(uty);
    let w = s.word_bits;

    let mut c = Circuit::new(0);
    let d = c.add_register("d", db);
    let inputs: Vec<(String, Register)> = s.inputs.iter().map(|(n, r)| (n.clone(), c.add_register(n.clone(), r.len))).collect();
    let out = c.add_register("out", w);
    let anc = |x: &CoeffCircuit| x.ancillas.iter().map(|a| a.len).sum::<usize>();
    let pool_len = anc(&s).max(anc(&t));
    let pool = (pool_len > 0).then(|| c.add_register("pool", pool_len));
    let ds_reg = c.add_register("Ds", db);
    let dt_reg = c.add_register("Dt", db);
    let shifted = c.add_register("d+Dt-Ds", db + 1);
    let s_d = c.add_register("s_d", w);
    let s_top = c.add_register("s_Ds", w);
    let t_top = c.add_register("t_Dt", w);
    let t_sh = c.add_register("t_shift", w);
    let mut ancillas = Vec::new();
    ancillas.extend(pool.clone());
    ancillas.extend([ds_reg.clone(), dt_reg.clone(), shifted.clone(), s_d.clone(), s_top.clone(), t_top.clone(), t_sh.clone()]);

    let map_for = |x: &CoeffCircuit, index: &Register, output: &Register| {
        let mut pairs = vec![(x.degree.clone(), index.clone())];
        pairs.extend(x.inputs.iter().zip(&inputs).map(|((_, a), (_, b))| (a.clone(), b.clone())));
        pairs.push((x.output.clone(), output.clone()));
        let mut off = 0;
        for a in &x.ancillas {
            pairs.push((a.clone(), slice(pool.as_ref().expect("pool"), off, a.len)));
            off += a.len;
        }
        qubit_map(x.circuit.num_qubits, &pairs)
    };

    let mut garbage = Circuit::new(c.num_qubits);
    garbage.set_const(&ds_reg, ds as u64);
    garbage.set_const(&dt_reg, dt as u64);
    for i in 0..db {
        garbage.cx(vec![Control::on(d.qubit(i))], shifted.qubit(i));
    }
    append_qft(&mut garbage, &shifted.qubits());
    let delta = BigInt::from(dt as i64 - ds as i64);
    append_fourier_add(&mut garbage, &shifted.qubits(), residue(&delta, db + 1) as u128, &[]);
    append_iqft(&mut garbage, &shifted.qubits());
    let index_arith_depth = garbage.depth();
    garbage.call(Some("U_S"), &s.circuit, map_for(&s, &d, &s_d), Vec::new(), false);
    garbage.call(Some("U_S"), &s.circuit, map_for(&s, &ds_reg, &s_top), Vec::new(), false);
    garbage.call(Some("U_T"), &t.circuit, map_for(&t, &dt_reg, &t_top), Vec::new(), false);
    garbage.call(Some("U_T"), &t.circuit, map_for(&t, &slice(&shifted, 0, db), &t_sh), vec![Control::off(shifted.qubit(db))], false);
    c.append(&garbage);

    let mut arith = Circuit::new(c.num_qubits);
    append_qft(&mut arith, &out.qubits());
    append_mac(&mut arith, &s_d, &t_top, &out, false, &[]);
    append_mac(&mut arith, &t_sh, &s_top, &out, true, &[]);
    append_iqft(&mut arith, &out.qubits());
    c.append(&arith);

    let depth = c.depth();
    let node = Composition::Remainder {
        s_depth: s.node.depth(),
        t_depth: t.node.depth(),
        arith_depth: arith.depth() + index_arith_depth,
        depth,
        s: Box::new(s.node.clone()),
        t: Box::new(t.node.clone()),
    };
    Ok(CoeffCircuit {
        uncompute: Arc::new(garbage.inverse()),
        circuit: Arc::new(c),
        degree: d,
        inputs,
        output: out,
        ancillas,
        word_bits: w,
        var: s.var.clone(),
        degree_bound: ds - 1,
        basis: CoeffBasis::Monomial,
        scale: &s.scale * &t.scale,
        node,
    })
}
