use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::arith::{append_mac, append_table_load};
use super::remainder::{qubit_map, reset_ancillas};
use super::{bits_for, residue, CoeffBasis, CoeffCircuit, Composition, PolyCircuit, QpolyError};
use crate::poly::VariableId;
use crate::qsim::{append_iqft, append_qft, Circuit, Register};

fn choose(n: usize, k: usize) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        binomial(BigInt::from(n), BigInt::from(k))
    }
}

/// Binary Kravchuk polynomial K_d(y; D) = Σ_j (−1)^j C(y,j) C(D−y, d−j).
pub fn kravchuk(d: usize, y: usize, big_d: usize) -> Result<BigInt, QpolyError> {
    if d > big_d || y > big_d {
        return Err(QpolyError::Range(format!("K_{d}({y}; {big_d}) needs d, y <= D")));
    }
    let mut s = BigInt::zero();
    for j in 0..=d.min(y) {
        let t = choose(y, j) * choose(big_d - y, d - j);
        if j % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    Ok(s)
}

/// C(D,e)·K_d(e; D): weight of S(e) in the coefficient c_d.
pub fn kravchuk_weight(d: usize, e: usize, big_d: usize) -> Result<BigInt, QpolyError> {
    Ok(choose(big_d, e) * kravchuk(d, e, big_d)?)
}

/// Unnormalized Kravchuk coefficients c_d = Σ_e C(D,e) K_d(e) S(e) of the
/// values S(0..=D).
pub fn kravchuk_coefficients(values: &[BigInt]) -> Result<Vec<BigInt>, QpolyError> {
    let big_d = values.len().checked_sub(1).ok_or_else(|| QpolyError::Input("no values".into()))?;
    (0..=big_d)
        .map(|d| {
            let mut s = BigInt::zero();
            for (e, v) in values.iter().enumerate() {
                s += kravchuk_weight(d, e, big_d)? * v;
            }
            Ok(s)
        })
        .collect()
}

/// Inverse transform: S(y) = Σ_d c_d K_d(y) / (2^D C(D,d)).
pub fn kravchuk_reconstruct(coeffs: &[BigInt], y: usize) -> Result<BigRational, QpolyError> {
    let big_d = coeffs.len().checked_sub(1).ok_or_else(|| QpolyError::Input("no coefficients".into()))?;
    let mut s = BigRational::zero();
    for (d, c) in coeffs.iter().enumerate() {
        let den = (BigInt::one() << big_d) * choose(big_d, d);
        s += BigRational::new(c * kravchuk(d, y, big_d)?, den);
    }
    Ok(s)
}

/// Integer matrix N and denominator q with a_k = (Σ_e N[k][e]·c_e) / q, where
/// a_k are the monomial coefficients of a degree-≤D polynomial and c_e its
/// Kravchuk coefficients.
pub fn monomial_conversion(big_d: usize) -> Result<(Vec<Vec<BigInt>>, BigInt), QpolyError> {
    let n = big_d + 1;
    // c = W·V·a with W[d][e] = C(D,e)K_d(e), V[e][k] = e^k.
    let mut m: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for d in 0..n {
        let mut row = Vec::with_capacity(2 * n);
        for k in 0..n {
            let mut s = BigInt::zero();
            for e in 0..n {
                s += kravchuk_weight(d, e, big_d)? * BigInt::from(e).pow(k as u32);
            }
            row.push(BigRational::from_integer(s));
        }
        for j in 0..n {
            row.push(if j == d { BigRational::one() } else { BigRational::zero() });
        }
        m.push(row);
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or_else(|| QpolyError::Range("singular transform".into()))?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, pv) in m[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * pv;
                }
            }
        }
    }
    let inv: Vec<Vec<BigRational>> = m.into_iter().map(|row| row[n..].to_vec()).collect();
    let den = inv.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let num = inv.iter().map(|row| row.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
    Ok((num, den.abs()))
}

fn weight_table(big_d: usize, e: usize, w: usize, f: impl Fn(usize, usize) -> Result<BigInt, QpolyError>) -> Result<Vec<(u64, u64)>, QpolyError> {
    (0..=big_d)
        .map(|d| Ok((d as u64, residue(&f(d, e)?, w))))
        .filter(|r: &Result<(u64, u64), QpolyError>| !matches!(r, Ok((_, 0))))
        .collect()
}

/// Kravchuk coefficient circuit built from an evaluation oracle U_S for
/// S(x, y) of degree ≤ D in y.  Makes exactly D+1 calls to U_S (label
/// "U_S"), at y = 0..=D, then forms c_d = Σ_e W_e(d)·S(x,e) with data-driven
/// weight loads and Fourier multiply-accumulate.
pub fn build_coeff_circuit(us: &PolyCircuit, y: VariableId, big_d: usize) -> Result<CoeffCircuit, QpolyError> {
    let (y_name, y_reg) = us.inputs.get(y).cloned().ok_or_else(|| QpolyError::Range(format!("input {y} out of range")))?;
    if bits_for(big_d as u64) > y_reg.len {
        return Err(QpolyError::Capacity(format!("y register of {} bits cannot hold {big_d}", y_reg.len)));
    }
    if bits_for(big_d as u64) > us.degree_bits {
        return Err(QpolyError::Capacity(format!("exponent register of {} bits cannot hold {big_d}", us.degree_bits)));
    }
    let w = us.word_bits;
    let mut c = Circuit::new(0);
    let d = c.add_register("d", us.degree_bits);
    let inputs: Vec<(String, Register)> =
        us.inputs.iter().enumerate().filter(|(i, _)| *i != y).map(|(_, (n, r))| (n.clone(), c.add_register(n.clone(), r.len))).collect();
    let out = c.add_register("out", w);
    let mut ancillas = Vec::new();
    let mut calls = Vec::new();
    for e in 0..=big_d {
        let ye = c.add_register(format!("{y_name}={e}"), y_reg.len);
        let ve = c.add_register(format!("S({e})"), w);
        let mut pairs: Vec<(Register, Register)> = Vec::new();
        for (i, (_, r)) in us.inputs.iter().enumerate() {
            let target = if i == y { ye.clone() } else { inputs.iter().find(|(n, _)| *n == us.inputs[i].0).expect("same names").1.clone() };
            pairs.push((r.clone(), target));
        }
        pairs.push((us.output.clone(), ve.clone()));
        for a in &us.ancillas {
            let pa = c.add_register(format!("{}#{e}", a.name), a.len);
            pairs.push((a.clone(), pa.clone()));
            ancillas.push(pa);
        }
        calls.push((e, ye.clone(), ve.clone(), qubit_map(us.circuit.num_qubits, &pairs)));
        ancillas.push(ye);
        ancillas.push(ve);
    }
    let wt = c.add_register("weight", w);
    ancillas.push(wt.clone());

    let mut garbage = Circuit::new(c.num_qubits);
    for (e, ye, _, map) in &calls {
        garbage.set_const(ye, *e as u64);
        garbage.call(Some("U_S"), &us.circuit, map.clone(), Vec::new(), false);
    }
    c.append(&garbage);
    append_qft(&mut c, &out.qubits());
    for (e, _, ve, _) in &calls {
        let table = weight_table(big_d, *e, w, |dd, ee| kravchuk_weight(dd, ee, big_d))?;
        append_table_load(&mut c, &d, &wt, &table);
        append_mac(&mut c, &wt, ve, &out, false, &[]);
        append_table_load(&mut c, &d, &wt, &table);
    }
    append_iqft(&mut c, &out.qubits());
    let depth = c.depth();
    Ok(CoeffCircuit {
        uncompute: Arc::new(garbage.inverse()),
        circuit: Arc::new(c),
        degree: d,
        inputs,
        output: out,
        ancillas,
        word_bits: w,
        var: y_name,
        degree_bound: big_d,
        basis: CoeffBasis::Kravchuk,
        scale: BigInt::one(),
        node: Composition::Leaf { depth },
    })
}

/// Convert a Kravchuk coefficient circuit to the monomial basis.  Calls the
/// (reset) Kravchuk circuit at d = 0..=D and recombines with the integer
/// matrix of `monomial_conversion`; the output is q·a_d mod 2^w with q
/// recorded as `scale`.
pub fn kravchuk_to_monomial(kc: &CoeffCircuit) -> Result<CoeffCircuit, QpolyError> {
    if kc.basis != CoeffBasis::Kravchuk {
        return Err(QpolyError::Precondition("circuit is not in the Kravchuk basis".into()));
    }
    let kc = reset_ancillas(kc);
    let big_d = kc.degree_bound;
    let (num, den) = monomial_conversion(big_d)?;
    let w = kc.word_bits;
    let mut c = Circuit::new(0);
    let d = c.add_register("d", kc.degree.len);
    let inputs: Vec<(String, Register)> = kc.inputs.iter().map(|(n, r)| (n.clone(), c.add_register(n.clone(), r.len))).collect();
    let out = c.add_register("out", w);
    let mut ancillas = Vec::new();
    let pool: Vec<(Register, Register)> = kc.ancillas.iter().map(|a| (a.clone(), c.add_register(format!("pool:{}", a.name), a.len))).collect();
    ancillas.extend(pool.iter().map(|(_, p)| p.clone()));
    let mut calls = Vec::new();
    for e in 0..=big_d {
        let de = c.add_register(format!("d={e}"), kc.degree.len);
        let ke = c.add_register(format!("c({e})"), w);
        let mut pairs = vec![(kc.degree.clone(), de.clone())];
        pairs.extend(kc.inputs.iter().zip(&inputs).map(|((_, a), (_, b))| (a.clone(), b.clone())));
        pairs.push((kc.output.clone(), ke.clone()));
        pairs.extend(pool.iter().cloned());
        calls.push((e, de.clone(), ke.clone(), qubit_map(kc.circuit.num_qubits, &pairs)));
        ancillas.push(de);
        ancillas.push(ke);
    }
    let wt = c.add_register("weight", w);
    ancillas.push(wt.clone());

    let mut garbage = Circuit::new(c.num_qubits);
    for (e, de, _, map) in &calls {
        garbage.set_const(de, *e as u64);
        garbage.call(None, &kc.circuit, map.clone(), Vec::new(), false);
    }
    c.append(&garbage);
    append_qft(&mut c, &out.qubits());
    for (e, _, ke, _) in &calls {
        let table = weight_table(big_d, *e, w, |k, ee| Ok(num[k][ee].clone()))?;
        append_table_load(&mut c, &d, &wt, &table);
        append_mac(&mut c, &wt, ke, &out, false, &[]);
        append_table_load(&mut c, &d, &wt, &table);
    }
    append_iqft(&mut c, &out.qubits());
    let depth = c.depth();
    Ok(CoeffCircuit {
        uncompute: Arc::new(garbage.inverse()),
        circuit: Arc::new(c),
        degree: d,
        inputs,
        output: out,
        ancillas,
        word_bits: w,
        var: kc.var.clone(),
        degree_bound: big_d,
        basis: CoeffBasis::Monomial,
        scale: den,
        node: Composition::Leaf { depth },
    })
}
