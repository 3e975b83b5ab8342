use serde::Serialize;
use serde_json::{json, Value};

use super::{PolyError, Polynomial, VariableId};

/// One fraction-free division step: lc(T,y)·S − lc(S,y)·T·y^(Ds−Dt).
pub fn pseudo_step(s: &Polynomial, t: &Polynomial, y: VariableId) -> Result<Polynomial, PolyError> {
    let dt = t.degree_in(y).unwrap_or(0);
    let ds = s.degree_in(y).unwrap_or(0);
    if dt < 1 || ds < dt {
        return Err(PolyError::Precondition(format!("pseudo_step needs deg(S)={ds} >= deg(T)={dt} >= 1 in {}", s.vars()[y])));
    }
    let left = t.lc(y).mul(s)?;
    let right = s.lc(y).mul(t)?.mul_var_pow(y, ds - dt);
    left.sub(&right)
}

/// Pseudo-remainder with its bookkeeping.  With k = steps.len() the identity
/// multiplier^k · S = quotient · T + remainder holds.
#[derive(Clone, Debug, PartialEq)]
pub struct Prem {
    pub remainder: Polynomial,
    pub steps: Vec<Polynomial>,
    pub quotient: Polynomial,
    pub multiplier: Polynomial,
}

pub fn prem(s: &Polynomial, t: &Polynomial, y: VariableId) -> Result<Prem, PolyError> {
    let dt = t.degree_in(y).unwrap_or(0);
    if dt < 1 {
        return Err(PolyError::Precondition(format!("divisor has degree 0 in {}", t.vars()[y])));
    }
    s.check(t)?;
    let lc_t = t.lc(y);
    let mut r = s.clone();
    let mut q = Polynomial::zero(s.vars());
    let mut steps = Vec::new();
    while let Some(dr) = r.degree_in(y).filter(|&d| d >= dt) {
        q = lc_t.mul(&q)?.add(&r.lc(y).mul_var_pow(y, dr - dt))?;
        r = pseudo_step(&r, t, y)?;
        steps.push(r.clone());
    }
    Ok(Prem { remainder: r, steps, quotient: q, multiplier: lc_t })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainElement {
    pub poly: Polynomial,
    pub lead_var: VariableId,
}

/// Hypotheses in triangular form, ordered by the dependent-variable order.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularSystem {
    pub chain: Vec<ChainElement>,
    /// Reduced hypotheses left without any dependent variable.
    pub residual: Vec<Polynomial>,
}

/// Bring `hyps` into triangular form.  Works from the last dependent variable
/// down: the candidate of least positive degree becomes the pivot and the
/// others are pseudo-reduced by it until one polynomial remains.
pub fn triangulate(hyps: &[Polynomial], dep_order: &[VariableId]) -> Result<TriangularSystem, PolyError> {
    if let Some(first) = hyps.first() {
        for h in hyps {
            first.check(h)?;
        }
    }
    if hyps.iter().any(Polynomial::is_zero) {
        return Err(PolyError::Degenerate("zero hypothesis polynomial".into()));
    }
    let mut pool: Vec<Polynomial> = hyps.to_vec();
    let mut chain = Vec::new();
    for &v in dep_order.iter().rev() {
        let (mut cands, rest): (Vec<_>, Vec<_>) = pool.into_iter().partition(|p| p.involves(v));
        pool = rest;
        if cands.is_empty() {
            let name = hyps.first().map(|h| h.vars()[v].clone()).unwrap_or_else(|| format!("#{v}"));
            return Err(PolyError::Degenerate(format!("no hypothesis determines {name}")));
        }
        while cands.len() > 1 {
            let pivot_at = (0..cands.len())
                .min_by_key(|&i| (cands[i].degree_in(v), cands[i].num_terms(), i))
                .expect("nonempty");
            let pivot = cands.swap_remove(pivot_at);
            let mut next = vec![pivot.clone()];
            for c in cands {
                let r = prem(&c, &pivot, v)?.remainder;
                if r.is_zero() {
                    continue;
                }
                if r.involves(v) {
                    next.push(r);
                } else {
                    pool.push(r);
                }
            }
            cands = next;
        }
        chain.push(ChainElement { poly: cands.pop().expect("one candidate"), lead_var: v });
    }
    chain.reverse();
    Ok(TriangularSystem { chain, residual: pool })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WuVerdict {
    Proved,
    NotReduced,
}

/// One pseudo-division step of the conclusion reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct WuStep {
    pub var: VariableId,
    /// Index into the triangular chain.
    pub divisor: usize,
    pub remainder: Polynomial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WuProof {
    pub conclusion: Polynomial,
    pub triangular: TriangularSystem,
    pub steps: Vec<WuStep>,
    pub side_conditions: Vec<Polynomial>,
    pub verdict: WuVerdict,
    pub max_monomials: usize,
}

impl WuProof {
    pub fn remainder_chain(&self) -> Vec<&Polynomial> {
        self.steps.iter().map(|s| &s.remainder).collect()
    }

    pub fn final_remainder(&self) -> &Polynomial {
        self.steps.last().map(|s| &s.remainder).unwrap_or(&self.conclusion)
    }

    /// Recompute every step from its predecessor.
    pub fn replay(&self) -> bool {
        let mut prev = &self.conclusion;
        for s in &self.steps {
            match pseudo_step(prev, &self.triangular.chain[s.divisor].poly, s.var) {
                Ok(r) if r == s.remainder => prev = &s.remainder,
                _ => return false,
            }
        }
        (self.verdict == WuVerdict::Proved) == prev.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict,
            "remainder_chain": self.steps.iter().map(|s| {
                let mut v = s.remainder.to_json();
                v["var"] = json!(s.remainder.vars()[s.var]);
                v
            }).collect::<Vec<_>>(),
            "side_conditions": self.side_conditions.iter().map(Polynomial::to_json).collect::<Vec<_>>(),
            "max_monomials": self.max_monomials,
        })
    }
}

/// Reduce `conclusion` by the triangulated hypotheses, last dependent
/// variable first.
pub fn wu_prove(hyps: &[Polynomial], dep_order: &[VariableId], conclusion: &Polynomial) -> Result<WuProof, PolyError> {
    let triangular = triangulate(hyps, dep_order)?;
    reduce(triangular, conclusion)
}

/// Successive pseudo-division of `conclusion` by an existing chain.
pub fn reduce(triangular: TriangularSystem, conclusion: &Polynomial) -> Result<WuProof, PolyError> {
    let mut steps = Vec::new();
    let mut side_conditions: Vec<Polynomial> = Vec::new();
    let mut r = conclusion.clone();
    for (idx, el) in triangular.chain.iter().enumerate().rev() {
        let p = prem(&r, &el.poly, el.lead_var)?;
        if !p.steps.is_empty() && !side_conditions.contains(&p.multiplier) {
            side_conditions.push(p.multiplier.clone());
        }
        steps.extend(p.steps.into_iter().map(|remainder| WuStep { var: el.lead_var, divisor: idx, remainder }));
        r = p.remainder;
    }
    let max_monomials = steps.iter().map(|s| s.remainder.num_terms()).max().unwrap_or(0);
    let verdict = if r.is_zero() { WuVerdict::Proved } else { WuVerdict::NotReduced };
    Ok(WuProof { conclusion: conclusion.clone(), triangular, steps, side_conditions, verdict, max_monomials })
}
