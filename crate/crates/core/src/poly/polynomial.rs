use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::PolyError;

pub type VariableId = usize;

/// Shared variable list; polynomials combine only over identical lists.
pub type Vars = Arc<[String]>;

pub fn vars(names: &[&str]) -> Vars {
    names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
}

/// Exponent vector, ordered graded-lexicographically (total degree first,
/// then the earlier variable's exponent).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with arbitrary-precision integer
/// coefficients.  No zero coefficient is ever stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial { vars: Arc::clone(vars), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: impl Into<BigInt>) -> Self {
        Self::from_terms(vars, [(vec![0; vars.len()], c.into())])
    }

    pub fn variable(vars: &Vars, id: VariableId) -> Self {
        let mut e = vec![0; vars.len()];
        e[id] = 1;
        Self::from_terms(vars, [(e, BigInt::one())])
    }

    /// Like terms are combined; zero sums are dropped.
    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn var_id(&self, name: &str) -> Option<VariableId> {
        self.vars.iter().position(|v| v == name)
    }

    /// Terms in descending term order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().rev().map(|(m, c)| (m.0.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant term (zero when absent).
    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Monomial(vec![0; self.vars.len()])).cloned().unwrap_or_default()
    }

    /// None for the zero polynomial.
    pub fn degree_in(&self, y: VariableId) -> Option<u32> {
        self.terms.keys().map(|m| m.0[y]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn involves(&self, y: VariableId) -> bool {
        self.degree_in(y).is_some_and(|d| d > 0)
    }

    /// Coefficient of y^d, as a polynomial free of y.
    pub fn coeff_in(&self, y: VariableId, d: u32) -> Polynomial {
        let terms = self.terms.iter().filter(|(m, _)| m.0[y] == d).map(|(m, c)| {
            let mut e = m.0.clone();
            e[y] = 0;
            (e, c.clone())
        });
        Self::from_terms(&self.vars, terms)
    }

    /// Leading coefficient with respect to y (zero for the zero polynomial).
    pub fn lc(&self, y: VariableId) -> Polynomial {
        match self.degree_in(y) {
            Some(d) => self.coeff_in(y, d),
            None => Self::zero(&self.vars),
        }
    }

    pub fn mul_var_pow(&self, y: VariableId, k: u32) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = m.0.clone();
            e[y] += k;
            (e, c.clone())
        });
        Self::from_terms(&self.vars, terms)
    }

    pub fn scale(&self, k: &BigInt) -> Polynomial {
        Self::from_terms(&self.vars, self.terms.iter().map(|(m, c)| (m.0.clone(), c * k)))
    }

    pub(crate) fn check(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::OrderingMismatch { left: self.vars.join(","), right: other.vars.join(",") })
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut p = Self::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let e = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                p.add_term(Monomial(e), c1 * c2);
            }
        }
        Ok(p)
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut p = Self::constant(&self.vars, 1);
        for _ in 0..k {
            p = p.mul(self).expect("same ordering");
        }
        p
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { vars: Arc::clone(&self.vars), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    /// Exact value at `point`; every variable occurring in the polynomial
    /// must be assigned.
    pub fn evaluate(&self, point: &BTreeMap<VariableId, BigInt>) -> Result<BigInt, PolyError> {
        if let Some(v) = (0..self.vars.len()).find(|&v| self.involves(v) && !point.contains_key(&v)) {
            return Err(PolyError::MissingVariable(self.vars[v].clone()));
        }
        let zero = BigInt::zero();
        Ok(self.eval_with(|v| point.get(&v).unwrap_or(&zero)))
    }

    /// Value at a full assignment indexed by variable id.
    pub fn eval_at(&self, values: &[BigInt]) -> BigInt {
        assert_eq!(values.len(), self.vars.len(), "assignment length");
        self.eval_with(|v| &values[v])
    }

    fn eval_with<'a>(&self, val: impl Fn(VariableId) -> &'a BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= val(v).pow(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-express over a larger variable list containing all used names.
    pub fn with_vars(&self, target: &Vars) -> Result<Polynomial, PolyError> {
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.iter().enumerate() {
            match target.iter().position(|t| t == name) {
                Some(j) => map.push(Some(j)),
                None if self.involves(i) => return Err(PolyError::UnknownVariable(name.clone())),
                None => map.push(None),
            }
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] = x;
                }
            }
            (e, c.clone())
        });
        Ok(Self::from_terms(target, terms))
    }

    /// {"poly": text, "terms": [[coeff, {var: exp}], ...]}
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(e, c)| {
                let exps: serde_json::Map<String, Value> =
                    e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(v, &x)| (self.vars[v].clone(), json!(x))).collect();
                json!([c.to_string(), exps])
            })
            .collect();
        json!({"poly": self.to_string(), "terms": terms})
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for (v, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.vars[v].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[v], x)),
                }
            }
            let mag = c.abs();
            let body = if factors.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", mag, factors.join("*"))
            };
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}
