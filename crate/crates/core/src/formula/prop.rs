use std::collections::{HashMap, HashSet};
use std::fmt;

use super::sexpr::{parse_all, syntax, SExpr};
use super::FormulaError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropFormula {
    Var(String),
    Not(Box<PropFormula>),
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn var(name: &str) -> Self {
        PropFormula::Var(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PropFormula) -> Self {
        PropFormula::Not(Box::new(f))
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> bool) -> bool {
        match self {
            PropFormula::Var(v) => env(v),
            PropFormula::Not(f) => !f.eval(env),
            PropFormula::And(fs) => fs.iter().all(|f| f.eval(env)),
            PropFormula::Or(fs) => fs.iter().any(|f| f.eval(env)),
            PropFormula::Implies(a, b) => !a.eval(env) || b.eval(env),
        }
    }

    /// Variable names in order of first appearance.
    pub fn vars(&self) -> Vec<String> {
        fn go(f: &PropFormula, out: &mut Vec<String>) {
            match f {
                PropFormula::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone())
                    }
                }
                PropFormula::Not(f) => go(f, out),
                PropFormula::And(fs) | PropFormula::Or(fs) => fs.iter().for_each(|f| go(f, out)),
                PropFormula::Implies(a, b) => {
                    go(a, out);
                    go(b, out)
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "and" | "or" | "not" | "implies" | "forall" | "exists")
}

pub(crate) fn prop_from_sexpr(e: &SExpr) -> Result<PropFormula, FormulaError> {
    match e {
        SExpr::Atom(a, sp) => {
            if is_keyword(a) {
                Err(syntax(*sp, format!("connective '{a}' used as a variable")))
            } else {
                Ok(PropFormula::Var(a.clone()))
            }
        }
        SExpr::List(items, sp) => {
            let (head, rest) = items.split_first().ok_or_else(|| syntax(*sp, "empty list"))?;
            let op = head.as_atom().ok_or_else(|| syntax(head.span(), "expected operator"))?;
            let kids = || rest.iter().map(prop_from_sexpr).collect::<Result<Vec<_>, _>>();
            match op {
                "and" => Ok(PropFormula::And(kids()?)),
                "or" => Ok(PropFormula::Or(kids()?)),
                "not" => match rest {
                    [x] => Ok(PropFormula::not(prop_from_sexpr(x)?)),
                    _ => Err(syntax(*sp, "'not' takes one argument")),
                },
                "implies" => match rest {
                    [a, b] => Ok(PropFormula::Implies(Box::new(prop_from_sexpr(a)?), Box::new(prop_from_sexpr(b)?))),
                    _ => Err(syntax(*sp, "'implies' takes two arguments")),
                },
                "forall" | "exists" => Err(syntax(*sp, format!("quantifier '{op}' in propositional input"))),
                other => Err(FormulaError::UnknownOperator { op: other.to_string(), line: sp.line, col: sp.col }),
            }
        }
    }
}

/// Parse a single propositional formula.
pub fn parse_prop(text: &str) -> Result<PropFormula, FormulaError> {
    let forms = parse_all(text)?;
    match forms.as_slice() {
        [one] => prop_from_sexpr(one),
        [] => Err(FormulaError::Syntax { line: 1, col: 1, msg: "empty input".into() }),
        [_, second, ..] => Err(syntax(second.span(), "trailing input after formula")),
    }
}

/// Polarity of one variable inside a clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Absent,
    Pos,
    Neg,
}

/// Positional clause: one polarity slot per vocabulary variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    lits: Vec<Polarity>,
}

impl Clause {
    pub fn empty(n: usize) -> Self {
        Clause { lits: vec![Polarity::Absent; n] }
    }

    /// Build from (variable, positive?) literals; None if tautological.
    pub fn from_literals(n: usize, lits: &[(usize, bool)]) -> Option<Self> {
        let mut c = Clause::empty(n);
        for &(v, pos) in lits {
            let p = if pos { Polarity::Pos } else { Polarity::Neg };
            match c.lits[v] {
                Polarity::Absent => c.lits[v] = p,
                q if q == p => {}
                _ => return None,
            }
        }
        Some(c)
    }

    pub fn from_polarities(lits: Vec<Polarity>) -> Self {
        Clause { lits }
    }

    pub fn num_vars(&self) -> usize {
        self.lits.len()
    }

    pub fn get(&self, v: usize) -> Polarity {
        self.lits[v]
    }

    pub fn set(&mut self, v: usize, p: Polarity) {
        self.lits[v] = p;
    }

    pub fn polarities(&self) -> &[Polarity] {
        &self.lits
    }

    pub fn is_empty(&self) -> bool {
        self.lits.iter().all(|&p| p == Polarity::Absent)
    }

    pub fn len(&self) -> usize {
        self.lits.iter().filter(|&&p| p != Polarity::Absent).count()
    }

    /// Literals as (variable, positive?).
    pub fn literals(&self) -> Vec<(usize, bool)> {
        self.lits
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Polarity::Absent)
            .map(|(i, p)| (i, *p == Polarity::Pos))
            .collect()
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.literals().iter().any(|&(v, pos)| assignment[v] == pos)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ClauseDisplay<'a> {
        ClauseDisplay { clause: self, names }
    }
}

pub struct ClauseDisplay<'a> {
    clause: &'a Clause,
    names: &'a [String],
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clause.is_empty() {
            return write!(f, "⊥");
        }
        let parts: Vec<String> = self
            .clause
            .literals()
            .iter()
            .map(|&(v, pos)| {
                let name = self.names.get(v).cloned().unwrap_or_else(|| format!("v{v}"));
                if pos {
                    name
                } else {
                    format!("¬{name}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" ∨ "))
    }
}

/// Ordered, duplicate-free clause list over a frozen vocabulary.
#[derive(Clone, Debug, Default)]
pub struct ClauseSet {
    clauses: Vec<Clause>,
    seen: HashSet<Clause>,
    names: Vec<String>,
}

impl PartialEq for ClauseSet {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses && self.names == other.names
    }
}

impl ClauseSet {
    pub fn new(names: Vec<String>) -> Self {
        ClauseSet { clauses: Vec::new(), seen: HashSet::new(), names }
    }

    /// Build from literal lists; tautologies are dropped, duplicates merged.
    pub fn from_literal_lists(names: Vec<String>, lists: &[Vec<(usize, bool)>]) -> Self {
        let n = names.len();
        let mut cs = ClauseSet::new(names);
        for l in lists {
            if let Some(c) = Clause::from_literals(n, l) {
                cs.push(c);
            }
        }
        cs
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn get(&self, i: usize) -> &Clause {
        &self.clauses[i]
    }

    pub fn contains(&self, c: &Clause) -> bool {
        self.seen.contains(c)
    }

    /// Append unless already present; returns whether it was added.
    pub fn push(&mut self, c: Clause) -> bool {
        assert_eq!(c.num_vars(), self.num_vars(), "clause over a different vocabulary");
        if self.seen.contains(&c) {
            return false;
        }
        self.seen.insert(c.clone());
        self.clauses.push(c);
        true
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn show(&self, c: &Clause) -> String {
        c.display(&self.names).to_string()
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    /// Brute-force satisfiability (test oracle; N ≤ 20).
    pub fn is_satisfiable_brute_force(&self) -> bool {
        let n = self.num_vars();
        assert!(n <= 20);
        (0u32..1 << n).any(|m| {
            let a: Vec<bool> = (0..n).map(|i| (m >> i) & 1 == 1).collect();
            self.eval(&a)
        })
    }
}

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.clauses.iter().map(|c| format!("{{{}}}", self.show(c))).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Push negations to the atoms and remove implications.
fn nnf(f: &PropFormula, negate: bool) -> PropFormula {
    match f {
        PropFormula::Var(_) => {
            if negate {
                PropFormula::not(f.clone())
            } else {
                f.clone()
            }
        }
        PropFormula::Not(g) => nnf(g, !negate),
        PropFormula::And(fs) => {
            let kids = fs.iter().map(|g| nnf(g, negate)).collect();
            if negate {
                PropFormula::Or(kids)
            } else {
                PropFormula::And(kids)
            }
        }
        PropFormula::Or(fs) => {
            let kids = fs.iter().map(|g| nnf(g, negate)).collect();
            if negate {
                PropFormula::And(kids)
            } else {
                PropFormula::Or(kids)
            }
        }
        PropFormula::Implies(a, b) => {
            let as_or = PropFormula::Or(vec![PropFormula::not((**a).clone()), (**b).clone()]);
            nnf(&as_or, negate)
        }
    }
}

type Lit = (String, bool);

fn distribute(f: &PropFormula) -> Vec<Vec<Lit>> {
    match f {
        PropFormula::Var(v) => vec![vec![(v.clone(), true)]],
        PropFormula::Not(g) => match &**g {
            PropFormula::Var(v) => vec![vec![(v.clone(), false)]],
            _ => unreachable!("input is in negation normal form"),
        },
        PropFormula::And(fs) => fs.iter().flat_map(distribute).collect(),
        PropFormula::Or(fs) => {
            let mut acc: Vec<Vec<Lit>> = vec![vec![]];
            for g in fs {
                let cg = distribute(g);
                let mut next = Vec::with_capacity(acc.len() * cg.len());
                for a in &acc {
                    for b in &cg {
                        let mut c = a.clone();
                        c.extend(b.iter().cloned());
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        }
        PropFormula::Implies(..) => unreachable!("implications removed by nnf"),
    }
}

/// Clause form of `f`.  Names already in `vocab` keep their index; new names
/// are appended in order of first appearance.  Tautologies are dropped.
pub fn to_cnf(f: &PropFormula, vocab: Option<&[String]>) -> ClauseSet {
    let mut names: Vec<String> = vocab.map(|v| v.to_vec()).unwrap_or_default();
    for v in f.vars() {
        if !names.contains(&v) {
            names.push(v);
        }
    }
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let lists: Vec<Vec<(usize, bool)>> = distribute(&nnf(f, false))
        .into_iter()
        .map(|c| c.into_iter().map(|(v, s)| (index[v.as_str()], s)).collect())
        .collect();
    ClauseSet::from_literal_lists(names.clone(), &lists)
}

/// A propositional problem: axioms plus an optional goal to refute.
#[derive(Clone, Debug, PartialEq)]
pub struct PropProblem {
    pub axioms: Vec<PropFormula>,
    pub goal: Option<PropFormula>,
}

impl PropProblem {
    /// KB ∧ ¬goal (or just KB).
    pub fn refutation_formula(&self) -> PropFormula {
        let mut parts = self.axioms.clone();
        if let Some(g) = &self.goal {
            parts.push(PropFormula::not(g.clone()));
        }
        PropFormula::And(parts)
    }
}

/// Parse a file of `(axiom φ)` / `(goal φ)` forms; bare formulas are axioms.
pub fn parse_prop_problem(text: &str) -> Result<PropProblem, FormulaError> {
    let mut p = PropProblem { axioms: Vec::new(), goal: None };
    for form in parse_all(text)? {
        if let SExpr::List(items, sp) = &form {
            match items.first().and_then(|h| h.as_atom()) {
                Some("axiom") => {
                    for x in &items[1..] {
                        p.axioms.push(prop_from_sexpr(x)?);
                    }
                    continue;
                }
                Some("goal") => {
                    if p.goal.is_some() || items.len() != 2 {
                        return Err(syntax(*sp, "exactly one goal with one formula expected"));
                    }
                    p.goal = Some(prop_from_sexpr(&items[1])?);
                    continue;
                }
                _ => {}
            }
        }
        p.axioms.push(prop_from_sexpr(&form)?);
    }
    Ok(p)
}
