use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::fmt;

use crate::formula::{propositionalize, Atom, ClauseSet, FolClause, Literal, Term};

use super::prop::Verdict;

/// Variable bindings, kept fully applied (idempotent).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &str) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: &str, t: Term) {
        self.0.insert(v.to_string(), t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        t.rename_vars(&|v| match self.0.get(v) {
            Some(b) => self.apply(b),
            None => Term::Var(v.to_string()),
        })
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        a.map_terms(&|t| self.apply(t))
    }

    pub fn apply_clause(&self, c: &FolClause) -> FolClause {
        c.map_terms(&|t| self.apply(t))
    }

    fn normalized(self) -> Self {
        let full = self.0.keys().map(|k| (k.clone(), self.apply(&Term::Var(k.clone())))).collect();
        Substitution(full)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(v, t)| format!("{v}/{t}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn walk(t: &Term, s: &Substitution) -> Term {
    let mut cur = t.clone();
    while let Term::Var(v) = &cur {
        match s.get(v) {
            Some(b) => cur = b.clone(),
            None => break,
        }
    }
    cur
}

fn occurs(v: &str, t: &Term, s: &Substitution) -> bool {
    match walk(t, s) {
        Term::Var(w) => w == v,
        Term::Const(_) => false,
        Term::Func(_, args) => args.iter().any(|a| occurs(v, a, s)),
    }
}

fn unify_into(a: &Term, b: &Term, s: &mut Substitution) -> bool {
    let (a, b) = (walk(a, s), walk(b, s));
    if a == b {
        return true;
    }
    // prefer binding right-hand variables so that mgus read left-to-right
    match (&a, &b) {
        (_, Term::Var(y)) => {
            if occurs(y, &a, s) {
                return false;
            }
            s.insert(y, a.clone());
            true
        }
        (Term::Var(x), _) => {
            if occurs(x, &b, s) {
                return false;
            }
            s.insert(x, b.clone());
            true
        }
        (Term::Func(f, xs), Term::Func(g, ys)) => f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_into(x, y, s)),
        _ => false,
    }
}

/// Most general unifier of two terms, with occurs check.
pub fn unify_terms(a: &Term, b: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    unify_into(a, b, &mut s).then(|| s.normalized())
}

/// Most general unifier of two atoms (predicate and arity must agree).
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    unify_with(a, b, Substitution::new())
}

fn unify_with(a: &Atom, b: &Atom, mut s: Substitution) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    for (x, y) in a.args.iter().zip(&b.args) {
        if !unify_into(x, y, &mut s) {
            return None;
        }
    }
    Some(s.normalized())
}

/// Rename variables of `c` that clash with `taken`, priming them.
pub fn rename_apart(c: &FolClause, taken: &[String]) -> (FolClause, Substitution) {
    let mine = c.vars();
    let mut used: HashSet<String> = taken.iter().chain(&mine).cloned().collect();
    let mut rho = Substitution::new();
    for v in &mine {
        if taken.contains(v) {
            let mut w = format!("{v}'");
            while used.contains(&w) {
                w.push('\'');
            }
            used.insert(w.clone());
            rho.insert(v, Term::Var(w));
        }
    }
    (rho.apply_clause(c), rho)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inference {
    Input(usize),
    Resolve { left: usize, right: usize, left_lit: usize, right_lit: usize, renaming: Substitution, mgu: Substitution },
    Factor { parent: usize, mgu: Substitution },
}

/// Binary resolvents of (c1, c2) on every complementary unifiable pair.
/// Literal indices refer to the original clauses; `renaming` applies to c2.
pub fn binary_resolvents(c1: &FolClause, c2: &FolClause) -> Vec<(FolClause, usize, usize, Substitution, Substitution)> {
    let (c2r, rho) = rename_apart(c2, &c1.vars());
    let mut out = Vec::new();
    for (i, l1) in c1.literals.iter().enumerate() {
        for (j, l2) in c2r.literals.iter().enumerate() {
            if l1.positive == l2.positive {
                continue;
            }
            let Some(theta) = unify(&l1.atom, &l2.atom) else { continue };
            let lits: Vec<Literal> = c1
                .literals
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, l)| l)
                .chain(c2r.literals.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, l)| l))
                .map(|l| Literal { positive: l.positive, atom: theta.apply_atom(&l.atom) })
                .collect();
            if let Some(r) = FolClause::new(lits).simplified() {
                out.push((r, i, j, rho.clone(), theta));
            }
        }
    }
    out
}

/// Proper factors: unify two same-sign literals and merge.
pub fn factors(c: &FolClause) -> Vec<(FolClause, Substitution)> {
    let mut out: Vec<(FolClause, Substitution)> = Vec::new();
    for i in 0..c.literals.len() {
        for j in i + 1..c.literals.len() {
            let (a, b) = (&c.literals[i], &c.literals[j]);
            if a.positive != b.positive {
                continue;
            }
            let Some(theta) = unify(&a.atom, &b.atom) else { continue };
            if let Some(f) = theta.apply_clause(c).simplified() {
                if f.literals.len() < c.literals.len() && !out.iter().any(|(g, _)| *g == f) {
                    out.push((f, theta));
                }
            }
        }
    }
    out
}

/// All binary resolvents of the pair plus the factors of each premise.
pub fn resolve_fol(c1: &FolClause, c2: &FolClause) -> Vec<FolClause> {
    let mut out: Vec<FolClause> = Vec::new();
    let candidates = binary_resolvents(c1, c2)
        .into_iter()
        .map(|r| r.0)
        .chain(factors(c1).into_iter().map(|f| f.0))
        .chain(factors(c2).into_iter().map(|f| f.0));
    for c in candidates {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FolBudget {
    pub max_given: usize,
    pub max_clauses: usize,
    /// Discard clauses whose terms nest deeper than this.
    pub max_term_depth: Option<usize>,
    pub max_literals: Option<usize>,
}

impl Default for FolBudget {
    fn default() -> Self {
        FolBudget { max_given: 5_000, max_clauses: 50_000, max_term_depth: Some(3), max_literals: Some(8) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedClause {
    pub clause: FolClause,
    pub inference: Inference,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FolProof {
    pub verdict: Verdict,
    pub clauses: Vec<DerivedClause>,
    pub empty: Option<usize>,
    pub given: usize,
}

fn weight(c: &FolClause) -> usize {
    c.literals.iter().map(|l| 1 + l.atom.args.iter().map(Term::size).sum::<usize>()).sum()
}

/// Print with variables renamed by order of first appearance.
fn variant_key(c: &FolClause) -> String {
    let vars = c.vars();
    c.map_terms(&|t| t.rename_vars(&|v| Term::Var(format!("_{}", vars.iter().position(|w| w == v).unwrap()))))
        .to_string()
}

fn match_into(pattern: &Term, target: &Term, s: &mut BTreeMap<String, Term>) -> bool {
    match (pattern, target) {
        (Term::Var(v), _) => match s.get(v) {
            Some(b) => b == target,
            None => {
                s.insert(v.clone(), target.clone());
                true
            }
        },
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::Func(f, xs), Term::Func(g, ys)) => f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_into(x, y, s)),
        _ => false,
    }
}

fn subsumes_from(c: &[Literal], d: &FolClause, s: &BTreeMap<String, Term>) -> bool {
    let Some((first, rest)) = c.split_first() else { return true };
    for l in &d.literals {
        if l.positive != first.positive || l.atom.pred != first.atom.pred || l.atom.args.len() != first.atom.args.len() {
            continue;
        }
        let mut s2 = s.clone();
        if first.atom.args.iter().zip(&l.atom.args).all(|(p, t)| match_into(p, t, &mut s2)) && subsumes_from(rest, d, &s2) {
            return true;
        }
    }
    false
}

/// θ-subsumption: some instance of `c` is a sub-multiset-free subset of `d`.
pub fn subsumes(c: &FolClause, d: &FolClause) -> bool {
    c.literals.len() <= d.literals.len() && subsumes_from(&c.literals, d, &BTreeMap::new())
}

/// Given-clause refutation with binary resolution, factoring, tautology
/// deletion, variant dedup and forward subsumption.
pub fn refute_fol(inputs: &[FolClause], budget: FolBudget) -> FolProof {
    let mut proof = FolProof { verdict: Verdict::Saturated, clauses: Vec::new(), empty: None, given: 0 };
    let mut passive: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    let mut keys: HashSet<String> = HashSet::new();
    let mut active: Vec<usize> = Vec::new();

    let admit = |c: &FolClause| -> bool {
        budget.max_term_depth.is_none_or(|d| c.max_depth() <= d) && budget.max_literals.is_none_or(|m| c.literals.len() <= m)
    };

    for (k, c) in inputs.iter().enumerate() {
        let Some(c) = c.simplified() else { continue };
        if !keys.insert(variant_key(&c)) {
            continue;
        }
        let id = proof.clauses.len();
        let empty = c.is_empty();
        passive.push(Reverse((weight(&c), id)));
        proof.clauses.push(DerivedClause { clause: c, inference: Inference::Input(k) });
        if empty {
            proof.verdict = Verdict::Refuted;
            proof.empty = Some(id);
            return proof;
        }
    }

    while let Some(Reverse((_, g))) = passive.pop() {
        if proof.given >= budget.max_given {
            proof.verdict = Verdict::BudgetExceeded;
            return proof;
        }
        let given = proof.clauses[g].clause.clone();
        if active.iter().any(|&a| subsumes(&proof.clauses[a].clause, &given)) {
            continue;
        }
        proof.given += 1;
        active.push(g);

        let mut fresh: Vec<DerivedClause> = Vec::new();
        for (f, theta) in factors(&given) {
            fresh.push(DerivedClause { clause: f, inference: Inference::Factor { parent: g, mgu: theta } });
        }
        for &a in &active {
            let other = proof.clauses[a].clause.clone();
            for (r, i, j, rho, theta) in binary_resolvents(&given, &other) {
                fresh.push(DerivedClause { clause: r, inference: Inference::Resolve { left: g, right: a, left_lit: i, right_lit: j, renaming: rho, mgu: theta } });
            }
            if a != g {
                for (r, i, j, rho, theta) in binary_resolvents(&other, &given) {
                    fresh.push(DerivedClause { clause: r, inference: Inference::Resolve { left: a, right: g, left_lit: i, right_lit: j, renaming: rho, mgu: theta } });
                }
            }
        }
        for d in fresh {
            if !admit(&d.clause) || !keys.insert(variant_key(&d.clause)) {
                continue;
            }
            if active.iter().any(|&a| subsumes(&proof.clauses[a].clause, &d.clause)) {
                continue;
            }
            let id = proof.clauses.len();
            let empty = d.clause.is_empty();
            passive.push(Reverse((weight(&d.clause), id)));
            proof.clauses.push(d);
            if empty {
                proof.verdict = Verdict::Refuted;
                proof.empty = Some(id);
                return proof;
            }
        }
        if proof.clauses.len() > budget.max_clauses {
            proof.verdict = Verdict::BudgetExceeded;
            return proof;
        }
    }
    proof
}

fn ground_with(t: &Term, tau: &Substitution, default: &Term) -> Term {
    tau.apply(t).rename_vars(&|_| default.clone())
}

impl FolProof {
    /// Ground instances of input clauses used by the refutation, obtained by
    /// pushing ground substitutions from ⊥ back to the leaves. Remaining
    /// free variables are bound to `default`. Returns (input index, instance).
    pub fn ground_instances(&self, default: &Term) -> Vec<(usize, FolClause)> {
        let Some(root) = self.empty else { return Vec::new() };
        let mut out: Vec<(usize, FolClause)> = Vec::new();
        let mut seen: HashSet<(usize, String)> = HashSet::new();
        let mut stack = vec![(root, Substitution::new())];
        while let Some((id, tau)) = stack.pop() {
            let dc = &self.clauses[id];
            let key = (id, dc.clause.vars().iter().map(|v| ground_with(&Term::Var(v.clone()), &tau, default).to_string()).collect::<Vec<_>>().join(","));
            if !seen.insert(key) {
                continue;
            }
            match &dc.inference {
                Inference::Input(k) => {
                    let g = dc.clause.map_terms(&|t| ground_with(t, &tau, default));
                    if !out.iter().any(|(_, h)| *h == g) {
                        out.push((*k, g));
                    }
                }
                Inference::Factor { parent, mgu } => {
                    let mut s = Substitution::new();
                    for v in self.clauses[*parent].clause.vars() {
                        s.insert(&v, ground_with(&mgu.apply(&Term::Var(v.clone())), &tau, default));
                    }
                    stack.push((*parent, s));
                }
                Inference::Resolve { left, right, renaming, mgu, .. } => {
                    let mut sl = Substitution::new();
                    for v in self.clauses[*left].clause.vars() {
                        sl.insert(&v, ground_with(&mgu.apply(&Term::Var(v.clone())), &tau, default));
                    }
                    let mut sr = Substitution::new();
                    for v in self.clauses[*right].clause.vars() {
                        let renamed = renaming.apply(&Term::Var(v.clone()));
                        sr.insert(&v, ground_with(&mgu.apply(&renamed), &tau, default));
                    }
                    stack.push((*right, sr));
                    stack.push((*left, sl));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        out
    }

    /// Propositional clause set of the ground instances used by the proof.
    pub fn relevant_ground_set(&self, default: &Term) -> ClauseSet {
        let g: Vec<FolClause> = self.ground_instances(default).into_iter().map(|(_, c)| c).collect();
        propositionalize(&g)
    }

    /// Clauses on the path to ⊥, in derivation order.
    pub fn proof_steps(&self) -> Vec<usize> {
        let Some(root) = self.empty else { return Vec::new() };
        let mut keep = HashSet::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if !keep.insert(id) {
                continue;
            }
            match &self.clauses[id].inference {
                Inference::Input(_) => {}
                Inference::Factor { parent, .. } => stack.push(*parent),
                Inference::Resolve { left, right, .. } => stack.extend([*left, *right]),
            }
        }
        let mut v: Vec<usize> = keep.into_iter().collect();
        v.sort_unstable();
        v
    }

    pub fn proof_json(&self) -> serde_json::Value {
        let steps = self.proof_steps();
        serde_json::Value::Array(
            steps
                .iter()
                .map(|&id| {
                    let d = &self.clauses[id];
                    let (rule, parents, mgu) = match &d.inference {
                        Inference::Input(k) => ("input", vec![*k], String::new()),
                        Inference::Factor { parent, mgu } => ("factor", vec![*parent], mgu.to_string()),
                        Inference::Resolve { left, right, mgu, .. } => ("resolve", vec![*left, *right], mgu.to_string()),
                    };
                    serde_json::json!({ "id": id, "clause": d.clause.to_string(), "rule": rule, "parents": parents, "mgu": mgu })
                })
                .collect(),
        )
    }
}
