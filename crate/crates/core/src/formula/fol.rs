use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use super::sexpr::{parse_all, syntax, SExpr};
use super::FormulaError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Func(String, Vec<Term>),
}

impl Term {
    pub fn var(n: &str) -> Term {
        Term::Var(n.into())
    }
    pub fn cst(n: &str) -> Term {
        Term::Const(n.into())
    }
    pub fn func(n: &str, args: Vec<Term>) -> Term {
        Term::Func(n.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Func(_, a) => a.iter().all(Term::is_ground),
        }
    }

    /// Function-nesting depth: constants and variables are 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Func(_, a) => 1 + a.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Func(_, a) => 1 + a.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::Const(_) => {}
            Term::Func(_, a) => a.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(_) => false,
            Term::Func(_, a) => a.iter().any(|t| t.contains_var(v)),
        }
    }

    fn collect_symbols(&self, consts: &mut BTreeSet<String>, funcs: &mut BTreeSet<(String, usize)>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                consts.insert(c.clone());
            }
            Term::Func(f, a) => {
                funcs.insert((f.clone(), a.len()));
                a.iter().for_each(|t| t.collect_symbols(consts, funcs));
            }
        }
    }

    pub fn rename_vars(&self, f: &dyn Fn(&str) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Const(_) => self.clone(),
            Term::Func(n, a) => Term::Func(n.clone(), a.iter().map(|t| t.rename_vars(f)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => write!(f, "{v}"),
            Term::Func(n, a) => {
                write!(f, "{n}(")?;
                for (i, t) in a.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: pred.into(), args }
    }

    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(f).collect() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.pred);
        }
        write!(f, "{}(", self.pred)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { positive: true, atom }
    }
    pub fn neg(atom: Atom) -> Self {
        Literal { positive: false, atom }
    }
    pub fn negated(&self) -> Self {
        Literal { positive: !self.positive, atom: self.atom.clone() }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "¬{}", self.atom)
        }
    }
}

/// Quantifier-free clause; variables are implicitly universal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FolClause {
    pub literals: Vec<Literal>,
}

impl FolClause {
    pub fn new(literals: Vec<Literal>) -> Self {
        FolClause { literals }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for l in &self.literals {
            for t in &l.atom.args {
                t.collect_vars(&mut out);
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(|l| l.atom.is_ground())
    }

    pub fn max_depth(&self) -> usize {
        self.literals.iter().flat_map(|l| l.atom.args.iter().map(Term::depth)).max().unwrap_or(0)
    }

    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> FolClause {
        FolClause {
            literals: self.literals.iter().map(|l| Literal { positive: l.positive, atom: l.atom.map_terms(f) }).collect(),
        }
    }

    /// Drop duplicate literals (keeping first occurrences); None if tautological.
    pub fn simplified(&self) -> Option<FolClause> {
        let mut out: Vec<Literal> = Vec::new();
        for l in &self.literals {
            if out.iter().any(|m| m.atom == l.atom && m.positive != l.positive) {
                return None;
            }
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
        Some(FolClause { literals: out })
    }

    pub fn symbols(&self) -> (BTreeSet<String>, BTreeSet<(String, usize)>) {
        let (mut c, mut f) = (BTreeSet::new(), BTreeSet::new());
        for l in &self.literals {
            for t in &l.atom.args {
                t.collect_symbols(&mut c, &mut f);
            }
        }
        (c, f)
    }
}

impl fmt::Display for FolClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(f, "⊥");
        }
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" ∨ "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FolFormula {
    Atom(Atom),
    Not(Box<FolFormula>),
    And(Vec<FolFormula>),
    Or(Vec<FolFormula>),
    Implies(Box<FolFormula>, Box<FolFormula>),
    Forall(String, Box<FolFormula>),
    Exists(String, Box<FolFormula>),
}

impl FolFormula {
    fn free_vars_into(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            FolFormula::Atom(a) => {
                let mut vs = Vec::new();
                a.args.iter().for_each(|t| t.collect_vars(&mut vs));
                for v in vs {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            FolFormula::Not(f) => f.free_vars_into(bound, out),
            FolFormula::And(fs) | FolFormula::Or(fs) => fs.iter().for_each(|f| f.free_vars_into(bound, out)),
            FolFormula::Implies(a, b) => {
                a.free_vars_into(bound, out);
                b.free_vars_into(bound, out);
            }
            FolFormula::Forall(v, f) | FolFormula::Exists(v, f) => {
                bound.push(v.clone());
                f.free_vars_into(bound, out);
                bound.pop();
            }
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.free_vars_into(&mut Vec::new(), &mut out);
        out
    }

    /// Universally close over free variables.
    pub fn closed(self) -> FolFormula {
        let fv = self.free_vars();
        fv.into_iter().rev().fold(self, |f, v| FolFormula::Forall(v, Box::new(f)))
    }

    fn symbols_into(&self, out: &mut HashSet<String>) {
        match self {
            FolFormula::Atom(a) => {
                out.insert(a.pred.clone());
                let (c, f) = FolClause::new(vec![Literal::pos(a.clone())]).symbols();
                out.extend(c);
                out.extend(f.into_iter().map(|x| x.0));
            }
            FolFormula::Not(f) | FolFormula::Forall(_, f) | FolFormula::Exists(_, f) => f.symbols_into(out),
            FolFormula::And(fs) | FolFormula::Or(fs) => fs.iter().for_each(|f| f.symbols_into(out)),
            FolFormula::Implies(a, b) => {
                a.symbols_into(out);
                b.symbols_into(out);
            }
        }
    }
}

/// A first-order problem: axioms plus optional goal.
#[derive(Clone, Debug, PartialEq)]
pub struct FolProblem {
    pub axioms: Vec<FolFormula>,
    pub goal: Option<FolFormula>,
}

impl FolProblem {
    /// KB ∧ ¬goal as a list of closed formulas.
    pub fn refutation_formulas(&self) -> Vec<FolFormula> {
        let mut v: Vec<FolFormula> = self.axioms.iter().cloned().map(FolFormula::closed).collect();
        if let Some(g) = &self.goal {
            v.push(FolFormula::Not(Box::new(g.clone().closed())));
        }
        v
    }
}

fn is_variable_name(s: &str, consts: &HashSet<String>) -> bool {
    s.chars().next().is_some_and(|c| c.is_lowercase()) && !consts.contains(s)
}

struct FolReader<'a> {
    consts: &'a HashSet<String>,
}

impl FolReader<'_> {
    fn term(&self, e: &SExpr) -> Result<Term, FormulaError> {
        match e {
            SExpr::Atom(a, _) => Ok(if is_variable_name(a, self.consts) { Term::Var(a.clone()) } else { Term::Const(a.clone()) }),
            SExpr::List(items, sp) => {
                let (h, rest) = items.split_first().ok_or_else(|| syntax(*sp, "empty term"))?;
                let name = h.as_atom().ok_or_else(|| syntax(h.span(), "function symbol expected"))?;
                if rest.is_empty() {
                    return Err(syntax(*sp, "function application without arguments"));
                }
                Ok(Term::Func(name.into(), rest.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?))
            }
        }
    }

    fn formula(&self, e: &SExpr) -> Result<FolFormula, FormulaError> {
        match e {
            SExpr::Atom(a, sp) => {
                if matches!(a.as_str(), "and" | "or" | "not" | "implies" | "forall" | "exists") {
                    Err(syntax(*sp, format!("connective '{a}' used as an atom")))
                } else {
                    Ok(FolFormula::Atom(Atom::new(a, vec![])))
                }
            }
            SExpr::List(items, sp) => {
                let (h, rest) = items.split_first().ok_or_else(|| syntax(*sp, "empty list"))?;
                let op = h.as_atom().ok_or_else(|| syntax(h.span(), "operator expected"))?;
                let kids = || rest.iter().map(|x| self.formula(x)).collect::<Result<Vec<_>, _>>();
                match op {
                    "and" => Ok(FolFormula::And(kids()?)),
                    "or" => Ok(FolFormula::Or(kids()?)),
                    "not" => match rest {
                        [x] => Ok(FolFormula::Not(Box::new(self.formula(x)?))),
                        _ => Err(syntax(*sp, "'not' takes one argument")),
                    },
                    "implies" => match rest {
                        [a, b] => Ok(FolFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?))),
                        _ => Err(syntax(*sp, "'implies' takes two arguments")),
                    },
                    "forall" | "exists" => {
                        let [vars, body] = rest else {
                            return Err(syntax(*sp, format!("'{op}' takes a variable list and a body")));
                        };
                        let names: Vec<String> = match vars {
                            SExpr::Atom(v, _) => vec![v.clone()],
                            SExpr::List(vs, _) => vs
                                .iter()
                                .map(|v| v.as_atom().map(String::from).ok_or_else(|| syntax(v.span(), "variable name expected")))
                                .collect::<Result<_, _>>()?,
                        };
                        let mut f = self.formula(body)?;
                        for v in names.into_iter().rev() {
                            if !is_variable_name(&v, self.consts) {
                                return Err(syntax(vars.span(), format!("'{v}' is not a variable name")));
                            }
                            f = if op == "forall" { FolFormula::Forall(v, Box::new(f)) } else { FolFormula::Exists(v, Box::new(f)) };
                        }
                        Ok(f)
                    }
                    pred => {
                        if pred.chars().next().is_some_and(|c| c.is_lowercase()) && !self.consts.contains(pred) {
                            return Err(FormulaError::UnknownOperator { op: pred.into(), line: sp.line, col: sp.col });
                        }
                        Ok(FolFormula::Atom(Atom::new(pred, rest.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?)))
                    }
                }
            }
        }
    }
}

/// Parse a single first-order formula (no `(constants ...)` header).
pub fn parse_fol(text: &str) -> Result<FolFormula, FormulaError> {
    let forms = parse_all(text)?;
    let consts = HashSet::new();
    let r = FolReader { consts: &consts };
    match forms.as_slice() {
        [one] => r.formula(one),
        [] => Err(FormulaError::Syntax { line: 1, col: 1, msg: "empty input".into() }),
        [_, second, ..] => Err(syntax(second.span(), "trailing input after formula")),
    }
}

/// Parse a problem file: optional `(constants c ...)` declaring lowercase
/// constant names, then `(axiom φ)` and `(goal φ)` forms.
pub fn parse_fol_problem(text: &str) -> Result<FolProblem, FormulaError> {
    let forms = parse_all(text)?;
    let mut consts = HashSet::new();
    for f in &forms {
        if let SExpr::List(items, _) = f {
            if items.first().and_then(|h| h.as_atom()) == Some("constants") {
                for c in &items[1..] {
                    consts.insert(c.as_atom().ok_or_else(|| syntax(c.span(), "constant name expected"))?.to_string());
                }
            }
        }
    }
    let r = FolReader { consts: &consts };
    let mut p = FolProblem { axioms: Vec::new(), goal: None };
    for f in &forms {
        let SExpr::List(items, sp) = f else {
            return Err(syntax(f.span(), "expected (axiom ...) or (goal ...)"));
        };
        match items.first().and_then(|h| h.as_atom()) {
            Some("constants") => {}
            Some("axiom") => {
                for x in &items[1..] {
                    p.axioms.push(r.formula(x)?);
                }
            }
            Some("goal") => {
                if p.goal.is_some() || items.len() != 2 {
                    return Err(syntax(*sp, "exactly one goal with one formula expected"));
                }
                p.goal = Some(r.formula(&items[1])?);
            }
            _ => p.axioms.push(r.formula(f)?),
        }
    }
    Ok(p)
}

fn nnf(f: &FolFormula, neg: bool) -> FolFormula {
    use FolFormula::*;
    match f {
        Atom(_) => {
            if neg {
                Not(Box::new(f.clone()))
            } else {
                f.clone()
            }
        }
        Not(g) => nnf(g, !neg),
        And(fs) => {
            let k = fs.iter().map(|g| nnf(g, neg)).collect();
            if neg {
                Or(k)
            } else {
                And(k)
            }
        }
        Or(fs) => {
            let k = fs.iter().map(|g| nnf(g, neg)).collect();
            if neg {
                And(k)
            } else {
                Or(k)
            }
        }
        Implies(a, b) => nnf(&Or(vec![Not(a.clone()), (**b).clone()]), neg),
        Forall(v, g) => {
            let b = Box::new(nnf(g, neg));
            if neg {
                Exists(v.clone(), b)
            } else {
                Forall(v.clone(), b)
            }
        }
        Exists(v, g) => {
            let b = Box::new(nnf(g, neg));
            if neg {
                Forall(v.clone(), b)
            } else {
                Exists(v.clone(), b)
            }
        }
    }
}

/// Rename bound variables so that no name is bound twice.
fn standardize_apart(f: &FolFormula, used: &mut HashSet<String>, env: &HashMap<String, String>) -> FolFormula {
    use FolFormula::*;
    let subst_atom = |a: &super::fol::Atom, env: &HashMap<String, String>| {
        a.map_terms(&|t| t.rename_vars(&|v| Term::Var(env.get(v).cloned().unwrap_or_else(|| v.to_string()))))
    };
    match f {
        Atom(a) => Atom(subst_atom(a, env)),
        Not(g) => Not(Box::new(standardize_apart(g, used, env))),
        And(fs) => And(fs.iter().map(|g| standardize_apart(g, used, env)).collect()),
        Or(fs) => Or(fs.iter().map(|g| standardize_apart(g, used, env)).collect()),
        Implies(a, b) => Implies(Box::new(standardize_apart(a, used, env)), Box::new(standardize_apart(b, used, env))),
        Forall(v, g) | Exists(v, g) => {
            let mut name = v.clone();
            let mut k = 1;
            while used.contains(&name) {
                name = format!("{v}{k}");
                k += 1;
            }
            used.insert(name.clone());
            let mut env2 = env.clone();
            env2.insert(v.clone(), name.clone());
            let body = Box::new(standardize_apart(g, used, &env2));
            if matches!(f, Forall(..)) {
                Forall(name, body)
            } else {
                Exists(name, body)
            }
        }
    }
}

struct Skolemizer {
    taken: HashSet<String>,
    next: usize,
}

impl Skolemizer {
    fn fresh(&mut self) -> String {
        loop {
            let n = format!("Sk{}", self.next);
            self.next += 1;
            if !self.taken.contains(&n) {
                self.taken.insert(n.clone());
                return n;
            }
        }
    }

    /// Input in NNF, standardized apart.  Returns the quantifier-free matrix.
    fn run(&mut self, f: &FolFormula, univ: &mut Vec<String>, sub: &HashMap<String, Term>) -> FolFormula {
        use FolFormula::*;
        match f {
            Atom(a) => Atom(a.map_terms(&|t| t.rename_vars(&|v| sub.get(v).cloned().unwrap_or_else(|| Term::Var(v.into()))))),
            Not(g) => Not(Box::new(self.run(g, univ, sub))),
            And(fs) => And(fs.iter().map(|g| self.run(g, univ, sub)).collect()),
            Or(fs) => Or(fs.iter().map(|g| self.run(g, univ, sub)).collect()),
            Implies(..) => unreachable!("removed by nnf"),
            Forall(v, g) => {
                univ.push(v.clone());
                let r = self.run(g, univ, sub);
                univ.pop();
                r
            }
            Exists(v, g) => {
                let name = self.fresh();
                let t = if univ.is_empty() {
                    Term::Const(name)
                } else {
                    Term::Func(name, univ.iter().map(|u| Term::Var(u.clone())).collect())
                };
                let mut sub2 = sub.clone();
                sub2.insert(v.clone(), t);
                self.run(g, univ, &sub2)
            }
        }
    }
}

fn clause_lists(f: &FolFormula) -> Vec<Vec<Literal>> {
    use FolFormula::*;
    match f {
        Atom(a) => vec![vec![Literal::pos(a.clone())]],
        Not(g) => match &**g {
            Atom(a) => vec![vec![Literal::neg(a.clone())]],
            _ => unreachable!("nnf"),
        },
        And(fs) => fs.iter().flat_map(clause_lists).collect(),
        Or(fs) => {
            let mut acc: Vec<Vec<Literal>> = vec![vec![]];
            for g in fs {
                let cg = clause_lists(g);
                let mut next = Vec::new();
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
        _ => unreachable!("quantifiers removed"),
    }
}

/// Clause form of a conjunction of closed formulas, with one shared Skolem
/// symbol supply (`Sk0`, `Sk1`, … skipping any name already in use).
pub fn skolemize_all(fs: &[FolFormula]) -> Vec<FolClause> {
    let mut symbols = HashSet::new();
    for f in fs {
        f.symbols_into(&mut symbols);
    }
    let mut sk = Skolemizer { taken: symbols, next: 0 };
    let mut used = HashSet::new();
    let mut out: Vec<FolClause> = Vec::new();
    for f in fs {
        let f = standardize_apart(&nnf(&f.clone().closed(), false), &mut used, &HashMap::new());
        let m = sk.run(&f, &mut Vec::new(), &HashMap::new());
        for lits in clause_lists(&m) {
            if let Some(c) = FolClause::new(lits).simplified() {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Clause form of one formula (free variables are closed universally).
pub fn skolemize(f: &FolFormula) -> Vec<FolClause> {
    skolemize_all(std::slice::from_ref(f))
}
