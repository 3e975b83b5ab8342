use std::collections::{BTreeSet, HashMap};

use super::fol::{FolClause, Term};
use super::prop::ClauseSet;
use super::FormulaError;

pub const DEFAULT_GROUND_CAP: usize = 10_000;
/// Constant injected when the clause set has none.
pub const INJECTED_CONSTANT: &str = "c0";

/// Ground terms up to function-nesting `depth`, ordered by depth, then
/// function symbol, then argument tuple.
pub fn herbrand_universe(cs: &[FolClause], depth: usize) -> Result<Vec<Term>, FormulaError> {
    herbrand_universe_capped(cs, depth, DEFAULT_GROUND_CAP)
}

pub fn herbrand_universe_capped(cs: &[FolClause], depth: usize, cap: usize) -> Result<Vec<Term>, FormulaError> {
    if cs.is_empty() {
        return Err(FormulaError::EmptyClauseList);
    }
    let mut consts = BTreeSet::new();
    let mut funcs = BTreeSet::new();
    for c in cs {
        let (a, b) = c.symbols();
        consts.extend(a);
        funcs.extend(b);
    }
    if consts.is_empty() {
        consts.insert(INJECTED_CONSTANT.to_string());
    }
    let mut all: Vec<Term> = consts.into_iter().map(Term::Const).collect();
    let mut level_start = 0;
    for _ in 0..depth {
        let prev_end = all.len();
        let mut next = Vec::new();
        for (f, arity) in &funcs {
            // tuples over all[..prev_end] with at least one argument from the newest level
            let mut idx = vec![0usize; *arity];
            'tuples: loop {
                if idx.iter().any(|&i| i >= level_start) {
                    next.push(Term::Func(f.clone(), idx.iter().map(|&i| all[i].clone()).collect()));
                    if all.len() + next.len() > cap {
                        return Err(FormulaError::Budget { what: "Herbrand universe terms", count: all.len() + next.len(), cap });
                    }
                }
                let mut k = *arity;
                loop {
                    if k == 0 {
                        break 'tuples;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < prev_end {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level_start = prev_end;
        all.extend(next);
    }
    Ok(all)
}

/// Propositional vocabulary of ground atoms, indexed by printed form.
pub fn propositionalize(ground: &[FolClause]) -> ClauseSet {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut names = Vec::new();
    let mut lists = Vec::new();
    for c in ground {
        debug_assert!(c.is_ground());
        let mut l = Vec::new();
        for lit in &c.literals {
            let key = lit.atom.to_string();
            let id = *index.entry(key.clone()).or_insert_with(|| {
                names.push(key);
                names.len() - 1
            });
            l.push((id, lit.positive));
        }
        lists.push(l);
    }
    ClauseSet::from_literal_lists(names, &lists)
}

/// All ground instances of `cs` over `universe`, propositionalized.
pub fn ground(cs: &[FolClause], universe: &[Term]) -> Result<ClauseSet, FormulaError> {
    ground_capped(cs, universe, DEFAULT_GROUND_CAP)
}

pub fn ground_capped(cs: &[FolClause], universe: &[Term], cap: usize) -> Result<ClauseSet, FormulaError> {
    if universe.is_empty() {
        return Err(FormulaError::EmptyUniverse);
    }
    let mut total: usize = 0;
    for c in cs {
        let k = c.vars().len() as u32;
        total = total.saturating_add(universe.len().saturating_pow(k));
    }
    if total > cap {
        return Err(FormulaError::Budget { what: "ground clause instances", count: total, cap });
    }
    let mut out = Vec::with_capacity(total);
    for c in cs {
        let vars = c.vars();
        let mut idx = vec![0usize; vars.len()];
        loop {
            let map: HashMap<&str, &Term> = vars.iter().map(String::as_str).zip(idx.iter().map(|&i| &universe[i])).collect();
            out.push(c.map_terms(&|t| t.rename_vars(&|v| map[v].clone())));
            let mut k = vars.len();
            let mut done = true;
            while k > 0 {
                k -= 1;
                idx[k] += 1;
                if idx[k] < universe.len() {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(propositionalize(&out))
}

/// Number of ground instances a full grounding would produce.
pub fn ground_instance_count(cs: &[FolClause], universe_len: usize) -> usize {
    cs.iter().map(|c| universe_len.saturating_pow(c.vars().len() as u32)).fold(0, usize::saturating_add)
}
