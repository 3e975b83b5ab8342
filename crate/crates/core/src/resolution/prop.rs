use serde::Serialize;

use crate::formula::{Clause, ClauseSet, Polarity};
use crate::qsim::QueryCounter;

use super::ResolutionError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolventKind {
    Valid(Clause),
    Invalid,
    /// Unreachable with positional clauses; kept for completeness of the API.
    Tautology,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolventOutcome {
    pub kind: ResolventKind,
    pub resolved_var: Option<usize>,
}

impl ResolventOutcome {
    pub fn valid(&self) -> Option<&Clause> {
        match &self.kind {
            ResolventKind::Valid(c) => Some(c),
            _ => None,
        }
    }
}

/// Resolve on the unique complementary variable, if there is exactly one.
pub fn resolve_pair(c1: &Clause, c2: &Clause) -> Result<ResolventOutcome, ResolutionError> {
    if c1.num_vars() != c2.num_vars() {
        return Err(ResolutionError::VocabularyMismatch { left: c1.num_vars(), right: c2.num_vars() });
    }
    let mut pivot = None;
    for v in 0..c1.num_vars() {
        let (a, b) = (c1.get(v), c2.get(v));
        if (a == Polarity::Pos && b == Polarity::Neg) || (a == Polarity::Neg && b == Polarity::Pos) {
            if pivot.is_some() {
                return Ok(ResolventOutcome { kind: ResolventKind::Invalid, resolved_var: None });
            }
            pivot = Some(v);
        }
    }
    let Some(p) = pivot else {
        return Ok(ResolventOutcome { kind: ResolventKind::Invalid, resolved_var: None });
    };
    let mut r = Clause::empty(c1.num_vars());
    for v in 0..c1.num_vars() {
        if v == p {
            continue;
        }
        let merged = match (c1.get(v), c2.get(v)) {
            (Polarity::Absent, x) | (x, Polarity::Absent) => x,
            (x, _) => x,
        };
        r.set(v, merged);
    }
    Ok(ResolventOutcome { kind: ResolventKind::Valid(r), resolved_var: Some(p) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Refuted,
    Saturated,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_rounds: usize,
    pub max_clauses: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_rounds: 64, max_clauses: 4096 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub premise_ids: (usize, usize),
    pub resolvent: Clause,
    pub resolved_var: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProofStats {
    /// Ordered pairs examined (the classical M² per round).
    pub pair_evaluations: u64,
    /// New clauses inserted per round.
    pub new_per_round: Vec<usize>,
    pub final_clauses: usize,
    pub queries: QueryCounter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofResult {
    pub verdict: Verdict,
    pub trace: Vec<TraceStep>,
    pub rounds: usize,
    pub stats: ProofStats,
    /// Knowledge base at termination (input clauses first, ids stable).
    pub kb: ClauseSet,
}

impl ProofResult {
    /// Re-derive every trace step from its premises, starting from `input`.
    pub fn replay(&self, input: &ClauseSet) -> bool {
        let mut kb: Vec<Clause> = input.clauses().to_vec();
        for s in &self.trace {
            let (i, j) = s.premise_ids;
            if i >= kb.len() || j >= kb.len() {
                return false;
            }
            match resolve_pair(&kb[i], &kb[j]) {
                Ok(o) if o.valid() == Some(&s.resolvent) && o.resolved_var == Some(s.resolved_var) => {}
                _ => return false,
            }
            kb.push(s.resolvent.clone());
        }
        match self.verdict {
            Verdict::Refuted => self.trace.last().is_some_and(|s| s.resolvent.is_empty()) || input.clauses().iter().any(Clause::is_empty),
            _ => true,
        }
    }

    pub fn trace_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.trace
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "step": s.step,
                        "premise_ids": [s.premise_ids.0, s.premise_ids.1],
                        "resolvent": self.kb.show(&s.resolvent),
                        "resolved_var": self.kb.names()[s.resolved_var],
                    })
                })
                .collect(),
        )
    }
}

/// One batch round: all valid resolvents of ordered pairs (i, j) of the
/// current KB, in lexicographic pair order, deduplicated.
pub fn round_resolvents(kb: &ClauseSet) -> Vec<(usize, usize, Clause, usize)> {
    let m = kb.len();
    let mut out: Vec<(usize, usize, Clause, usize)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for i in 0..m {
        for j in 0..m {
            let o = resolve_pair(kb.get(i), kb.get(j)).expect("same vocabulary");
            if let (ResolventKind::Valid(c), Some(v)) = (o.kind, o.resolved_var) {
                if seen.insert(c.clone()) {
                    out.push((i, j, c, v));
                }
            }
        }
    }
    out
}

/// Breadth-first saturation: each round resolves every ordered pair of the
/// current KB, then inserts the new clauses.
pub fn saturate(kb: &ClauseSet, budget: Budget) -> ProofResult {
    let mut kb = kb.clone();
    let mut res = ProofResult { verdict: Verdict::Saturated, trace: Vec::new(), rounds: 0, stats: ProofStats::default(), kb: ClauseSet::default() };
    if kb.clauses().iter().any(Clause::is_empty) {
        res.verdict = Verdict::Refuted;
        res.stats.final_clauses = kb.len();
        res.kb = kb;
        return res;
    }
    loop {
        if res.rounds >= budget.max_rounds {
            res.verdict = Verdict::BudgetExceeded;
            break;
        }
        res.rounds += 1;
        let m = kb.len() as u64;
        res.stats.pair_evaluations += m * m;
        let found = round_resolvents(&kb);
        let mut added = 0;
        let mut refuted = false;
        for (i, j, c, v) in found {
            if kb.contains(&c) {
                continue;
            }
            let empty = c.is_empty();
            res.trace.push(TraceStep { step: res.trace.len(), premise_ids: (i, j), resolvent: c.clone(), resolved_var: v });
            kb.push(c);
            added += 1;
            if empty {
                refuted = true;
                break;
            }
        }
        res.stats.new_per_round.push(added);
        if refuted {
            res.verdict = Verdict::Refuted;
            break;
        }
        if added == 0 {
            res.verdict = Verdict::Saturated;
            break;
        }
        if kb.len() > budget.max_clauses {
            res.verdict = Verdict::BudgetExceeded;
            break;
        }
    }
    res.stats.final_clauses = kb.len();
    res.kb = kb;
    res
}
