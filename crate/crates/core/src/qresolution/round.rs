use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::amplify::{fixed_point_length, fixed_point_phases, subspace_success, Amplifier, SearchSpec};
use crate::formula::{Clause, ClauseSet};
use crate::qsim::{Backend, BasisKey, QueryCounter, MAX_KEY_QUBITS};
use crate::resolution::{Budget, ProofResult, ProofStats, TraceStep, Verdict};
use crate::seed::{rng_for, sub_seed};

use super::circuits::{build_round_circuits, decode_resolvent, encode_clause, ur_table, Layout, QuquartWord};
use super::QResolutionError;

/// How a round's amplitudes are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Engine {
    /// Gate-level simulation of the full circuit.
    GateLevel,
    /// Exact two-level reduction of the same search (A|0⟩ known from the KB).
    Subspace,
    /// Gate level when the state fits `gate_level_max_entries`.
    #[default]
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QResolutionParams {
    pub delta: f64,
    /// Minimum samples per round.
    pub shots: usize,
    /// Sampling stops once every valid resolvent has been observed, or here.
    pub max_shots: usize,
    pub max_rounds: usize,
    pub max_clauses: usize,
    pub seed: u64,
    pub engine: Engine,
    pub backend: Backend,
    pub gate_level_max_entries: usize,
    /// Stop sampling once ⊥ has been observed (the verdict is settled).
    pub stop_on_empty: bool,
}

impl Default for QResolutionParams {
    fn default() -> Self {
        QResolutionParams {
            delta: 0.1,
            shots: 8,
            max_shots: 1_000_000,
            max_rounds: 64,
            max_clauses: 4096,
            seed: 0,
            engine: Engine::Auto,
            backend: Backend::Sparse,
            gate_level_max_entries: 1 << 16,
            stop_on_empty: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recovered {
    pub clause: Clause,
    pub premises: (usize, usize),
    pub resolved_var: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundReport {
    pub m: usize,
    pub m_padded: usize,
    pub qubits: usize,
    pub engine: Engine,
    /// Distinct decoded resolvents, ordered by premise pair.
    pub valid_resolvents: Vec<Recovered>,
    /// Marked components among the m_padded² (exact flag mass × m_padded²).
    pub s_observed: usize,
    pub flag_mass: f64,
    pub not_found: bool,
    /// Every distinct valid resolvent was observed before the shot cap.
    pub complete: bool,
    pub shots: usize,
    /// Amplified searches run (ladder stages over all shots).
    pub searches: usize,
    pub ukb_queries: u64,
    pub oracle_queries: u64,
    pub max_schedule: usize,
    /// Exact post-amplification marked mass per ladder length used.
    pub stage_mass: Vec<(usize, f64)>,
}

impl RoundReport {
    pub fn resolvent_set(&self) -> BTreeSet<Clause> {
        self.valid_resolvents.iter().map(|r| r.clause.clone()).collect()
    }

    /// U_KB queries per search relative to M/√s · ln(2/δ).
    pub fn query_ratio(&self, delta: f64) -> Option<f64> {
        if self.s_observed == 0 || self.searches == 0 {
            return None;
        }
        let per_search = self.ukb_queries as f64 / self.searches as f64;
        Some(per_search / (self.m as f64 / (self.s_observed as f64).sqrt() * (2.0 / delta).ln()))
    }
}

struct Hit {
    i: usize,
    j: usize,
    clause: Clause,
    var: usize,
}

enum Sampler {
    Gate { cum: Vec<f64>, keys: Vec<BasisKey> },
    Subspace { p: f64 },
}

/// Schedule lengths 1, 3, 7, … up to the first that covers one marked
/// component out of m_padded².
fn ladder(delta: f64, m_padded: usize) -> Vec<usize> {
    let need = fixed_point_length(delta, 1.0 / (m_padded * m_padded) as f64);
    let mut v = vec![1];
    while *v.last().unwrap() < need {
        let l = v.last().unwrap() * 2 + 1;
        v.push(l);
    }
    v
}

struct RoundEngine<'a> {
    kb: &'a ClauseSet,
    lay: Layout,
    delta: f64,
    kind: Engine,
    amp: Option<Amplifier>,
    /// Subspace engine: marked components in (i, j) order.
    marked: Vec<(usize, usize, Clause, usize)>,
    lambda: f64,
}

impl<'a> RoundEngine<'a> {
    fn new(kb: &'a ClauseSet, params: &QResolutionParams) -> Result<Self, QResolutionError> {
        let lay = Layout::new(kb.num_vars(), kb.len());
        let peak = lay.m_padded.saturating_mul(lay.m_padded).saturating_mul(1 << lay.count.len);
        let fits = lay.total <= MAX_KEY_QUBITS && peak <= params.gate_level_max_entries;
        let kind = match params.engine {
            Engine::Auto if fits => Engine::GateLevel,
            Engine::Auto => Engine::Subspace,
            Engine::GateLevel if lay.total > MAX_KEY_QUBITS => return Err(QResolutionError::Capacity { qubits: lay.total, cap: MAX_KEY_QUBITS }),
            e => e,
        };
        let mut eng = RoundEngine { kb, lay, delta: params.delta, kind, amp: None, marked: Vec::new(), lambda: 0.0 };
        match kind {
            Engine::GateLevel => {
                let (lay, prep, oracle) = build_round_circuits(kb);
                let mut spec = SearchSpec::new(Arc::new(prep), Arc::new(oracle), lay.flag, vec![]);
                spec.delta = params.delta;
                spec.backend = params.backend;
                spec.oracle_label = "U_J".into();
                spec.budget = usize::MAX / 4;
                eng.amp = Some(Amplifier::new(spec)?);
            }
            _ => {
                let words: Vec<QuquartWord> = kb.clauses().iter().map(encode_clause).collect();
                for (i, wi) in words.iter().enumerate() {
                    for (j, wj) in words.iter().enumerate() {
                        let r = QuquartWord(wi.0.iter().zip(&wj.0).map(|(&a, &b)| ur_table(a, b)).collect());
                        if let Ok(d) = decode_resolvent(&r) {
                            let var = r.0.iter().position(|&v| v == 3).unwrap();
                            eng.marked.push((i, j, d.into_clause(kb.num_vars()), var));
                        }
                    }
                }
                eng.lambda = eng.marked.len() as f64 / (eng.lay.m_padded * eng.lay.m_padded) as f64;
            }
        }
        Ok(eng)
    }

    fn decode_key(&self, key: &BasisKey) -> Result<Option<Hit>, QResolutionError> {
        if !key.bit(self.lay.flag) {
            return Ok(None);
        }
        let w = QuquartWord::read(key, &self.lay.result);
        let var = w.0.iter().position(|&v| v == 3).unwrap_or(0);
        let clause = decode_resolvent(&w)?.into_clause(self.kb.num_vars());
        Ok(Some(Hit { i: key.read(&self.lay.idx1) as usize, j: key.read(&self.lay.idx2) as usize, clause, var }))
    }

    /// Sampler for schedule length `l`, plus its exact marked mass.
    fn stage(&self, l: usize) -> Result<(Sampler, f64), QResolutionError> {
        match &self.amp {
            Some(amp) => {
                let a = amp.run_fixed_point(l)?;
                let mut cum = Vec::new();
                let mut keys = Vec::new();
                let mut acc = 0.0;
                for (k, z) in a.state.entries() {
                    acc += z.norm_sqr();
                    cum.push(acc);
                    keys.push(k);
                }
                Ok((Sampler::Gate { cum, keys }, a.marked_mass))
            }
            None => {
                let p = subspace_success(self.lambda, &fixed_point_phases(l, self.delta));
                Ok((Sampler::Subspace { p }, p))
            }
        }
    }

    fn sample(&self, s: &Sampler, rng: &mut impl Rng) -> Result<Option<Hit>, QResolutionError> {
        match s {
            Sampler::Gate { cum, keys } => {
                let total = *cum.last().unwrap_or(&1.0);
                let u = rng.gen::<f64>() * total;
                let idx = cum.partition_point(|&c| c <= u).min(keys.len() - 1);
                self.decode_key(&keys[idx])
            }
            Sampler::Subspace { p } => {
                if self.marked.is_empty() || rng.gen::<f64>() >= *p {
                    return Ok(None);
                }
                let (i, j, c, v) = &self.marked[rng.gen_range(0..self.marked.len())];
                Ok(Some(Hit { i: *i, j: *j, clause: c.clone(), var: *v }))
            }
        }
    }

    /// Exact initial flag mass and the set of distinct valid resolvents.
    fn exact_support(&self) -> Result<(f64, BTreeSet<Clause>), QResolutionError> {
        match &self.amp {
            Some(amp) => {
                let a = amp.run_fixed_point(1)?;
                let mut set = BTreeSet::new();
                for (k, z) in a.state.entries() {
                    if z.norm_sqr() > 1e-12 {
                        if let Some(h) = self.decode_key(&k)? {
                            set.insert(h.clause);
                        }
                    }
                }
                Ok((a.marked_mass, set))
            }
            None => Ok((self.lambda, self.marked.iter().map(|m| m.2.clone()).collect())),
        }
    }
}

/// One round: amplify the valid components, sample until every distinct
/// valid resolvent has been seen, decode, dedup.
pub fn quantum_round(kb: &ClauseSet, params: &QResolutionParams) -> Result<RoundReport, QResolutionError> {
    if !(params.delta > 0.0 && params.delta < 1.0) {
        return Err(QResolutionError::InvalidParams(format!("delta {} outside (0,1)", params.delta)));
    }
    if params.shots == 0 {
        return Err(QResolutionError::InvalidParams("shots must be ≥ 1".into()));
    }
    let mut rng = rng_for(params.seed, "quantum_round");
    let eng = RoundEngine::new(kb, params)?;
    let lay = eng.lay.clone();
    let (flag_mass, support) = eng.exact_support()?;
    let pad2 = lay.m_padded * lay.m_padded;
    let mut rep = RoundReport {
        m: lay.m,
        m_padded: lay.m_padded,
        qubits: lay.total,
        engine: eng.kind,
        valid_resolvents: Vec::new(),
        s_observed: (flag_mass * pad2 as f64).round() as usize,
        flag_mass,
        not_found: false,
        complete: true,
        shots: 0,
        searches: 0,
        ukb_queries: 0,
        oracle_queries: 0,
        max_schedule: 0,
        stage_mass: Vec::new(),
    };
    if flag_mass <= 1e-12 {
        // one unamplified search; the flag can never be set
        rep.not_found = true;
        rep.s_observed = 0;
        rep.shots = 1;
        rep.searches = 1;
        rep.ukb_queries = 2;
        rep.oracle_queries = 1;
        rep.max_schedule = 1;
        rep.stage_mass.push((1, 0.0));
        return Ok(rep);
    }

    let lengths = ladder(params.delta, lay.m_padded);
    let mut stages: Vec<Option<Sampler>> = (0..lengths.len()).map(|_| None).collect();
    let mut found: BTreeMap<Clause, ((usize, usize), usize)> = BTreeMap::new();
    let empty = Clause::empty(kb.num_vars());
    while rep.shots < params.max_shots && (rep.shots < params.shots || found.len() < support.len()) {
        if params.stop_on_empty && found.contains_key(&empty) {
            break;
        }
        rep.shots += 1;
        for (si, &l) in lengths.iter().enumerate() {
            if stages[si].is_none() {
                let (s, mass) = eng.stage(l)?;
                rep.stage_mass.push((l, mass));
                stages[si] = Some(s);
            }
            rep.searches += 1;
            rep.ukb_queries += 2 * l as u64;
            rep.oracle_queries += l.div_ceil(2) as u64;
            rep.max_schedule = rep.max_schedule.max(l);
            if let Some(h) = eng.sample(stages[si].as_ref().unwrap(), &mut rng)? {
                let e = found.entry(h.clause).or_insert(((h.i, h.j), h.var));
                if (h.i, h.j) < e.0 {
                    *e = ((h.i, h.j), h.var);
                }
                break;
            }
        }
    }
    rep.complete = found.len() == support.len();
    let mut v: Vec<Recovered> = found.into_iter().map(|(clause, (premises, resolved_var))| Recovered { clause, premises, resolved_var }).collect();
    v.sort_by(|a, b| a.premises.cmp(&b.premises).then_with(|| a.clause.cmp(&b.clause)));
    rep.valid_resolvents = v;
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct QuantumProof {
    pub result: ProofResult,
    pub rounds: Vec<RoundReport>,
}

impl QuantumProof {
    pub fn ukb_queries(&self) -> u64 {
        self.rounds.iter().map(|r| r.ukb_queries).sum()
    }
}

/// Repeat rounds until ⊥ appears or a round adds nothing, with the same
/// round and budget semantics as the classical saturation.
pub fn quantum_prove(kb: &ClauseSet, params: &QResolutionParams) -> Result<QuantumProof, QResolutionError> {
    let budget = Budget { max_rounds: params.max_rounds, max_clauses: params.max_clauses };
    let mut kb = kb.clone();
    let mut res = ProofResult { verdict: Verdict::Saturated, trace: Vec::new(), rounds: 0, stats: ProofStats::default(), kb: ClauseSet::default() };
    let mut reports = Vec::new();
    if kb.clauses().iter().any(Clause::is_empty) {
        res.verdict = Verdict::Refuted;
        res.stats.final_clauses = kb.len();
        res.kb = kb;
        return Ok(QuantumProof { result: res, rounds: reports });
    }
    loop {
        if res.rounds >= budget.max_rounds {
            res.verdict = Verdict::BudgetExceeded;
            break;
        }
        res.rounds += 1;
        let m = kb.len() as u64;
        res.stats.pair_evaluations += m * m;
        let round_params = QResolutionParams { seed: sub_seed(params.seed, &format!("round{}", res.rounds)), stop_on_empty: true, ..params.clone() };
        let rep = quantum_round(&kb, &round_params)?;
        res.stats.queries.add("U_KB", rep.ukb_queries);
        res.stats.queries.add("U_J", rep.oracle_queries);
        let mut added = 0;
        let mut refuted = false;
        for r in &rep.valid_resolvents {
            if kb.contains(&r.clause) {
                continue;
            }
            res.trace.push(TraceStep { step: res.trace.len(), premise_ids: r.premises, resolvent: r.clause.clone(), resolved_var: r.resolved_var });
            kb.push(r.clause.clone());
            added += 1;
            if r.clause.is_empty() {
                refuted = true;
                break;
            }
        }
        reports.push(rep);
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
    Ok(QuantumProof { result: res, rounds: reports })
}

/// Total U_KB queries counted by the simulator for one schedule length;
/// used to cross-check the analytic per-search charge.
pub fn simulated_ukb_count(kb: &ClauseSet, l: usize, delta: f64) -> Result<QueryCounter, QResolutionError> {
    let (lay, prep, oracle) = build_round_circuits(kb);
    let mut spec = SearchSpec::new(Arc::new(prep), Arc::new(oracle), lay.flag, vec![]);
    spec.delta = delta;
    spec.backend = Backend::Sparse;
    spec.oracle_label = "U_J".into();
    let a = Amplifier::new(spec)?.run_fixed_point(l)?;
    Ok(a.counter)
}
