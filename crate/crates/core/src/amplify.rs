//! Amplitude amplification over an abstract marked-state oracle.
//!
//! The oracle `O` computes the marked predicate into a flag qubit that starts
//! in |0⟩.  A target reflection `S_t(β)` is `O · P_flag(β) · O†` and counts as
//! one query; reading the flag after amplification costs one more.  The
//! zero-state reflection `S_0(α)` acts on all lines of the search register.
//!
//! Schedules:
//! - fixed-point (default): Chebyshev phases, success ≥ 1−δ² for every
//!   marked fraction λ ≥ λ_min, with no overshoot;
//! - Grover: θ = π reflections, a fixed iteration count;
//! - exponential: Grover with randomly drawn, geometrically growing
//!   iteration counts, for unknown λ.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::qsim::{Backend, Circuit, Control, FlatOp, Gate, GateKind, Measurement, QsimError, QueryCounter, State};

const MASS_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AmplifyError {
    #[error("delta must lie in (0,1), got {0}")]
    InvalidDelta(f64),
    #[error("flag qubit {flag} outside a {n}-qubit register")]
    FlagOutOfRange { flag: usize, n: usize },
    #[error("query budget must be at least 1")]
    ZeroBudget,
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schedule {
    /// Fixed-point search guaranteed for λ ≥ `lambda_min`; `None` spends the
    /// whole budget (smallest reachable threshold).
    FixedPoint { lambda_min: Option<f64> },
    /// Plain Grover with a fixed number of iterations.
    Grover { iterations: usize },
    /// Randomized exponential Grover for unknown λ.
    Exponential,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::FixedPoint { lambda_min: None }
    }
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub num_qubits: usize,
    pub state_prep: Arc<Circuit>,
    pub oracle: Arc<Circuit>,
    pub flag: usize,
    /// Lines whose value is reported on success.
    pub output: Vec<usize>,
    pub delta: f64,
    /// Maximum oracle queries (reflections plus the final read).
    pub budget: usize,
    pub schedule: Schedule,
    pub backend: Backend,
    pub oracle_label: String,
}

impl SearchSpec {
    pub fn new(state_prep: Arc<Circuit>, oracle: Arc<Circuit>, flag: usize, output: Vec<usize>) -> Self {
        let n = state_prep.num_qubits.max(oracle.num_qubits);
        SearchSpec {
            num_qubits: n,
            state_prep,
            oracle,
            flag,
            output,
            delta: 0.1,
            budget: 1024,
            schedule: Schedule::default(),
            backend: Backend::Auto,
            oracle_label: "oracle".into(),
        }
    }

    fn validate(&self) -> Result<(), AmplifyError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(AmplifyError::InvalidDelta(self.delta));
        }
        if self.flag >= self.num_qubits {
            return Err(AmplifyError::FlagOutOfRange { flag: self.flag, n: self.num_qubits });
        }
        if self.budget == 0 {
            return Err(AmplifyError::ZeroBudget);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Measured a flagged state; value of the output lines.
    Marked(Measurement),
    /// Measured an unflagged state.
    Unmarked(Measurement),
    /// The marked subspace is empty.
    NotFound,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub queries_used: usize,
    /// Exact flagged mass after amplification.
    pub success_prob_estimate: f64,
    /// Exact flagged mass of A|0⟩.
    pub initial_mass: f64,
    /// Number of A/A† applications of the last schedule run.
    pub schedule_length: usize,
    pub counter: QueryCounter,
}

fn cheb(l: f64, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (l * x.acos()).cos()
    } else if x > 1.0 {
        (l * x.acosh()).cosh()
    } else {
        let s = if (l as i64) % 2 == 0 { 1.0 } else { -1.0 };
        s * (l * (-x).acosh()).cosh()
    }
}

/// Smallest marked fraction for which a length-`l` fixed-point schedule
/// reaches success ≥ 1−δ².
pub fn fixed_point_lambda_min(l: usize, delta: f64) -> f64 {
    ((1.0 / delta).acosh() / l as f64).tanh().powi(2)
}

/// Smallest odd schedule length L with λ_min(L) ≤ `lambda`.
pub fn fixed_point_length(delta: f64, lambda: f64) -> usize {
    if lambda >= 1.0 {
        return 1;
    }
    let l = ((1.0 / delta).acosh() / lambda.sqrt().atanh()).ceil() as usize;
    let mut l = l.max(1);
    if l % 2 == 0 {
        l += 1;
    }
    while l > 1 && fixed_point_lambda_min(l - 2, delta) <= lambda {
        l -= 2;
    }
    l
}

/// Closed-form success probability of the length-`l` schedule.
pub fn fixed_point_success(l: usize, delta: f64, lambda: f64) -> f64 {
    let lf = l as f64;
    let g_inv = cheb(1.0 / lf, 1.0 / delta);
    1.0 - delta * delta * cheb(lf, g_inv * (1.0 - lambda).max(0.0).sqrt()).powi(2)
}

/// Phase pairs for a length L = 2l+1 schedule, j = 1..l, in the convention
/// S_0 gets e^{iα} and S_t gets e^{iβ}: α_j = 2·arccot(tan(2πj/L)·√(1−γ²)),
/// β_j = α_{l−j+1} (i.e. −β_j of the e^{−iβ} convention).
pub fn fixed_point_phases(l_total: usize, delta: f64) -> Vec<(f64, f64)> {
    assert!(l_total % 2 == 1, "schedule length must be odd");
    let l = (l_total - 1) / 2;
    let lf = l_total as f64;
    let gamma = 1.0 / cheb(1.0 / lf, 1.0 / delta);
    let root = (1.0 - gamma * gamma).max(0.0).sqrt();
    let alpha = |j: usize| -> f64 {
        let t = (2.0 * PI * j as f64 / lf).tan() * root;
        // arccot with range (0, π)
        2.0 * (PI / 2.0 - t.atan())
    };
    (1..=l).map(|j| (alpha(j), alpha(l - j + 1))).collect()
}

/// Closed-form Grover success after k iterations.
pub fn grover_success(k: usize, lambda: f64) -> f64 {
    ((2 * k + 1) as f64 * lambda.sqrt().asin()).sin().powi(2)
}

pub enum ReflectAbout {
    /// `A S_0(θ) A†` on `qubits` (plain `S_0` without `prep`).
    Zero { qubits: Vec<usize>, prep: Option<Arc<Circuit>> },
    /// Phase e^{iθ} on states with `flag` = 1.
    Flag { flag: usize },
}

/// I − (1−e^{iθ})|0⟩⟨0| on the chosen lines (optionally conjugated by A),
/// or the flag-conditioned phase.
pub fn reflection(num_qubits: usize, about: &ReflectAbout, theta: f64) -> Result<Circuit, AmplifyError> {
    let mut c = Circuit::new(num_qubits);
    match about {
        ReflectAbout::Flag { flag } => {
            if *flag >= num_qubits {
                return Err(AmplifyError::FlagOutOfRange { flag: *flag, n: num_qubits });
            }
            c.phase(*flag, theta);
        }
        ReflectAbout::Zero { qubits, prep } => {
            if let Some(&q) = qubits.iter().find(|&&q| q >= num_qubits) {
                return Err(QsimError::QubitOutOfRange { qubit: q, n: num_qubits }.into());
            }
            let Some((&t, rest)) = qubits.split_first() else {
                return Ok(c);
            };
            if let Some(a) = prep {
                c.call(None, a, (0..a.num_qubits).collect(), vec![], true);
            }
            c.x(t);
            c.push(Gate::new(GateKind::Phase(theta), vec![t]).with_controls(rest.iter().map(|&q| Control::off(q))));
            c.x(t);
            if let Some(a) = prep {
                c.call(None, a, (0..a.num_qubits).collect(), vec![], false);
            }
        }
    }
    Ok(c)
}

/// Precompiled pieces of a search, reusable across runs and shots.
pub struct Amplifier {
    spec: SearchSpec,
    prep: Vec<FlatOp>,
    unprep: Vec<FlatOp>,
    oracle: Vec<FlatOp>,
    unoracle: Vec<FlatOp>,
    zero_lines: Vec<usize>,
}

/// State after amplification and the final flag read.
#[derive(Clone, Debug)]
pub struct Amplified {
    pub state: State,
    pub queries: usize,
    pub marked_mass: f64,
    pub schedule_length: usize,
    pub counter: QueryCounter,
}

impl Amplifier {
    pub fn new(spec: SearchSpec) -> Result<Self, AmplifyError> {
        spec.validate()?;
        let mut a = spec.state_prep.as_ref().clone();
        a.num_qubits = spec.num_qubits;
        let mut o = spec.oracle.as_ref().clone();
        o.num_qubits = spec.num_qubits;
        Ok(Amplifier {
            prep: a.flatten(),
            unprep: a.inverse().flatten(),
            oracle: o.flatten(),
            unoracle: o.inverse().flatten(),
            zero_lines: (0..spec.num_qubits).collect(),
            spec,
        })
    }

    pub fn spec(&self) -> &SearchSpec {
        &self.spec
    }

    fn flag_mass(&self, s: &State) -> f64 {
        let f = self.spec.flag;
        s.mass(|k| k.bit(f))
    }

    fn target_reflection(&self, s: &mut State, beta: f64, counter: &mut QueryCounter) -> Result<(), AmplifyError> {
        s.run_flat(&self.oracle, counter)?;
        s.apply(&Gate::new(GateKind::Phase(beta), vec![self.spec.flag]))?;
        s.run_flat(&self.unoracle, counter)?;
        counter.add(&self.spec.oracle_label, 1);
        Ok(())
    }

    fn zero_reflection(&self, s: &mut State, alpha: f64) -> Result<(), AmplifyError> {
        let (&t, rest) = self.zero_lines.split_first().expect("nonempty register");
        s.apply(&Gate::new(GateKind::X, vec![t]))?;
        s.apply(&Gate::new(GateKind::Phase(alpha), vec![t]).with_controls(rest.iter().map(|&q| Control::off(q))))?;
        s.apply(&Gate::new(GateKind::X, vec![t]))?;
        Ok(())
    }

    /// A|0⟩ with the flag computed; exact flagged mass.
    pub fn initial_mass(&self) -> Result<f64, AmplifyError> {
        let mut s = State::zero(self.spec.num_qubits, self.spec.backend)?;
        let mut scratch = QueryCounter::default();
        s.run_flat(&self.prep, &mut scratch)?;
        s.run_flat(&self.oracle, &mut scratch)?;
        Ok(self.flag_mass(&s))
    }

    /// Apply A, then G(α_j, β_j) for each phase pair, then read the flag.
    pub fn run_phases(&self, phases: &[(f64, f64)]) -> Result<Amplified, AmplifyError> {
        let mut counter = QueryCounter::default();
        let mut s = State::zero(self.spec.num_qubits, self.spec.backend)?;
        s.run_flat(&self.prep, &mut counter)?;
        for &(alpha, beta) in phases {
            self.target_reflection(&mut s, beta, &mut counter)?;
            s.run_flat(&self.unprep, &mut counter)?;
            self.zero_reflection(&mut s, alpha)?;
            s.run_flat(&self.prep, &mut counter)?;
        }
        s.run_flat(&self.oracle, &mut counter)?;
        counter.add(&self.spec.oracle_label, 1);
        let marked_mass = self.flag_mass(&s);
        Ok(Amplified { state: s, queries: phases.len() + 1, marked_mass, schedule_length: 2 * phases.len() + 1, counter })
    }

    /// Fixed-point schedule of odd length `l_total`.
    pub fn run_fixed_point(&self, l_total: usize) -> Result<Amplified, AmplifyError> {
        self.run_phases(&fixed_point_phases(l_total, self.spec.delta))
    }

    pub fn run_grover(&self, iterations: usize) -> Result<Amplified, AmplifyError> {
        self.run_phases(&vec![(PI, PI); iterations])
    }

    fn sample(&self, a: &mut Amplified, rng: &mut impl Rng) -> SearchOutcome {
        let mut lines = self.spec.output.clone();
        lines.push(self.spec.flag);
        let m = a.state.measure(&lines, rng);
        let k = self.spec.output.len();
        let mask = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
        let out = Measurement { value: m.value & mask, bits: k };
        if m.value >> k & 1 == 1 {
            SearchOutcome::Marked(out)
        } else {
            SearchOutcome::Unmarked(out)
        }
    }

    /// Run the configured schedule and measure once.
    pub fn search(&self, rng: &mut impl Rng) -> Result<SearchResult, AmplifyError> {
        let initial_mass = self.initial_mass()?;
        let budget = self.spec.budget;
        if initial_mass <= MASS_EPS {
            let mut counter = QueryCounter::default();
            counter.add(&self.spec.oracle_label, 1);
            return Ok(SearchResult {
                outcome: SearchOutcome::NotFound,
                queries_used: 1,
                success_prob_estimate: 0.0,
                initial_mass,
                schedule_length: 1,
                counter,
            });
        }
        match self.spec.schedule {
            Schedule::FixedPoint { lambda_min } => {
                let max_l = 2 * budget - 1;
                let l = match lambda_min {
                    Some(w) => fixed_point_length(self.spec.delta, w).min(max_l),
                    None => max_l,
                };
                let mut a = self.run_fixed_point(l)?;
                let outcome = self.sample(&mut a, rng);
                Ok(SearchResult { outcome, queries_used: a.queries, success_prob_estimate: a.marked_mass, initial_mass, schedule_length: l, counter: a.counter })
            }
            Schedule::Grover { iterations } => {
                let k = iterations.min(budget - 1);
                let mut a = self.run_grover(k)?;
                let outcome = self.sample(&mut a, rng);
                Ok(SearchResult { outcome, queries_used: a.queries, success_prob_estimate: a.marked_mass, initial_mass, schedule_length: 2 * k + 1, counter: a.counter })
            }
            Schedule::Exponential => {
                let mut used = 0;
                let mut counter = QueryCounter::default();
                let mut m = 1.0f64;
                loop {
                    let k = rng.gen_range(0..m.floor().max(1.0) as usize);
                    if used + k + 1 > budget {
                        let k = budget.saturating_sub(used + 1);
                        let mut a = self.run_grover(k)?;
                        counter.merge(&a.counter);
                        let outcome = self.sample(&mut a, rng);
                        return Ok(SearchResult {
                            outcome,
                            queries_used: used + a.queries,
                            success_prob_estimate: a.marked_mass,
                            initial_mass,
                            schedule_length: 2 * k + 1,
                            counter,
                        });
                    }
                    let mut a = self.run_grover(k)?;
                    used += a.queries;
                    counter.merge(&a.counter);
                    let outcome = self.sample(&mut a, rng);
                    if matches!(outcome, SearchOutcome::Marked(_)) || used >= budget {
                        return Ok(SearchResult {
                            outcome,
                            queries_used: used,
                            success_prob_estimate: a.marked_mass,
                            initial_mass,
                            schedule_length: 2 * k + 1,
                            counter,
                        });
                    }
                    m *= 6.0 / 5.0;
                }
            }
        }
    }
}

/// One-shot fixed-point (or configured) search.
pub fn fixed_point_search(spec: SearchSpec, rng: &mut impl Rng) -> Result<SearchResult, AmplifyError> {
    Amplifier::new(spec)?.search(rng)
}

/// Exact flagged mass after applying `phases` when A|0⟩ has flagged
/// fraction `lambda`; the dynamics stay in span{good, bad}.
pub fn subspace_success(lambda: f64, phases: &[(f64, f64)]) -> f64 {
    use num_complex::Complex64;
    let s = [lambda.sqrt(), (1.0 - lambda).max(0.0).sqrt()];
    let mut v = [Complex64::new(s[0], 0.0), Complex64::new(s[1], 0.0)];
    let one = Complex64::new(1.0, 0.0);
    for &(alpha, beta) in phases {
        v[0] *= Complex64::from_polar(1.0, beta);
        let proj = v[0] * s[0] + v[1] * s[1];
        let k = (one - Complex64::from_polar(1.0, alpha)) * proj;
        v = [-(v[0] - k * s[0]), -(v[1] - k * s[1])];
    }
    v[0].norm_sqr()
}
