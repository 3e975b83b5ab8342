//! `qatp`: resolution, Wu's method and polynomial identity testing on
//! classical engines or simulated quantum circuits.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use qatp_core::formula::{ground, herbrand_universe, parse_dimacs, parse_fol_problem, parse_prop_problem, skolemize_all, to_cnf, ClauseSet, FolClause};
use qatp_core::pit::{pit_polynomial_quantum, poly_oracle, pit_quantum, sz_classical, EvalGrid, PitEngine, QuantumPitParams};
use qatp_core::poly::{parse_geo, parse_poly_file, wu_prove, Polynomial, WuVerdict};
use qatp_core::qpoly::{
    build_arith, build_arith_coeff, build_coeff_circuit, build_datadriven, kravchuk_to_monomial, prove_geo_hybrid, reset_ancillas, CoeffPath, HybridParams,
    RegisterSpec,
};
use qatp_core::qresolution::{quantum_prove, QResolutionParams};
use qatp_core::qsim::QueryCounter;
use qatp_core::resolution::{refute_fol, saturate, Budget, FolBudget, FolProof, ProofResult, Verdict};
use qatp_core::seed::rng_for;

const EXIT_PROVED: u8 = 0;
const EXIT_NOT_PROVED: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "qatp", version, about = "Theorem proving with simulated quantum search")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Classical,
    QuantumSim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CoeffPathArg {
    Kravchuk,
    Direct,
}

impl From<CoeffPathArg> for CoeffPath {
    fn from(c: CoeffPathArg) -> Self {
        match c {
            CoeffPathArg::Kravchuk => CoeffPath::Kravchuk,
            CoeffPathArg::Direct => CoeffPath::Direct,
        }
    }
}

#[derive(Args, Clone, Debug)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Classical)]
    backend: BackendArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Failure probability of each amplified search.
    #[arg(long, global = true, default_value_t = 0.1)]
    delta: f64,
    /// Minimum samples per quantum resolution round.
    #[arg(long, global = true, default_value_t = 8)]
    shots: usize,
    #[arg(long, global = true, default_value_t = 64)]
    max_rounds: usize,
    #[arg(long, global = true, default_value_t = 4096)]
    max_clauses: usize,
    #[arg(long, global = true, default_value_t = 2)]
    herbrand_depth: usize,
    #[arg(long, global = true, default_value_t = 16)]
    word_bits: usize,
    /// Points per variable of the evaluation grid.
    #[arg(long, global = true, default_value_t = 4)]
    grid: u64,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Include wall-clock time (makes reports differ between runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Refute a DIMACS CNF, or prove the goal of a propositional problem.
    ProveProp { file: PathBuf },
    /// Prove the goal of a first-order problem via Herbrand grounding.
    ProveFol {
        file: PathBuf,
        /// Ground only the instances used by a lifted classical refutation.
        #[arg(long)]
        reduced: bool,
        /// Larger full groundings switch to the reduced instance.
        #[arg(long, default_value_t = 64)]
        max_ground: usize,
    },
    /// Prove geometry conclusions with Wu's method.
    ProveGeo {
        file: PathBuf,
        /// Only this conclusion (default: all).
        #[arg(long)]
        concl: Option<String>,
        /// Trailing pseudo-division steps run as circuits.
        #[arg(long, default_value_t = 1)]
        chain_limit: usize,
        #[arg(long, value_enum, default_value_t = CoeffPathArg::Kravchuk)]
        coeff_path: CoeffPathArg,
    },
    /// Test whether a polynomial vanishes on the grid.
    Pit {
        #[arg(long)]
        poly: PathBuf,
        /// Polynomial name in the file (default: the first).
        #[arg(long)]
        name: Option<String>,
    },
    /// Write the coefficient circuit U_{P,y} as JSON.
    EmitCircuit {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        var: String,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = CoeffPathArg::Kravchuk)]
        coeff_path: CoeffPathArg,
    },
    /// Oracle-query scaling of quantum vs classical search for a single
    /// nonzero point.
    BenchQueries {
        #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024")]
        sizes: Vec<u64>,
        #[arg(long, default_value_t = 40)]
        trials: usize,
    },
}

struct Outcome {
    exit: u8,
    report: Value,
}

fn read(path: &Path) -> Result<(String, String)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok((text, digest))
}

fn counters(q: &QueryCounter) -> Value {
    Value::Object(q.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<Map<_, _>>())
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Refuted => EXIT_PROVED,
        Verdict::Saturated => EXIT_NOT_PROVED,
        Verdict::BudgetExceeded => EXIT_BUDGET,
    }
}

fn backend_name(b: BackendArg) -> &'static str {
    match b {
        BackendArg::Classical => "classical",
        BackendArg::QuantumSim => "quantum-sim",
    }
}

/// Saturate `cs` with the selected backend; returns the result and the
/// per-run detail object.
fn run_resolution(cs: &ClauseSet, g: &Global) -> Result<(ProofResult, Value)> {
    match g.backend {
        BackendArg::Classical => {
            let r = saturate(cs, Budget { max_rounds: g.max_rounds, max_clauses: g.max_clauses });
            let details = json!({
                "verdict": r.verdict,
                "rounds": r.rounds,
                "resolvents_per_round": r.stats.new_per_round,
                "ukb_queries": 0,
                "classical_pair_queries": r.stats.pair_evaluations,
                "final_clauses": r.stats.final_clauses,
                "queries": counters(&r.stats.queries),
                "trace": r.trace_json(),
            });
            Ok((r, details))
        }
        BackendArg::QuantumSim => {
            let params = QResolutionParams {
                delta: g.delta,
                shots: g.shots,
                max_rounds: g.max_rounds,
                max_clauses: g.max_clauses,
                seed: g.seed,
                ..QResolutionParams::default()
            };
            let q = quantum_prove(cs, &params)?;
            let rounds: Vec<Value> = q
                .rounds
                .iter()
                .map(|r| {
                    json!({
                        "m": r.m,
                        "qubits": r.qubits,
                        "engine": r.engine,
                        "valid_resolvents": r.valid_resolvents.len(),
                        "marked": r.s_observed,
                        "shots": r.shots,
                        "searches": r.searches,
                        "ukb_queries": r.ukb_queries,
                        "oracle_queries": r.oracle_queries,
                        "max_schedule": r.max_schedule,
                    })
                })
                .collect();
            let details = json!({
                "verdict": q.result.verdict,
                "rounds": q.result.rounds,
                "resolvents_per_round": q.result.stats.new_per_round,
                "ukb_queries": q.ukb_queries(),
                "classical_pair_queries": q.rounds.iter().map(|r| (r.m * r.m) as u64).sum::<u64>(),
                "final_clauses": q.result.stats.final_clauses,
                "queries": counters(&q.result.stats.queries),
                "round_reports": rounds,
                "trace": q.result.trace_json(),
            });
            Ok((q.result, details))
        }
    }
}

fn is_dimacs(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e == "cnf") || text.lines().any(|l| l.trim_start().starts_with("p cnf"))
}

fn cmd_prove_prop(file: &Path, g: &Global) -> Result<Outcome> {
    let (text, digest) = read(file)?;
    let cs = if is_dimacs(file, &text) { parse_dimacs(&text)? } else { to_cnf(&parse_prop_problem(&text)?.refutation_formula(), None) };
    let (r, details) = run_resolution(&cs, g)?;
    let exit = verdict_exit(r.verdict);
    let mut report = base("prove-prop", &digest, g);
    report.insert("verdict".into(), json!(r.verdict));
    report.insert("clauses".into(), json!(cs.len()));
    report.insert("variables".into(), json!(cs.num_vars()));
    report.insert("details".into(), details);
    Ok(Outcome { exit, report: Value::Object(report) })
}

/// Ground instances used by a lifted refutation, as a propositional set.
fn reduced_instance(clauses: &[FolClause], proof: &FolProof) -> Result<ClauseSet> {
    // Unconstrained variables take the first Herbrand constant.
    let default = herbrand_universe(clauses, 0)?.into_iter().next().expect("nonempty universe");
    Ok(proof.relevant_ground_set(&default))
}

fn cmd_prove_fol(file: &Path, reduced: bool, max_ground: usize, g: &Global) -> Result<Outcome> {
    let (text, digest) = read(file)?;
    let clauses = skolemize_all(&parse_fol_problem(&text)?.refutation_formulas());
    let mut report = base("prove-fol", &digest, g);
    report.insert("skolem_clauses".into(), json!(clauses.iter().map(ToString::to_string).collect::<Vec<_>>()));
    let budget = FolBudget { max_term_depth: Some(g.herbrand_depth), ..FolBudget::default() };
    let mut attempts = Vec::new();
    let last = match g.backend {
        BackendArg::Classical => {
            let proof = refute_fol(&clauses, budget);
            attempts.push(json!({
                "instance": "lifted",
                "max_term_depth": g.herbrand_depth,
                "given": proof.given,
                "derived": proof.clauses.len(),
                "proof": proof.proof_json(),
            }));
            proof.verdict
        }
        BackendArg::QuantumSim => {
            let mut last = Verdict::Saturated;
            let mut use_reduced = reduced;
            if !reduced {
                for depth in 0..=g.herbrand_depth {
                    let grounded = herbrand_universe(&clauses, depth).and_then(|u| Ok((u.len(), ground(&clauses, &u)?)));
                    let (universe, cs) = match grounded {
                        Ok((_, cs)) if cs.len() > max_ground => {
                            attempts.push(json!({"depth": depth, "instance": "full", "ground_clauses": cs.len(), "skipped": format!("more than {max_ground} ground clauses")}));
                            use_reduced = true;
                            break;
                        }
                        Ok(x) => x,
                        Err(e) => {
                            attempts.push(json!({"depth": depth, "instance": "full", "skipped": e.to_string()}));
                            use_reduced = true;
                            break;
                        }
                    };
                    let (r, details) = run_resolution(&cs, g)?;
                    attempts.push(json!({"depth": depth, "instance": "full", "universe": universe, "ground_clauses": cs.len(), "result": details}));
                    last = r.verdict;
                    if r.verdict == Verdict::Refuted {
                        break;
                    }
                }
            }
            if use_reduced {
                let lifted = refute_fol(&clauses, budget);
                if lifted.verdict == Verdict::Refuted {
                    let cs = reduced_instance(&clauses, &lifted)?;
                    let (r, details) = run_resolution(&cs, g)?;
                    attempts.push(json!({"instance": "reduced", "ground_clauses": cs.len(), "result": details}));
                    last = r.verdict;
                } else {
                    attempts.push(json!({"instance": "reduced", "skipped": "no lifted refutation within the depth bound"}));
                    last = lifted.verdict;
                }
            }
            last
        }
    };
    let exit = verdict_exit(last);
    let verdict = match last {
        Verdict::Refuted => "Refuted".to_string(),
        Verdict::BudgetExceeded => "BudgetExceeded".to_string(),
        Verdict::Saturated => format!("undecided at depth {}", g.herbrand_depth),
    };
    report.insert("verdict".into(), json!(verdict));
    report.insert("attempts".into(), Value::Array(attempts));
    Ok(Outcome { exit, report: Value::Object(report) })
}

fn cmd_prove_geo(file: &Path, concl: Option<&str>, chain_limit: usize, coeff_path: CoeffPathArg, g: &Global) -> Result<Outcome> {
    let (text, digest) = read(file)?;
    let geo = parse_geo(&text)?;
    let targets: Vec<_> = geo.concls.iter().filter(|(n, _)| concl.is_none_or(|c| c == n)).collect();
    if targets.is_empty() {
        bail!("no conclusion named {:?}", concl.unwrap_or_default());
    }
    let (hyps, order) = (geo.hyp_polys(), geo.dep_order());
    let mut all_proved = true;
    let mut results = Map::new();
    for (name, c) in targets {
        let (verdict, details) = match g.backend {
            BackendArg::Classical => {
                let p = wu_prove(&hyps, &order, c)?;
                (p.verdict, p.to_json())
            }
            BackendArg::QuantumSim => {
                let params = HybridParams {
                    word_bits: g.word_bits,
                    chain_limit,
                    grid: g.grid,
                    delta: g.delta,
                    coeff_path: coeff_path.into(),
                    engine: PitEngine::Auto,
                    seed: g.seed,
                };
                let h = prove_geo_hybrid(&hyps, &order, c, &params)?;
                (h.verdict, h.to_json())
            }
        };
        all_proved &= verdict == WuVerdict::Proved;
        results.insert(name.clone(), details);
    }
    let mut report = base("prove-geo", &digest, g);
    report.insert("verdict".into(), json!(if all_proved { "Proved" } else { "NotReduced" }));
    report.insert("conclusions".into(), Value::Object(results));
    Ok(Outcome { exit: if all_proved { EXIT_PROVED } else { EXIT_NOT_PROVED }, report: Value::Object(report) })
}

fn pick(file: &Path, name: Option<&str>) -> Result<(String, Polynomial)> {
    let (text, digest) = read(file)?;
    let pf = parse_poly_file(&text)?;
    let p = match name {
        Some(n) => pf.polys.iter().find(|(m, _)| m == n).with_context(|| format!("no polynomial named {n}"))?,
        None => pf.polys.first().context("file declares no polynomial")?,
    };
    Ok((digest, p.1.clone()))
}

/// Samples for a Schwartz–Zippel error of at most δ (exhaustive when the
/// degree reaches the grid size).
fn sz_samples(degree: u32, grid: &EvalGrid, delta: f64) -> usize {
    let ratio = degree as f64 / grid.min_size() as f64;
    if degree == 0 {
        1
    } else if ratio >= 1.0 {
        grid.total().min(1 << 20) as usize
    } else {
        (delta.ln() / ratio.ln()).ceil().max(1.0) as usize
    }
}

fn cmd_pit(file: &Path, name: Option<&str>, g: &Global) -> Result<Outcome> {
    let (digest, p) = pick(file, name)?;
    let grid = EvalGrid::uniform(p.vars().len(), g.grid)?;
    let mut rng = rng_for(g.seed, "pit");
    let mut report = base("pit", &digest, g);
    let verdict = match g.backend {
        BackendArg::Classical => {
            let d = p.total_degree().unwrap_or(0);
            sz_classical(poly_oracle(&p), &grid, d, sz_samples(d, &grid, g.delta), &mut rng)
        }
        BackendArg::QuantumSim => {
            let (v, retest) = pit_polynomial_quantum(&p, &grid, g.word_bits, g.delta, &QuantumPitParams::default(), &mut rng)?;
            report.insert("retest_word_bits".into(), json!(retest));
            v
        }
    };
    let exit = if verdict.is_zero() { EXIT_PROVED } else { EXIT_NOT_PROVED };
    if let Value::Object(m) = verdict.to_json() {
        report.extend(m);
    }
    report.insert("polynomial".into(), json!(p.to_string()));
    Ok(Outcome { exit, report: Value::Object(report) })
}

fn cmd_emit_circuit(file: &Path, name: Option<&str>, var: &str, degree: usize, coeff_path: CoeffPathArg, g: &Global) -> Result<Outcome> {
    let (_, p) = pick(file, name)?;
    let y = p.var_id(var).with_context(|| format!("unknown variable {var}"))?;
    let bits = |v: u64| (64 - v.leading_zeros()).max(1) as usize;
    let mut input_bits = vec![bits(g.grid.max(2) - 1); p.vars().len()];
    input_bits[y] = input_bits[y].max(bits(degree as u64));
    let spec = RegisterSpec::new(g.word_bits, input_bits)?.with_degree_bits(bits(degree as u64))?;
    let c = match coeff_path {
        CoeffPathArg::Direct => build_arith_coeff(&p, y, &spec)?,
        CoeffPathArg::Kravchuk => kravchuk_to_monomial(&build_coeff_circuit(&build_arith(&p, &spec)?, y, degree)?)?,
    };
    Ok(Outcome { exit: EXIT_PROVED, report: reset_ancillas(&c).circuit.to_json() })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
}

fn cmd_bench_queries(sizes: &[u64], trials: usize, g: &Global) -> Result<Outcome> {
    if sizes.len() < 2 || trials == 0 {
        bail!("need at least two sizes and one trial");
    }
    let mut rows = Vec::new();
    let (mut lx, mut lq, mut lc) = (Vec::new(), Vec::new(), Vec::new());
    for &n in sizes {
        let marked = n / 3;
        let points: Vec<(u64, BigInt)> = (0..n).map(|i| (i, BigInt::from((i == marked) as u8))).collect();
        let pc = build_datadriven(&points, 4)?;
        let grid = EvalGrid::new(vec![n])?;
        let mut rng = rng_for(g.seed, &format!("bench-{n}"));
        let params = QuantumPitParams { h_min: 1.0, engine: PitEngine::Emulated };
        let mut q = 0u64;
        let mut c = 0u64;
        for _ in 0..trials {
            q += pit_quantum(&pc, &grid, g.delta, &params, &mut rng)?.queries;
            c += sz_classical(|x: &[u64]| BigInt::from((x[0] == marked) as u8), &grid, 1, usize::MAX, &mut rng).queries;
        }
        let (qm, cm) = (q as f64 / trials as f64, c as f64 / trials as f64);
        lx.push((n as f64).ln());
        lq.push(qm.ln());
        lc.push(cm.ln());
        rows.push(json!({"size": n, "quantum_mean_queries": qm, "classical_mean_queries": cm}));
    }
    let mut report = base("bench-queries", "", g);
    report.insert("rows".into(), Value::Array(rows));
    report.insert("quantum_slope".into(), json!(slope(&lx, &lq)));
    report.insert("classical_slope".into(), json!(slope(&lx, &lc)));
    report.insert("verdict".into(), json!("Measured"));
    Ok(Outcome { exit: EXIT_PROVED, report: Value::Object(report) })
}

fn base(command: &str, digest: &str, g: &Global) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("input_sha256".into(), json!(digest));
    m.insert("backend".into(), json!(backend_name(g.backend)));
    m.insert("seed".into(), json!(g.seed));
    m
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    if !(g.delta > 0.0 && g.delta < 1.0) {
        bail!("--delta must lie in (0, 1)");
    }
    match &cli.command {
        Command::ProveProp { file } => cmd_prove_prop(file, g),
        Command::ProveFol { file, reduced, max_ground } => cmd_prove_fol(file, *reduced, *max_ground, g),
        Command::ProveGeo { file, concl, chain_limit, coeff_path } => cmd_prove_geo(file, concl.as_deref(), *chain_limit, *coeff_path, g),
        Command::Pit { poly, name } => cmd_pit(poly, name.as_deref(), g),
        Command::EmitCircuit { poly, name, var, degree, coeff_path } => cmd_emit_circuit(poly, name.as_deref(), var, *degree, *coeff_path, g),
        Command::BenchQueries { sizes, trials } => cmd_bench_queries(sizes, *trials, g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PROVED };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok(mut out) => {
            if cli.global.timing {
                if let Value::Object(m) = &mut out.report {
                    m.insert("timing_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
                }
            }
            let text = serde_json::to_string_pretty(&out.report).expect("serializable report");
            if let Some(path) = &cli.global.json {
                if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(EXIT_ERROR);
                }
            }
            println!("{text}");
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
