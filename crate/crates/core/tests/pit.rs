use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use qatp_core::amplify::{fixed_point_phases, subspace_success};
use qatp_core::pit::*;
use qatp_core::poly::{parse_poly, vars, Polynomial, Vars};
use qatp_core::qpoly::{append_add_register, build_arith, build_datadriven, PolyCircuit, RegisterSpec};
use qatp_core::qsim::{append_iqft, append_qft, Circuit};
use qatp_core::seed::rng_for;

fn p(s: &str, v: &Vars) -> Polynomial {
    parse_poly(s, v).unwrap()
}

fn planted(size: u64, marked: &[u64], w: usize) -> PolyCircuit {
    let pts: Vec<(u64, BigInt)> = (0..size).map(|i| (i, if marked.contains(&i) { BigInt::from(3) } else { BigInt::zero() })).collect();
    build_datadriven(&pts, w).unwrap()
}

/// Circuit computing S(x) − S(x) through two separate evaluations and a
/// Fourier subtraction: identically zero, but not trivially so.
fn difference_of_copies(s: &Polynomial, spec: &RegisterSpec) -> PolyCircuit {
    let us = build_arith(s, spec).unwrap();
    let mut c = Circuit::new(0);
    let inputs: Vec<_> = us.inputs.iter().map(|(n, r)| (n.clone(), c.add_register(n.clone(), r.len))).collect();
    let out = c.add_register("out", spec.word_bits);
    let a = c.add_register("a", spec.word_bits);
    let b = c.add_register("b", spec.word_bits);
    let map = |target: &qatp_core::qsim::Register| {
        let mut m: Vec<usize> = inputs.iter().flat_map(|(_, r)| r.qubits()).collect();
        m.extend(target.qubits());
        m
    };
    c.call(Some("U_S"), &us.circuit, map(&a), Vec::new(), false);
    c.call(Some("U_S"), &us.circuit, map(&b), Vec::new(), false);
    append_qft(&mut c, &out.qubits());
    append_add_register(&mut c, &a, &out, false, &[]);
    append_add_register(&mut c, &b, &out, true, &[]);
    append_iqft(&mut c, &out.qubits());
    PolyCircuit { circuit: Arc::new(c), inputs, output: out, ancillas: vec![a, b], word_bits: spec.word_bits, degree_bits: 2, meta: "S - S".into() }
}

#[test]
fn classical_examples() {
    let v = vars(&["x", "y"]);
    let grid = EvalGrid::uniform(2, 8).unwrap();
    let mut rng = rng_for(1, "sz");
    let zero = Polynomial::zero(&v);
    let r = sz_classical(poly_oracle(&zero), &grid, 2, 10, &mut rng);
    assert_eq!(r.queries, 10);
    match r.outcome {
        PitOutcome::LikelyZero { confidence } => assert!((confidence - (1.0 - 0.25f64.powi(10))).abs() < 1e-12),
        o => panic!("{o:?}"),
    }
    let one = Polynomial::constant(&v, 1);
    let r = sz_classical(poly_oracle(&one), &grid, 0, 10, &mut rng);
    assert_eq!(r.queries, 1);
    assert!(matches!(r.outcome, PitOutcome::NonzeroWitness { ref value, .. } if *value == BigInt::from(1)));
    assert!(EvalGrid::new(vec![4, 0]).is_err());
}

#[test]
fn schwartz_zippel_hit_rate() {
    let v = vars(&["x"]);
    let q = p("x - 1", &v);
    let grid = EvalGrid::uniform(1, 8).unwrap();
    // Exact probability by enumeration.
    let exact = (0..8).filter(|&a| q.eval_at(&[BigInt::from(a)]).is_zero()).count() as f64 / 8.0;
    assert_eq!(exact, 0.125);
    let mut rng = rng_for(7, "sz-rate");
    let trials = 10_000;
    let hits = (0..trials).filter(|_| sz_classical(poly_oracle(&q), &grid, 1, 1, &mut rng).is_zero()).count();
    let rate = hits as f64 / trials as f64;
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!(rate <= exact + 3.0 * sigma, "rate {rate}");
    assert!(rate >= exact - 3.0 * sigma, "rate {rate}");
}

#[test]
fn quantum_trivial_cases() {
    let v = vars(&["x", "y"]);
    let spec = RegisterSpec::uniform(4, 2, 2).unwrap();
    let grid = EvalGrid::uniform(2, 4).unwrap();
    let mut rng = rng_for(2, "qpit");
    for engine in [PitEngine::GateLevel, PitEngine::Emulated] {
        let params = QuantumPitParams { engine, ..Default::default() };
        let zero = build_arith(&Polynomial::zero(&v), &spec).unwrap();
        let r = pit_quantum(&zero, &grid, 0.1, &params, &mut rng).unwrap();
        assert_eq!(r.outcome, PitOutcome::ExactZero);
        assert_eq!(r.marked_mass, Some(0.0));
        let one = build_arith(&Polynomial::constant(&v, 1), &spec).unwrap();
        let r = pit_quantum(&one, &grid, 0.1, &params, &mut rng).unwrap();
        assert!(matches!(r.outcome, PitOutcome::NonzeroWitness { .. }));
        assert_eq!(r.schedules, vec![1]);
        assert_eq!(r.queries, 1);
        assert!((r.marked_mass.unwrap() - 1.0).abs() < 1e-12);
    }
    let one = build_arith(&Polynomial::constant(&v, 1), &spec).unwrap();
    assert!(matches!(pit_quantum(&one, &EvalGrid::uniform(2, 3).unwrap(), 0.1, &Default::default(), &mut rng), Err(PitError::InvalidGrid(_))));
    assert!(matches!(pit_quantum(&one, &EvalGrid::uniform(2, 8).unwrap(), 0.1, &Default::default(), &mut rng), Err(PitError::Capacity(_))));
    assert!(matches!(pit_quantum(&one, &grid, 1.5, &Default::default(), &mut rng), Err(PitError::InvalidDelta(_))));
}

#[test]
fn planted_two_of_sixty_four() {
    let delta = 0.1;
    let pc = planted(64, &[17, 50], 4);
    let grid = EvalGrid::new(vec![64]).unwrap();
    let budget = ((2.0f64 / delta).ln().ceil() * (64.0f64 / 2.0).sqrt().ceil()) as u64;
    assert_eq!(budget, 18);
    let ladder = quantum_ladder(64, delta, 2.0);
    let l = *ladder.last().unwrap();
    // Independent two-dimensional recursion for the exact success.
    assert!(subspace_success(2.0 / 64.0, &fixed_point_phases(l, delta)) >= 0.99);
    for engine in [PitEngine::GateLevel, PitEngine::Emulated] {
        let params = QuantumPitParams { h_min: 2.0, engine };
        let mut found = 0;
        for seed in 0..20 {
            let r = pit_quantum(&pc, &grid, delta, &params, &mut rng_for(seed, "planted")).unwrap();
            assert!(r.budget <= budget);
            assert!(r.queries <= budget);
            assert!((r.marked_mass.unwrap() - 2.0 / 64.0).abs() < 1e-9);
            if let PitOutcome::NonzeroWitness { point, .. } = &r.outcome {
                assert!(point[0] == 17 || point[0] == 50);
                found += 1;
            }
        }
        assert!(found >= 18, "{engine:?}: {found}/20");
    }
}

#[test]
fn quantum_and_classical_scaling() {
    let delta = 0.1;
    let sizes = [16u64, 64, 256, 1024];
    let mut q = Vec::new();
    let mut c = Vec::new();
    for &g in &sizes {
        let pc = planted(g, &[g / 3], 4);
        let grid = EvalGrid::new(vec![g]).unwrap();
        let params = QuantumPitParams { h_min: 1.0, engine: PitEngine::Emulated };
        let mut rng = rng_for(g, "scaling");
        let trials = 40;
        let qmean: f64 = (0..trials).map(|_| pit_quantum(&pc, &grid, delta, &params, &mut rng).unwrap().queries as f64).sum::<f64>() / trials as f64;
        let oracle = |x: &[u64]| BigInt::from((x[0] == g / 3) as u8);
        let ctrials = 400;
        let cmean: f64 = (0..ctrials).map(|_| sz_classical(oracle, &grid, 1, usize::MAX, &mut rng).queries as f64).sum::<f64>() / ctrials as f64;
        q.push(qmean);
        c.push(cmean);
    }
    let slope = |ys: &[f64]| {
        let xs: Vec<f64> = sizes.iter().map(|&g| (g as f64).ln()).collect();
        let ys: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
        xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
    };
    let (sq, sc) = (slope(&q), slope(&c));
    assert!((sq - 0.5).abs() <= 0.1, "quantum slope {sq} from {q:?}");
    assert!((sc - 1.0).abs() <= 0.1, "classical slope {sc} from {c:?}");
}

#[test]
fn wide_retest_catches_wraparound() {
    let v = vars(&["x"]);
    // 256·x vanishes mod 2^8 everywhere but not over the integers.
    let q = p("256*x", &v);
    let grid = EvalGrid::uniform(1, 4).unwrap();
    let mut rng = rng_for(3, "wrap");
    let (r, retest) = pit_polynomial_quantum(&q, &grid, 8, 0.05, &Default::default(), &mut rng).unwrap();
    assert_eq!(retest, Some(24));
    match r.outcome {
        PitOutcome::NonzeroWitness { point, value } => assert_eq!(value, BigInt::from(256 * point[0])),
        o => panic!("{o:?}"),
    }
}

fn poly_strategy() -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((prop::collection::vec(0..=2u32, 2), -3i64..=3), 1..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn quantum_agrees_with_classical(raw in poly_strategy(), make_zero in any::<bool>(), seed in any::<u64>()) {
        let v = vars(&["x", "y"]);
        let s = Polynomial::from_terms(&v, raw.iter().map(|(e, c)| (e.clone(), BigInt::from(*c))));
        let spec = RegisterSpec::uniform(12, 2, 3).unwrap();
        let grid = EvalGrid::uniform(2, 8).unwrap();
        let pc = if make_zero { difference_of_copies(&s, &spec) } else { build_arith(&s, &spec).unwrap() };
        let truth_zero = make_zero || (0..64u64).all(|i| s.eval_at(&[BigInt::from(i % 8), BigInt::from(i / 8)]).is_zero());
        let mut rng = rng_for(seed, "agree");
        let r = pit_quantum(&pc, &grid, 0.01, &QuantumPitParams { engine: PitEngine::Emulated, ..Default::default() }, &mut rng).unwrap();
        prop_assert_eq!(r.is_zero(), truth_zero);
        if truth_zero {
            prop_assert_eq!(r.outcome, PitOutcome::ExactZero);
        }
        let classical_poly = if make_zero { s.sub(&s).unwrap() } else { s.clone() };
        let c = sz_classical(poly_oracle(&classical_poly), &grid, 4, 64, &mut rng);
        if truth_zero {
            prop_assert!(c.is_zero());
        } else if let PitOutcome::NonzeroWitness { point, value } = &c.outcome {
            prop_assert_eq!(value, &s.eval_at(&[BigInt::from(point[0]), BigInt::from(point[1])]));
        }
    }
}
