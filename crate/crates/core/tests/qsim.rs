use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use qatp_core::qsim::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Full 2^n × 2^n matrix of one gate, built column by column from the
/// textbook definition of each gate on the selected bits.
fn gate_matrix(n: usize, g: &Gate) -> M {
    let dim = 1 << n;
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let active = g.controls.iter().all(|k| ((col >> k.qubit) & 1 == 1) == k.value);
        if !active {
            m[col][col] = c(1.0, 0.0);
            continue;
        }
        match g.kind {
            GateKind::H => {
                let t = g.targets[0];
                let b = (col >> t) & 1;
                let s = 1.0 / 2f64.sqrt();
                m[col & !(1 << t)][col] += c(s, 0.0);
                m[col | (1 << t)][col] += c(if b == 1 { -s } else { s }, 0.0);
            }
            GateKind::X => m[col ^ (1 << g.targets[0])][col] = c(1.0, 0.0),
            GateKind::Z => {
                let b = (col >> g.targets[0]) & 1;
                m[col][col] = c(if b == 1 { -1.0 } else { 1.0 }, 0.0);
            }
            GateKind::Phase(t) => {
                let b = (col >> g.targets[0]) & 1;
                m[col][col] = if b == 1 { Complex64::from_polar(1.0, t) } else { c(1.0, 0.0) };
            }
            GateKind::Swap => {
                let (a, b) = (g.targets[0], g.targets[1]);
                let (x, y) = ((col >> a) & 1, (col >> b) & 1);
                let row = if x != y { col ^ (1 << a) ^ (1 << b) } else { col };
                m[row][col] = c(1.0, 0.0);
            }
        }
    }
    m
}

fn matmul(a: &M, b: &M) -> M {
    let d = a.len();
    let mut r = vec![vec![c(0.0, 0.0); d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                r[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    r
}

fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> Gate {
    let mut qs: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        qs.swap(i, rng.gen_range(0..=i));
    }
    let kind = match rng.gen_range(0..if n < 2 { 4 } else { 5 }) {
        0 => GateKind::H,
        1 => GateKind::X,
        2 => GateKind::Z,
        3 => GateKind::Phase(rng.gen_range(-PI..PI)),
        _ => GateKind::Swap,
    };
    let nt = if kind == GateKind::Swap { 2 } else { 1 };
    let nc = rng.gen_range(0..=(n - nt).min(2));
    let targets = qs[..nt].to_vec();
    let controls = qs[nt..nt + nc].iter().map(|&q| Control { qubit: q, value: rng.gen() }).collect::<Vec<_>>();
    Gate::new(kind, targets).with_controls(controls)
}

fn random_circuit(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut circ = Circuit::new(n);
    for _ in 0..len {
        circ.push(random_gate(n, rng));
    }
    circ
}

fn dense_amps(s: &State) -> Vec<Complex64> {
    let n = s.num_qubits();
    let mut v = vec![c(0.0, 0.0); 1 << n];
    for (k, a) in s.entries() {
        v[k.low() as usize] = a;
    }
    v
}

fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

#[test]
fn simulators_match_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=6 {
        for _ in 0..8 {
            let circ = random_circuit(n, 30, &mut rng);
            let dim = 1 << n;
            let mut u: M = (0..dim).map(|i| (0..dim).map(|j| c((i == j) as u8 as f64, 0.0)).collect()).collect();
            for g in circ.gates() {
                u = matmul(&gate_matrix(n, &g), &u);
            }
            let input = rng.gen_range(0..dim);
            let expect: Vec<Complex64> = (0..dim).map(|i| u[i][input]).collect();
            for backend in [Backend::Dense, Backend::Sparse] {
                let mut s = State::basis(n, BasisKey::from_u64(input as u64), backend).unwrap();
                s.run(&circ, &mut QueryCounter::default()).unwrap();
                assert!(close(&dense_amps(&s), &expect, 1e-9), "n={n} backend={backend:?}");
            }
        }
    }
}

#[test]
fn basic_gate_examples() {
    let mut s = State::zero(1, Backend::Dense).unwrap();
    s.apply(&Gate::new(GateKind::H, vec![0])).unwrap();
    let r = 1.0 / 2f64.sqrt();
    assert!(close(&dense_amps(&s), &[c(r, 0.0), c(r, 0.0)], 1e-12));

    let s = apply(State::zero(1, Backend::Dense).unwrap(), &Gate::new(GateKind::X, vec![0])).unwrap();
    assert_eq!(s.as_basis(), Some(BasisKey::from_u64(1)));

    // controlled phase π on |11⟩ flips the sign
    let mut s = State::basis(2, BasisKey::from_u64(3), Backend::Sparse).unwrap();
    s.apply(&Gate::new(GateKind::Phase(PI), vec![1]).with_controls([Control::on(0)])).unwrap();
    assert!((s.amplitude(&BasisKey::from_u64(3)) - c(-1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn out_of_range_gate_is_rejected() {
    let mut s = State::zero(2, Backend::Dense).unwrap();
    assert!(matches!(s.apply(&Gate::new(GateKind::X, vec![5])), Err(QsimError::QubitOutOfRange { .. })));
    let bad = Gate::new(GateKind::X, vec![0]).with_controls([Control::on(0)]);
    assert!(matches!(s.apply(&bad), Err(QsimError::InvalidGate(_))));
}

#[test]
fn dense_capacity_is_checked_before_allocation() {
    assert!(matches!(State::zero(200, Backend::Dense), Err(QsimError::Capacity { .. })));
    assert!(State::zero(200, Backend::Sparse).is_ok());
    assert!(matches!(State::zero(300, Backend::Sparse), Err(QsimError::Capacity { .. })));
}

#[test]
fn qft_matches_dft_matrix() {
    for a in 1..=5usize {
        let dim = 1usize << a;
        let reg = Register { name: "r".into(), start: 0, len: a };
        for x in 0..dim {
            let s = qft(State::basis(a, BasisKey::from_u64(x as u64), Backend::Dense).unwrap(), &reg).unwrap();
            let expect: Vec<Complex64> = (0..dim)
                .map(|k| Complex64::from_polar(1.0 / (dim as f64).sqrt(), 2.0 * PI * (x * k) as f64 / dim as f64))
                .collect();
            assert!(close(&dense_amps(&s), &expect, 1e-9), "a={a} x={x}");
        }
    }
}

#[test]
fn qft_examples() {
    // zero state → uniform
    let reg = Register { name: "r".into(), start: 0, len: 3 };
    let s = qft(State::zero(3, Backend::Dense).unwrap(), &reg).unwrap();
    let u = 1.0 / 8f64.sqrt();
    assert!(dense_amps(&s).iter().all(|a| (a - c(u, 0.0)).norm() < 1e-12));
    // 1-qubit QFT is H
    let mut c1 = Circuit::new(1);
    append_qft(&mut c1, &[0]);
    assert_eq!(c1.gates(), vec![Gate::new(GateKind::H, vec![0])]);
    // QFT then inverse
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut prep = random_circuit(4, 20, &mut rng);
    let mut st = State::zero(4, Backend::Dense).unwrap();
    st.run(&prep, &mut QueryCounter::default()).unwrap();
    let before = dense_amps(&st);
    prep = Circuit::new(4);
    append_qft(&mut prep, &[0, 1, 2, 3]);
    append_iqft(&mut prep, &[0, 1, 2, 3]);
    st.run(&prep, &mut QueryCounter::default()).unwrap();
    assert!(close(&dense_amps(&st), &before, 1e-9));
}

#[test]
fn fourier_adder_adds_constants() {
    for a in 1..=5usize {
        let m = 1u64 << a;
        for x in 0..m {
            for v in [0u64, 1, 3, m - 1, 5 % m] {
                let qs: Vec<usize> = (0..a).collect();
                let mut circ = Circuit::new(a);
                append_qft(&mut circ, &qs);
                append_fourier_add(&mut circ, &qs, v as u128, &[]);
                append_iqft(&mut circ, &qs);
                let out = run_basis(&circ, BasisKey::from_u64(x), &mut QueryCounter::default()).unwrap().unwrap();
                assert_eq!(out.low(), (x + v) % m);
            }
        }
    }
}

#[test]
fn measurement_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let one = State::basis(1, BasisKey::from_u64(1), Backend::Dense).unwrap();
    let reg1 = Register { name: "q".into(), start: 0, len: 1 };
    let (m, _) = measure(one, &reg1, &mut rng);
    assert_eq!(m.value, 1);

    let reg2 = Register { name: "q".into(), start: 0, len: 2 };
    let s = State::basis(2, BasisKey::from_u64(0b10), Backend::Sparse).unwrap();
    let (m, _) = measure(s, &reg2, &mut rng);
    assert_eq!(m.to_string(), "10");

    let mut ones = 0;
    let trials = 10_000;
    for seed in 0..trials {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut s = State::zero(1, Backend::Dense).unwrap();
        s.apply(&Gate::new(GateKind::H, vec![0])).unwrap();
        let (m, post) = measure(s, &reg1, &mut r);
        ones += m.value;
        assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(post.as_basis(), Some(BasisKey::from_u64(m.value)));
    }
    let f = ones as f64 / trials as f64;
    assert!((f - 0.5).abs() <= 0.02, "frequency {f}");
}

#[test]
fn measurement_is_seed_deterministic() {
    let prep = {
        let mut c = Circuit::new(3);
        for q in 0..3 {
            c.h(q);
        }
        c
    };
    let run = |seed| {
        let mut s = State::zero(3, Backend::Sparse).unwrap();
        s.run(&prep, &mut QueryCounter::default()).unwrap();
        s.measure(&[0, 1, 2], &mut ChaCha8Rng::seed_from_u64(seed)).value
    };
    assert_eq!(run(9), run(9));
}

#[test]
fn calls_flatten_with_controls_adjoint_and_ticks() {
    let mut sub = Circuit::new(2);
    sub.h(0);
    sub.phase(1, 0.3);
    let sub = Arc::new(sub);
    let mut top = Circuit::new(4);
    top.call(Some("U"), &sub, vec![2, 3], vec![Control::on(0)], false);
    top.call(Some("U"), &sub, vec![2, 3], vec![Control::on(0)], true);
    let flat = top.flatten();
    assert_eq!(top.query_counts().get("U"), 2);
    let gates = top.gates();
    assert_eq!(gates.len(), 4);
    assert_eq!(gates[0].targets, vec![2]);
    assert_eq!(gates[0].controls, vec![Control::on(0)]);
    assert_eq!(gates[2].kind, GateKind::Phase(-0.3));
    assert_eq!(gates[3].kind, GateKind::H);
    assert!(matches!(flat[0], FlatOp::Tick(_)));
    // the pair is the identity on every input
    for x in 0..16u64 {
        let out = run_basis(&top, BasisKey::from_u64(x), &mut QueryCounter::default()).unwrap();
        assert_eq!(out, Some(BasisKey::from_u64(x)));
    }
}

#[test]
fn depth_layers_parallel_gates() {
    let mut c = Circuit::new(3);
    c.h(0);
    c.h(1);
    c.h(2);
    assert_eq!(c.depth(), 1);
    c.cx(vec![Control::on(0)], 1);
    c.x(2);
    assert_eq!(c.depth(), 2);
    c.cx(vec![Control::on(1)], 2);
    assert_eq!(c.depth(), 3);
}

#[test]
fn json_emission_shape() {
    let mut c = Circuit::new(0);
    let r = c.add_register("out", 2);
    c.h(r.qubit(0));
    c.cphase(vec![Control::on(0)], 1, 0.5);
    let v = c.to_json();
    assert_eq!(v["num_qubits"], 2);
    assert_eq!(v["registers"][0]["name"], "out");
    assert_eq!(v["gates"][1]["kind"], "phase");
    assert_eq!(v["gates"][1]["controls"][0], 0);
    assert_eq!(v["gates"][1]["theta"], 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gate_then_adjoint_is_identity(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prep = random_circuit(n, 12, &mut rng);
        let g = random_gate(n, &mut rng);
        for backend in [Backend::Dense, Backend::Sparse] {
            let mut s = State::zero(n, backend).unwrap();
            s.run(&prep, &mut QueryCounter::default()).unwrap();
            let before = dense_amps(&s);
            s.apply(&g).unwrap();
            s.apply(&g.adjoint()).unwrap();
            prop_assert!(close(&dense_amps(&s), &before, 1e-9));
        }
    }

    #[test]
    fn norm_is_preserved(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = random_circuit(6, 1000, &mut rng);
        for backend in [Backend::Dense, Backend::Sparse] {
            let mut s = State::zero(6, backend).unwrap();
            s.run(&circ, &mut QueryCounter::default()).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_circuit_undoes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = random_circuit(5, 40, &mut rng);
        let mut s = State::zero(5, Backend::Sparse).unwrap();
        s.run(&circ, &mut QueryCounter::default()).unwrap();
        s.run(&circ.inverse(), &mut QueryCounter::default()).unwrap();
        prop_assert_eq!(s.as_basis(), Some(BasisKey::default()));
    }
}
