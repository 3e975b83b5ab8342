use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use qatp_core::amplify::*;
use qatp_core::qsim::{Backend, BasisKey, Circuit, QueryCounter, State};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two-level model: amplitudes on (good, bad), A|0⟩ = (√λ, √(1−λ)).
fn two_level(lambda: f64, phases: &[(f64, f64)]) -> f64 {
    let s = [Complex64::new(lambda.sqrt(), 0.0), Complex64::new((1.0 - lambda).sqrt(), 0.0)];
    let mut v = s;
    for &(alpha, beta) in phases {
        v[0] *= Complex64::from_polar(1.0, beta);
        // A S_0(α) A† = I − (1 − e^{iα}) |s⟩⟨s|
        let proj = s[0].conj() * v[0] + s[1].conj() * v[1];
        let k = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, alpha)) * proj;
        v = [-(v[0] - k * s[0]), -(v[1] - k * s[1])];
    }
    v[0].norm_sqr()
}

/// Uniform superposition over n lines; oracle flags `marked` into line n.
fn uniform_search(n: usize, marked: &[u64]) -> SearchSpec {
    let mut prep = Circuit::new(0);
    let reg = prep.add_register("x", n);
    prep.add_register("flag", 1);
    for q in reg.qubits() {
        prep.h(q);
    }
    let mut oracle = Circuit::new(n + 1);
    for &m in marked {
        oracle.cx(reg.pattern(m), n);
    }
    let mut s = SearchSpec::new(Arc::new(prep), Arc::new(oracle), n, reg.qubits());
    s.backend = Backend::Dense;
    s
}

#[test]
fn closed_form_matches_two_level_recursion() {
    for &delta in &[0.1, 0.3, 0.5] {
        for l in [1usize, 3, 5, 9, 15, 31] {
            let ph = fixed_point_phases(l, delta);
            for i in 1..40 {
                let lambda = i as f64 / 40.0;
                let a = two_level(lambda, &ph);
                let b = fixed_point_success(l, delta, lambda);
                assert!((a - b).abs() < 1e-9, "L={l} δ={delta} λ={lambda}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn grover_iterates_match_sin_squared() {
    for n in 4..=8 {
        for denom in [16u64, 8, 4] {
            let h = (1u64 << n) / denom;
            let marked: Vec<u64> = (0..h).map(|i| (i * 7 + 3) % (1 << n)).collect();
            let mut uniq = marked.clone();
            uniq.sort();
            uniq.dedup();
            let lambda = uniq.len() as f64 / (1u64 << n) as f64;
            let amp = Amplifier::new(uniform_search(n, &uniq)).unwrap();
            for k in 0..4 {
                let a = amp.run_grover(k).unwrap();
                assert!((a.marked_mass - grover_success(k, lambda)).abs() < 1e-6);
                assert_eq!(a.queries, k + 1);
            }
        }
    }
}

#[test]
fn fixed_point_256_single_marked() {
    let spec = SearchSpec { delta: 0.1, schedule: Schedule::FixedPoint { lambda_min: Some(1.0 / 256.0) }, budget: 1000, ..uniform_search(8, &[77]) };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let r = fixed_point_search(spec, &mut rng).unwrap();
    assert!(r.success_prob_estimate >= 0.99, "{}", r.success_prob_estimate);
    let bound = (2.0f64 / 0.1).ln().ceil() as usize * 16;
    assert!(r.queries_used <= bound, "{} > {bound}", r.queries_used);
    assert!((r.initial_mass - 1.0 / 256.0).abs() < 1e-12);
}

#[test]
fn no_overshoot_above_threshold() {
    let n = 6;
    let delta = 0.2;
    let l = fixed_point_length(delta, 1.0 / 64.0);
    let phases = fixed_point_phases(l, delta);
    for h in 1..=64u64 {
        let marked: Vec<u64> = (0..h).collect();
        let amp = Amplifier::new(uniform_search(n, &marked)).unwrap();
        let a = amp.run_phases(&phases).unwrap();
        assert!(a.marked_mass >= 1.0 - delta * delta - 1e-9, "h={h}: {}", a.marked_mass);
        assert!((a.marked_mass - fixed_point_success(l, delta, h as f64 / 64.0)).abs() < 1e-9);
    }
}

#[test]
fn trivial_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let all: Vec<u64> = (0..8).collect();
    let spec = SearchSpec { schedule: Schedule::FixedPoint { lambda_min: Some(1.0) }, ..uniform_search(3, &all) };
    let r = fixed_point_search(spec, &mut rng).unwrap();
    assert!(matches!(r.outcome, SearchOutcome::Marked(_)));
    assert_eq!(r.queries_used, 1);

    let r = fixed_point_search(uniform_search(3, &[]), &mut rng).unwrap();
    assert_eq!(r.outcome, SearchOutcome::NotFound);
    assert_eq!(r.success_prob_estimate, 0.0);

    let bad = SearchSpec { delta: 1.5, ..uniform_search(3, &[1]) };
    assert!(matches!(fixed_point_search(bad, &mut rng), Err(AmplifyError::InvalidDelta(_))));
}

#[test]
fn exponential_mode_finds_marked() {
    let mut found = 0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = SearchSpec { schedule: Schedule::Exponential, budget: 200, ..uniform_search(7, &[5]) };
        let r = fixed_point_search(spec, &mut rng).unwrap();
        assert!(r.queries_used <= 200);
        if let SearchOutcome::Marked(m) = r.outcome {
            assert_eq!(m.value, 5);
            found += 1;
        }
    }
    assert!(found >= 18, "found {found}/20");
}

#[test]
fn prep_calls_are_counted_per_application() {
    let mut inner = Circuit::new(4);
    for q in 0..4 {
        inner.h(q);
    }
    let inner = Arc::new(inner);
    let mut prep = Circuit::new(5);
    prep.call(Some("A"), &inner, vec![0, 1, 2, 3], vec![], false);
    let mut oracle = Circuit::new(5);
    let reg = qatp_core::qsim::Register { name: "x".into(), start: 0, len: 4 };
    oracle.cx(reg.pattern(9), 4);
    let spec = SearchSpec::new(Arc::new(prep), Arc::new(oracle), 4, vec![0, 1, 2, 3]);
    let amp = Amplifier::new(spec).unwrap();
    let a = amp.run_fixed_point(7).unwrap();
    assert_eq!(a.counter.get("A"), 7);
    assert_eq!(a.counter.get("oracle"), 4);
    assert_eq!(a.queries, 4);
}

fn unitary(c: &Circuit) -> Vec<Vec<Complex64>> {
    let n = c.num_qubits;
    (0..1u64 << n)
        .map(|col| {
            let mut s = State::basis(n, BasisKey::from_u64(col), Backend::Dense).unwrap();
            s.run(c, &mut QueryCounter::default()).unwrap();
            (0..1u64 << n).map(|row| s.amplitude(&BasisKey::from_u64(row))).collect()
        })
        .collect()
}

#[test]
fn reflection_matrices() {
    let mut a = Circuit::new(2);
    a.h(0);
    a.h(1);
    let about = ReflectAbout::Zero { qubits: vec![0, 1], prep: Some(Arc::new(a)) };
    let u = unitary(&reflection(2, &about, PI).unwrap());
    // I − 2|s⟩⟨s| with |s⟩ uniform
    for (col, column) in u.iter().enumerate() {
        for (row, z) in column.iter().enumerate() {
            let want = if row == col { 0.5 } else { -0.5 };
            assert!((z - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }
    let u = unitary(&reflection(2, &about, 0.0).unwrap());
    for (col, column) in u.iter().enumerate() {
        for (row, z) in column.iter().enumerate() {
            assert!((z - Complex64::new(if row == col { 1.0 } else { 0.0 }, 0.0)).norm() < 1e-12);
        }
    }
    let u = unitary(&reflection(2, &ReflectAbout::Flag { flag: 1 }, 0.7).unwrap());
    assert!((u[2][2] - Complex64::from_polar(1.0, 0.7)).norm() < 1e-12);
    assert!((u[1][1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(reflection(2, &ReflectAbout::Flag { flag: 2 }, 0.7).is_err());
}

#[test]
fn query_scaling_slope() {
    let xs: Vec<f64> = (4..=10).map(|k| (k as f64) * 2f64.ln()).collect();
    let ys: Vec<f64> = (4..=10).map(|k| (((fixed_point_length(0.1, 1.0 / (1u64 << k) as f64) + 1) / 2) as f64).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 0.5).abs() < 0.1, "slope {slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_point_guarantee(l_half in 0usize..30, delta in 0.05f64..0.9, t in 0.0f64..1.0) {
        let l = 2 * l_half + 1;
        let w = fixed_point_lambda_min(l, delta);
        let lambda = w + (1.0 - w) * t;
        prop_assert!(fixed_point_success(l, delta, lambda) >= 1.0 - delta * delta - 1e-9);
        prop_assert!((two_level(lambda, &fixed_point_phases(l, delta)) - fixed_point_success(l, delta, lambda)).abs() < 1e-8);
    }

    #[test]
    fn length_is_minimal(delta in 0.05f64..0.9, lambda in 0.001f64..1.0) {
        let l = fixed_point_length(delta, lambda);
        prop_assert!(fixed_point_lambda_min(l, delta) <= lambda + 1e-12);
        if l > 1 {
            prop_assert!(fixed_point_lambda_min(l - 2, delta) > lambda);
        }
    }
}
