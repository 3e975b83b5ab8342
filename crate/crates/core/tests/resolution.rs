use proptest::prelude::*;
use qatp_core::formula::{
    herbrand_universe, parse_fol, parse_fol_problem, propositionalize, skolemize_all, Atom, Clause, ClauseSet, FolClause, Literal, Term,
};
use qatp_core::resolution::*;

fn cs(n: usize, lists: &[&[(usize, bool)]]) -> ClauseSet {
    let names = ["A", "B", "C", "D"].iter().take(n).map(|s| s.to_string()).collect();
    ClauseSet::from_literal_lists(names, &lists.iter().map(|l| l.to_vec()).collect::<Vec<_>>())
}

fn cl(n: usize, lits: &[(usize, bool)]) -> Clause {
    Clause::from_literals(n, lits).unwrap()
}

fn atom(p: &str, args: Vec<Term>) -> Atom {
    Atom::new(p, args)
}

fn v(n: &str) -> Term {
    Term::var(n)
}

fn c(n: &str) -> Term {
    Term::cst(n)
}

#[test]
fn resolve_pair_examples() {
    // (A∨C, B∨¬C) → A∨B
    let o = resolve_pair(&cl(3, &[(0, true), (2, true)]), &cl(3, &[(1, true), (2, false)])).unwrap();
    assert_eq!(o.valid(), Some(&cl(3, &[(0, true), (1, true)])));
    assert_eq!(o.resolved_var, Some(2));
    // two complementary pairs
    let o = resolve_pair(&cl(4, &[(0, true), (2, true), (3, true)]), &cl(4, &[(1, true), (2, false), (3, false)])).unwrap();
    assert_eq!(o.kind, ResolventKind::Invalid);
    // C, ¬C → ⊥
    let o = resolve_pair(&cl(1, &[(0, true)]), &cl(1, &[(0, false)])).unwrap();
    assert!(o.valid().unwrap().is_empty());
    // no complementary pair
    let o = resolve_pair(&cl(2, &[(0, true)]), &cl(2, &[(1, true)])).unwrap();
    assert_eq!(o.kind, ResolventKind::Invalid);
    assert!(resolve_pair(&Clause::empty(2), &Clause::empty(3)).is_err());
}

#[test]
fn saturate_examples() {
    let r = saturate(&cs(1, &[&[(0, true)], &[(0, false)]]), Budget::default());
    assert_eq!(r.verdict, Verdict::Refuted);
    assert_eq!(r.rounds, 1);
    assert_eq!(r.trace.len(), 1);

    let kb = cs(3, &[&[(0, true), (2, false)], &[(1, true), (2, true)], &[(1, false)]]);
    let r = saturate(&kb, Budget::default());
    assert_eq!(r.verdict, Verdict::Saturated);
    let derived: Vec<String> = r.kb.clauses()[3..].iter().map(|c| r.kb.show(c)).collect();
    let mut d = derived.clone();
    d.sort();
    assert_eq!(d, vec!["A", "A ∨ B", "C"]);
    assert!(r.replay(&kb));
    assert_eq!(r.stats.new_per_round, vec![2, 1, 0]);
    assert_eq!(r.stats.pair_evaluations, 9 + 25 + 36);

    let r = saturate(&cs(2, &[&[(0, true), (1, true)]]), Budget::default());
    assert_eq!((r.verdict, r.rounds), (Verdict::Saturated, 1));
}

#[test]
fn saturate_budget_and_trivial_input() {
    let mut kb = ClauseSet::new(vec!["A".into()]);
    kb.push(Clause::empty(1));
    let r = saturate(&kb, Budget::default());
    assert_eq!((r.verdict, r.rounds), (Verdict::Refuted, 0));

    let kb = cs(3, &[&[(0, true), (2, false)], &[(1, true), (2, true)], &[(1, false)]]);
    let r = saturate(&kb, Budget { max_rounds: 1, max_clauses: 100 });
    assert_eq!(r.verdict, Verdict::BudgetExceeded);
    let r = saturate(&kb, Budget { max_rounds: 10, max_clauses: 4 });
    assert_eq!(r.verdict, Verdict::BudgetExceeded);
}

#[test]
fn trace_json_shape() {
    let kb = cs(2, &[&[(0, true), (1, true)], &[(0, false)], &[(1, false)]]);
    let r = saturate(&kb, Budget::default());
    assert_eq!(r.verdict, Verdict::Refuted);
    let j = r.trace_json();
    let steps = j.as_array().unwrap();
    assert_eq!(steps.last().unwrap()["resolvent"], "⊥");
    for s in steps {
        assert!(s["premise_ids"].as_array().unwrap().len() == 2);
        assert!(s["resolved_var"].is_string());
    }
}

#[test]
fn unify_examples() {
    let th = unify(&atom("Doctor", vec![c("John"), v("x")]), &atom("Doctor", vec![c("John"), c("Jane")])).unwrap();
    assert_eq!(th.to_string(), "{x/Jane}");
    assert!(unify(&atom("P", vec![v("x")]), &atom("P", vec![v("x")])).unwrap().is_empty());
    assert!(unify(&atom("P", vec![v("x")]), &atom("Q", vec![v("x")])).is_none());
    // occurs check
    assert!(unify(&atom("P", vec![v("x")]), &atom("P", vec![Term::func("F", vec![v("x")])])).is_none());
    // constant clash
    assert!(unify(&atom("P", vec![c("A")]), &atom("P", vec![c("B")])).is_none());
}

#[test]
fn resolve_fol_examples() {
    let c1 = FolClause::new(vec![
        Literal::pos(atom("Sport", vec![Term::func("F", vec![v("x")])])),
        Literal::pos(atom("Likes", vec![Term::func("G", vec![v("x")]), v("x")])),
    ]);
    let c2 = FolClause::new(vec![Literal::neg(atom("Likes", vec![v("u"), v("v")])), Literal::neg(atom("Doctor", vec![v("u"), v("v")]))]);
    let rs = binary_resolvents(&c1, &c2);
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0].0.to_string(), "Sport(F(x)) ∨ ¬Doctor(G(x),x)");
    assert_eq!(rs[0].4.to_string(), "{u/G(x), v/x}");
    assert!(resolve_fol(&c1, &c2).iter().any(|r| r.to_string() == "Sport(F(x)) ∨ ¬Doctor(G(x),x)"));

    let pa = FolClause::new(vec![Literal::pos(atom("P", vec![c("A")]))]);
    let npa = FolClause::new(vec![Literal::neg(atom("P", vec![c("A")]))]);
    assert_eq!(resolve_fol(&pa, &npa), vec![FolClause::new(vec![])]);

    let c1 = FolClause::new(vec![Literal::pos(atom("P", vec![v("x")])), Literal::pos(atom("P", vec![c("A")]))]);
    let c2 = FolClause::new(vec![Literal::neg(atom("P", vec![c("B")]))]);
    let out: Vec<String> = resolve_fol(&c1, &c2).iter().map(|c| c.to_string()).collect();
    // x/B leaves P(A); factoring x/A gives P(A) too (deduplicated)
    assert_eq!(out, vec!["P(A)"]);
    assert_eq!(factors(&c1).len(), 1);
    assert!(resolve_fol(&pa, &c2).is_empty());
}

#[test]
fn renaming_apart_avoids_capture() {
    let c1 = FolClause::new(vec![Literal::pos(atom("P", vec![v("x")])), Literal::pos(atom("Q", vec![v("x")]))]);
    let c2 = FolClause::new(vec![Literal::neg(atom("P", vec![Term::func("F", vec![v("x")])]))]);
    let rs = binary_resolvents(&c1, &c2);
    assert_eq!(rs[0].0.to_string(), "Q(F(x'))");
}

#[test]
fn subsumption() {
    let g = FolClause::new(vec![Literal::pos(atom("P", vec![v("x")]))]);
    let d = FolClause::new(vec![Literal::pos(atom("P", vec![c("A")])), Literal::pos(atom("Q", vec![c("A")]))]);
    assert!(subsumes(&g, &d));
    assert!(!subsumes(&d, &g));
}

fn badminton() -> Vec<FolClause> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/badminton.fol")).unwrap();
    skolemize_all(&parse_fol_problem(&text).unwrap().refutation_formulas())
}

#[test]
fn badminton_cnf_shape() {
    let cnf = badminton();
    assert_eq!(cnf.len(), 16);
    let texts: Vec<String> = cnf.iter().map(|c| c.to_string()).collect();
    assert!(texts.contains(&"¬Likes(Bob,basketball) ∨ ¬Likes(Bob,badminton)".to_string()));
    assert!(texts.contains(&"¬Playtogether(Father(Alice),Father(Bob))".to_string()));
}

#[test]
fn badminton_refuted_by_unification() {
    let cnf = badminton();
    let proof = refute_fol(&cnf, FolBudget::default());
    assert_eq!(proof.verdict, Verdict::Refuted);
    let j = proof.proof_json();
    assert_eq!(j.as_array().unwrap().last().unwrap()["clause"], "⊥");

    // the ground instances used by the proof form an unsatisfiable set on their own
    let ground = proof.relevant_ground_set(&Term::cst("Alice"));
    assert!(ground.num_vars() <= 20, "{} atoms", ground.num_vars());
    assert!(!ground.is_satisfiable_brute_force());
    let r = saturate(&ground, Budget::default());
    assert_eq!(r.verdict, Verdict::Refuted);
    assert!(r.replay(&ground));
    // every instance is an instance of some input clause, depth ≤ 2
    for (k, inst) in proof.ground_instances(&Term::cst("Alice")) {
        assert!(inst.is_ground() && inst.max_depth() <= 2);
        assert_eq!(inst.literals.len(), cnf[k].literals.len().min(inst.literals.len()));
    }
}

#[test]
fn satisfiable_fol_not_refuted() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/toy_sat.fol")).unwrap();
    let cnf = skolemize_all(&parse_fol_problem(&text).unwrap().refutation_formulas());
    let proof = refute_fol(&cnf, FolBudget { max_term_depth: Some(4), ..FolBudget::default() });
    assert_ne!(proof.verdict, Verdict::Refuted);
    for depth in 0..3 {
        let u = herbrand_universe(&cnf, depth).unwrap();
        let g = qatp_core::formula::ground(&cnf, &u).unwrap();
        assert_eq!(saturate(&g, Budget::default()).verdict, Verdict::Saturated);
    }
}

#[test]
fn ground_path_small_example() {
    let f = parse_fol("(and (forall x (implies (P x) (Q x))) (P A) (not (Q A)))").unwrap();
    let cnf = skolemize_all(&[f]);
    let u = herbrand_universe(&cnf, 0).unwrap();
    let g = qatp_core::formula::ground(&cnf, &u).unwrap();
    assert_eq!(saturate(&g, Budget::default()).verdict, Verdict::Refuted);
    let p = refute_fol(&cnf, FolBudget::default());
    let rel: Vec<FolClause> = p.ground_instances(&c("A")).into_iter().map(|x| x.1).collect();
    assert_eq!(propositionalize(&rel).len(), 3);
}

fn arb_clause(n: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    proptest::collection::vec((0..n, any::<bool>()), 0..=n)
}

fn arb_kb(max_n: usize, max_m: usize) -> impl Strategy<Value = ClauseSet> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(arb_clause(n), 1..=max_m).prop_map(move |lists| {
            let names = ["A", "B", "C", "D"].iter().take(n).map(|s| s.to_string()).collect();
            ClauseSet::from_literal_lists(names, &lists)
        })
    })
}

fn entails(kb: &ClauseSet, c: &Clause) -> bool {
    let n = kb.num_vars();
    (0..1u32 << n).all(|m| {
        let a: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
        !kb.eval(&a) || c.eval(&a)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn complete_and_sound_small(kb in arb_kb(3, 6)) {
        prop_assume!(!kb.is_empty());
        let r = saturate(&kb, Budget { max_rounds: 64, max_clauses: 10_000 });
        prop_assert_ne!(r.verdict, Verdict::BudgetExceeded);
        prop_assert_eq!(r.verdict == Verdict::Refuted, !kb.is_satisfiable_brute_force());
        prop_assert!(r.replay(&kb));
    }

    #[test]
    fn trace_clauses_entailed(kb in arb_kb(4, 6)) {
        prop_assume!(!kb.is_empty());
        let r = saturate(&kb, Budget { max_rounds: 6, max_clauses: 2_000 });
        for s in &r.trace {
            prop_assert!(entails(&kb, &s.resolvent));
        }
    }

    #[test]
    fn resolve_pair_symmetric(a in arb_clause(4), b in arb_clause(4)) {
        let (Some(x), Some(y)) = (Clause::from_literals(4, &a), Clause::from_literals(4, &b)) else { return Ok(()) };
        let o1 = resolve_pair(&x, &y).unwrap();
        let o2 = resolve_pair(&y, &x).unwrap();
        prop_assert_eq!(o1.valid().is_some(), o2.valid().is_some());
        prop_assert_eq!(o1, o2);
    }

    #[test]
    fn self_pairs_never_valid(a in arb_clause(4)) {
        if let Some(x) = Clause::from_literals(4, &a) {
            prop_assert!(resolve_pair(&x, &x).unwrap().valid().is_none());
        }
    }

    #[test]
    fn mgu_unifies_and_is_idempotent(t1 in arb_term(2), t2 in arb_term(2)) {
        let a = atom("P", vec![t1.clone(), t2.clone()]);
        let b = atom("P", vec![t2, t1]);
        if let Some(th) = unify(&a, &b) {
            prop_assert_eq!(th.apply_atom(&a), th.apply_atom(&b));
            let once = th.apply_atom(&a);
            prop_assert_eq!(th.apply_atom(&once), once);
        }
    }
}

fn arb_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        prop::sample::select(vec!["A", "B"]).prop_map(Term::cst),
    ];
    leaf.prop_recursive(depth, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::func("F", vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::func("G", vec![a, b])),
        ]
    })
}
