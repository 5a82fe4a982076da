use super::*;
use crate::phase::Scheme;
use proptest::prelude::*;

fn lit(v: i64) -> Lit {
    Lit::from_dimacs(v)
}

fn lits(vs: &[i64]) -> Vec<Lit> {
    vs.iter().map(|&v| lit(v)).collect()
}

fn fixed(scheme: Scheme) -> SolverConfig {
    SolverConfig {
        phase: PhaseConfig::fixed(scheme),
        ..SolverConfig::default()
    }
}

fn solver(num_vars: usize, clauses: &[&[i64]], scheme: Scheme) -> Solver {
    Solver::new(&Formula::from_dimacs_clauses(num_vars, clauses), fixed(scheme))
}

fn decide_lit(s: &mut Solver, l: Lit) {
    s.new_decision_level();
    s.enqueue(l, None);
}

#[test]
fn luby_prefix() {
    let got: Vec<u64> = (1..=15).map(luby).collect();
    assert_eq!(got, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
}

#[test]
fn backjump_and_lbd_from_levels() {
    assert_eq!(backjump_and_lbd(&[5, 0, 2]), (2, 3));
    assert_eq!(backjump_and_lbd(&[1]), (0, 1));
    assert_eq!(backjump_and_lbd(&[4, 4, 2, 2]), (4, 2));
}

#[test]
fn bcp_chain() {
    let mut s = solver(3, &[&[-1, 2], &[-2, 3]], Scheme::FSave);
    assert_eq!(s.bcp(), Propagated::Implied(vec![]));
    decide_lit(&mut s, lit(1));
    assert_eq!(s.bcp(), Propagated::Implied(lits(&[2, 3])));
    s.audit().unwrap();
}

#[test]
fn bcp_conflict() {
    let mut s = solver(2, &[&[-1, 2], &[-1, -2]], Scheme::FSave);
    decide_lit(&mut s, lit(1));
    match s.bcp() {
        Propagated::Conflict(cref) => {
            let mut c = s.clause_literals(cref).to_vec();
            c.sort();
            assert_eq!(c, lits(&[-1, -2]));
        }
        other => panic!("expected conflict, got {other:?}"),
    }
}

#[test]
fn empty_delta_is_fixpoint() {
    let mut s = solver(2, &[&[1, 2]], Scheme::FSave);
    assert_eq!(s.bcp(), Propagated::Implied(vec![]));
    assert_eq!(s.bcp(), Propagated::Implied(vec![]));
}

#[test]
fn decide_all_assigned() {
    let mut s = solver(1, &[&[1]], Scheme::FSave);
    assert_eq!(s.bcp(), Propagated::Implied(vec![]));
    assert_eq!(s.decide(), Decision::AllAssigned);
}

#[test]
fn decide_takes_most_active_with_scheme_polarity() {
    let mut s = solver(2, &[&[1, 2]], Scheme::FSave);
    s.vsids_mut().set_activity(Var::from_dimacs(1), 0.0);
    s.vsids_mut().set_activity(Var::from_dimacs(2), 5.0);
    assert_eq!(s.decide(), Decision::Assigned(lit(-2)));
    assert_eq!(s.decision_level(), 1);
}

#[test]
fn decide_tie_takes_lowest_index() {
    let mut s = solver(2, &[&[1, 2]], Scheme::TSave);
    assert_eq!(s.decide(), Decision::Assigned(lit(1)));
}

#[test]
fn analyze_learns_unit_at_root() {
    let mut s = solver(3, &[&[-1, 2], &[-1, 3], &[-2, -3]], Scheme::FSave);
    decide_lit(&mut s, lit(1));
    let Propagated::Conflict(cref) = s.bcp() else {
        panic!("expected conflict")
    };
    let learned = s.analyze_conflict(cref).unwrap();
    assert_eq!(learned.clause.literals, lits(&[-1]));
    assert_eq!(learned.backjump_level, 0);
    assert_eq!(learned.lbd, 1);
}

#[test]
fn analyze_at_root_reports_unsat() {
    let mut s = solver(2, &[&[1, 2], &[1, -2], &[-1]], Scheme::FSave);
    let Propagated::Conflict(cref) = s.bcp() else {
        panic!("expected root conflict")
    };
    assert_eq!(s.analyze_conflict(cref), Err(ConflictAtRootLevel));
}

#[test]
fn analyze_backjumps_past_irrelevant_levels() {
    // x1@1 irrelevant, x2@2 implies x4 and x5, which clash on x6.
    let mut s = solver(
        6,
        &[&[-2, 4], &[-2, 5], &[-4, -5, 6], &[-4, -5, -6], &[1, 3]],
        Scheme::FSave,
    );
    decide_lit(&mut s, lit(1));
    assert!(matches!(s.bcp(), Propagated::Implied(_)));
    decide_lit(&mut s, lit(2));
    let Propagated::Conflict(cref) = s.bcp() else {
        panic!("expected conflict")
    };
    let learned = s.analyze_conflict(cref).unwrap();
    assert_eq!(learned.clause.literals, lits(&[-2]));
    assert_eq!(learned.backjump_level, 0);
    s.handle_conflict_after(learned);
    assert_eq!(s.decision_level(), 0);
    assert_eq!(s.lit_value(lit(2)), Some(false));
}

impl Solver {
    fn handle_conflict_after(&mut self, learned: Learned) {
        self.cancel_until(learned.backjump_level, true);
        self.enqueue(learned.clause.literals[0], None);
    }

    fn add_learned(&mut self, l: &[i64], lbd: u32, activity: f64) -> ClauseRef {
        let cref = self.store(lits(l), true, lbd);
        self.clauses[cref.index()].activity = activity;
        self.attach(cref);
        self.learned.push(cref);
        cref
    }
}

fn db_solver(n: usize) -> Solver {
    Solver::new(&Formula::new(3 * n, Vec::<Vec<Lit>>::new()), fixed(Scheme::FSave))
}

#[test]
fn reduce_removes_worst_half() {
    let mut s = db_solver(10);
    for k in 0..10i64 {
        s.add_learned(&[3 * k + 1, 3 * k + 2, 3 * k + 3], 3 + k as u32, 0.0);
    }
    assert_eq!(s.reduce_db(), 5);
    assert_eq!(s.learned_count(), 5);
    // The five lowest-LBD clauses survive.
    assert!(s.learned.iter().all(|c| s.clauses[c.index()].lbd < 8));
    s.audit().unwrap();
}

#[test]
fn reduce_keeps_glue_clauses() {
    let mut s = db_solver(4);
    for k in 0..4i64 {
        s.add_learned(&[3 * k + 1, 3 * k + 2, 3 * k + 3], 2, 0.0);
    }
    assert_eq!(s.reduce_db(), 0);
}

#[test]
fn reduce_keeps_locked_clauses() {
    let mut s = db_solver(6);
    let mut locked = Vec::new();
    for k in 0..6i64 {
        // The two locked clauses are also the least active.
        let activity = if k < 2 { 0.0 } else { 1.0 };
        let cref = s.add_learned(&[3 * k + 1, 3 * k + 2, 3 * k + 3], 5, activity);
        if k < 2 {
            locked.push(cref);
        }
    }
    s.new_decision_level();
    for &cref in &locked {
        let first = s.clauses[cref.index()].lits[0];
        s.enqueue(first, Some(cref));
    }
    let removed = s.reduce_db();
    assert!(removed <= 3);
    for cref in locked {
        assert!(!s.clauses[cref.index()].deleted);
        assert!(s.learned.contains(&cref));
    }
}

#[test]
fn restart_unwinds_and_counts() {
    let mut s = solver(3, &[&[1, 2, 3]], Scheme::FSave);
    decide_lit(&mut s, lit(1));
    decide_lit(&mut s, lit(2));
    s.restart();
    assert_eq!(s.restart_count(), 1);
    assert_eq!(s.decision_level(), 0);
    assert!(s.trail().is_empty());
    s.restart();
    assert_eq!(s.restart_count(), 2);
    assert_eq!(s.phase().period(), 2);
}

#[test]
fn restart_advances_rotation() {
    let config = SolverConfig {
        phase: PhaseConfig {
            thresholds: crate::phase::SchedulerThresholds {
                global_rotation_conflicts: 0,
                ..Default::default()
            },
            ..PhaseConfig::default()
        },
        ..SolverConfig::default()
    };
    let mut s = Solver::new(&Formula::from_dimacs_clauses(2, &[&[1, 2]]), config);
    assert_eq!(s.phase().active().scheme, Scheme::TSave);
    s.restart();
    assert_eq!(s.phase().active().scheme, Scheme::FSave);
    s.restart();
    assert_eq!(s.phase().active().scheme, Scheme::OddEvenDynamic);
}

#[test]
fn simplify_detaches_satisfied_clauses() {
    let mut s = solver(2, &[&[1], &[1, 2]], Scheme::FSave);
    assert!(matches!(s.bcp(), Propagated::Implied(_)));
    // The unit clause and (x1 ∨ x2) are both satisfied.
    assert_eq!(s.simplify_root(), 2);
    assert_eq!(s.active_original_clauses().count(), 0);
    s.audit().unwrap();
}

#[test]
fn simplify_strips_false_literals() {
    let mut s = solver(4, &[&[-2], &[2, 3, 4]], Scheme::FSave);
    assert!(matches!(s.bcp(), Propagated::Implied(_)));
    s.simplify_root();
    let remaining: Vec<Vec<Lit>> = s.active_original_clauses().map(|c| c.to_vec()).collect();
    assert_eq!(remaining, vec![lits(&[3, 4])]);
    assert_eq!(s.weights().weight(lit(3)), 1.0);
    s.audit().unwrap();
}

#[test]
fn simplify_without_new_fixed_vars_is_a_noop() {
    let mut s = solver(2, &[&[1], &[1, 2]], Scheme::FSave);
    assert!(matches!(s.bcp(), Propagated::Implied(_)));
    s.simplify_root();
    let updates = s.weights().update_count();
    assert_eq!(s.simplify_root(), 0);
    assert_eq!(s.weights().update_count(), updates);
    assert_eq!(s.simplify_log().len(), 1);
}

#[test]
fn solve_trivial() {
    let f = Formula::from_dimacs_clauses(1, &[&[1]]);
    assert_eq!(solve(&f, SolverConfig::default()), SolveOutcome::Sat(vec![true]));
    let f = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
    assert_eq!(solve(&f, SolverConfig::default()), SolveOutcome::Unsat);
    let f = Formula::new(3, vec![vec![]]);
    assert_eq!(solve(&f, SolverConfig::default()), SolveOutcome::Unsat);
}

#[test]
fn solve_assigns_unconstrained_variables() {
    let f = Formula::from_dimacs_clauses(4, &[&[1, 2]]);
    let out = solve(&f, SolverConfig::default());
    assert_eq!(out.model().unwrap().len(), 4);
}

#[test]
fn conflict_budget_yields_unknown() {
    // Pigeonhole 6 into 5 needs far more than 10 conflicts.
    let f = crate::oracle::pigeonhole(6, 5);
    let config = SolverConfig {
        conflict_budget: Some(10),
        ..SolverConfig::default()
    };
    assert_eq!(
        solve(&f, config),
        SolveOutcome::Unknown(UnknownReason::ConflictBudget)
    );
}

#[test]
fn probe_pass_counts_on_fixture() {
    // Weights straight from the formula: W(x1) = 0, W(¬x1) = W(x2) = W(x3) = 1.
    let mut s = solver(3, &[&[-1, 2], &[-2, 3]], Scheme::FullDynamic);
    s.ensure_weights();
    s.new_decision_level();
    let r = dynamic_probe(&mut s, Var::from_dimacs(1), true);
    assert_eq!(r.chosen, lit(1));
    assert_eq!((r.dw_pos, r.dw_neg), (2.0, 1.0));
    assert_eq!(r.bcp_passes, 3);
    assert_eq!(r.segments.unwrap().positive, lits(&[1, 2, 3]));
    assert_eq!(s.trail(), &lits(&[1, 2, 3])[..]);
    s.audit().unwrap();
}

fn random_formula(seed: u64) -> Formula {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..12usize);
    let m = rng.gen_range(n..5 * n);
    let clauses = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=3usize.min(n));
            (0..len)
                .map(|_| Var::from_index(rng.gen_range(0..n)).lit(rng.gen_bool(0.5)))
                .collect()
        })
        .collect::<Vec<Vec<Lit>>>();
    Formula::new(n, clauses)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn audit_holds_at_every_fixpoint(seed in any::<u64>(), scheme in 0usize..7) {
        let f = random_formula(seed);
        let config = SolverConfig {
            restart_unit: 2,
            learned_ceiling: 4,
            learned_ceiling_step: 1,
            ..fixed(Scheme::ALL[scheme])
        };
        let mut s = Solver::new(&f, config);
        if s.inconsistent || s.propagate().is_some() {
            return Ok(());
        }
        s.simplify_root();
        for _ in 0..200 {
            match s.propagate() {
                Some(cref) => {
                    if s.handle_conflict(cref).is_err() {
                        break;
                    }
                }
                None => {
                    prop_assert_eq!(s.audit(), Ok(()));
                    if s.stats().conflicts % 3 == 2 {
                        s.restart();
                        s.simplify_root();
                    }
                    if s.learned_count() >= 4 {
                        s.reduce_db();
                    }
                    match s.decide() {
                        Decision::AllAssigned => break,
                        Decision::Assigned(_) => {}
                        Decision::Conflict(cref) => {
                            if s.handle_conflict(cref).is_err() {
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
}
