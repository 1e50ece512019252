use eqshare_core::arena::*;
use eqshare_core::game::{builtin_game, ActionId, MixedStrategy, SymmetricGame};
use eqshare_core::learners::{LearnerKind, LearnerSpec};
use proptest::prelude::*;

fn mv() -> SymmetricGame {
    builtin_game("majority3", None, None).unwrap()
}

fn s(p: &[f64]) -> MixedStrategy {
    MixedStrategy::new(p.to_vec()).unwrap()
}

fn fixed(p: &[f64]) -> OpponentSchedule {
    OpponentSchedule::Fixed { y: s(p) }
}

#[test]
fn hedge_against_fixed_majority_opponents() {
    let t = run_match(&mv(), &LearnerSpec::new(LearnerKind::Hedge, 1.0), &fixed(&[0.49, 0.51]), 10_000, 1).unwrap();
    let m = t.metrics();
    assert!(m.u_avg >= 0.0098 - 0.05, "{m:?}");
    assert!(m.static_regret <= 2.0 * (10_000f64 * 2f64.ln()).sqrt() + 2.0);
    assert!((m.static_regret - m.dynamic_regret).abs() < 1e-9);
    assert_eq!(m.variation, 0.0);
    assert!(t.audit(&mv()).unwrap() <= 1e-9);
}

#[test]
fn matches_are_reproducible_and_exports_are_byte_identical() {
    let spec = LearnerSpec::new(LearnerKind::Saol, 1.0);
    let sched = OpponentSchedule::PureSwitch { v: 16.0, t: 512, seed: None };
    let a = run_match(&mv(), &spec, &sched, 512, 42).unwrap();
    let b = run_match(&mv(), &spec, &sched, 512, 42).unwrap();
    assert_eq!(a, b);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
    let header = String::from_utf8(ca).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "t,x_0,x_1,action,realized,expected,best");
    let back = Transcript::from_json(&a.to_json().unwrap()).unwrap();
    assert_eq!(back, a);
    let summary = run_match_summary(&mv(), &spec, &sched, 512, 42).unwrap();
    assert_eq!(summary.metrics, a.metrics());
    assert_eq!(&summary.final_strategy.probs().len(), &2);
}

#[test]
fn replay_reproduces_opponent_actions() {
    let game = builtin_game("sdg", Some(5), None).unwrap();
    let meta = s(&[0.399, 0.6, 0.001]);
    let first = run_match(&game, &LearnerSpec::new(LearnerKind::Hedge, 1.0), &OpponentSchedule::Fixed { y: meta }, 300, 5).unwrap();
    let replay = first.to_replay();
    for kind in [LearnerKind::Clone, LearnerKind::Saol] {
        let second = run_match(&game, &LearnerSpec::new(kind, 1.0), &replay, 300, 99).unwrap();
        for (a, b) in first.rounds.iter().zip(&second.rounds) {
            assert_eq!(a.opponent_actions, b.opponent_actions);
            assert_eq!(a.payoffs, b.payoffs);
        }
    }
    assert!(run_match(&game, &LearnerSpec::new(LearnerKind::Hedge, 1.0), &replay, 200, 0).is_err());
}

#[test]
fn clone_against_fixed_pure_opponents() {
    for a in [0, 1] {
        let t = run_match(&mv(), &LearnerSpec::new(LearnerKind::Clone, 1.0), &OpponentSchedule::Fixed { y: MixedStrategy::pure(2, ActionId(a)) }, 200, 3)
            .unwrap();
        assert!(t.rounds[1..].iter().all(|r| r.action == ActionId(a)));
        assert!(t.metrics().u_avg >= -1.0 / 200.0);
    }
}

#[test]
fn clone_action_distribution_matches_the_meta_strategy() {
    let y = s(&[0.3, 0.7]);
    let t = run_match(&mv(), &LearnerSpec::new(LearnerKind::Clone, 1.0), &OpponentSchedule::Fixed { y }, 20_000, 4).unwrap();
    let ones = t.rounds[1..].iter().filter(|r| r.action == ActionId(1)).count() as f64 / 19_999.0;
    // Binomial sd is about 0.0032.
    assert!((ones - 0.7).abs() < 0.015, "{ones}");
}

#[test]
fn margin_switch_oracle_and_variation() {
    let (v, horizon) = (8.0, 4096);
    let (delta, eps) = margin_switch_params(v, horizon).unwrap();
    assert_eq!((delta, eps), (64, 1.0 / 64.0));
    for (n, a) in [(3, 2), (5, 3)] {
        let game = builtin_game("extended_majority", Some(n), Some(a)).unwrap();
        let sched = OpponentSchedule::MarginSwitch { v, t: horizon, seed: Some(11) };
        let t = run_match(&game, &LearnerSpec::new(LearnerKind::Hedge, 1.0), &sched, horizon, 0).unwrap();
        for r in &t.rounds {
            let best = r.payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!((best - (eps - 2.0 * eps * eps)).abs() < 1e-12, "n={n} A={a}: {best}");
        }
        let realized = sched.realize(&game, horizon, 0).unwrap();
        let var = variation_budget(&game, &realized).unwrap();
        assert!(var <= 2.0 * v, "{var}");
        assert!((var - t.metrics().variation).abs() < 1e-9);
    }
}

#[test]
fn pure_switch_oracle_and_variation() {
    let game = mv();
    let (v, horizon) = (32.0, 1024);
    let sched = OpponentSchedule::PureSwitch { v, t: horizon, seed: Some(2) };
    let t = run_match(&game, &LearnerSpec::new(LearnerKind::Clone, 1.0), &sched, horizon, 0).unwrap();
    assert!(t.rounds.iter().all(|r| r.payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max) == 0.0));
    let realized = sched.realize(&game, horizon, 0).unwrap();
    let boundaries = realized.metas.windows(2).filter(|w| w[0] != w[1]).count();
    assert!(t.metrics().variation <= 2.0 * game.scale() * boundaries as f64);
    // Cloning loses only on round 1 and the first round after a switch.
    assert!(t.metrics().u_avg >= -(boundaries as f64 + 1.0) / horizon as f64);
}

#[test]
fn single_switch_variation_on_majority() {
    let ys = vec![MixedStrategy::pure(2, ActionId(0)), MixedStrategy::pure(2, ActionId(1))];
    let sched = OpponentSchedule::Sequence { ys };
    let realized = sched.realize(&mv(), 2, 0).unwrap();
    assert_eq!(variation_budget(&mv(), &realized).unwrap(), 1.0);
}

#[test]
fn realized_payoffs_concentrate_around_expected() {
    let horizon = 2000;
    let seeds = 50u64;
    let game = builtin_game("sdg", Some(5), None).unwrap();
    let sched = OpponentSchedule::Fixed { y: s(&[0.3, 0.5, 0.2]) };
    let diffs: Vec<f64> = (0..seeds)
        .map(|seed| {
            let m = run_match_summary(&game, &LearnerSpec::new(LearnerKind::Hedge, 1.0), &sched, horizon, seed).unwrap().metrics;
            m.realized_avg - m.u_avg
        })
        .collect();
    let mean = diffs.iter().sum::<f64>() / seeds as f64;
    assert!(mean.abs() <= 3.0 * game.scale() / ((seeds * horizon as u64) as f64).sqrt(), "{mean}");
}

#[test]
fn schedule_validation_reports_each_problem() {
    let game = mv();
    let sched = OpponentSchedule::MarginSwitch { v: 0.5, t: 100, seed: None };
    let problems = sched.problems(&game, 50);
    assert_eq!(problems.len(), 3, "{problems:?}");
    let seq = OpponentSchedule::Sequence { ys: vec![s(&[0.5, 0.5]); 3] };
    assert!(seq.realize(&game, 4, 0).is_err());
}

fn schedule_strategy() -> impl Strategy<Value = OpponentSchedule> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|p| fixed(&[p, 1.0 - p])),
        (1.0f64..=64.0, any::<u64>()).prop_map(|(v, seed)| OpponentSchedule::PureSwitch { v, t: 64, seed: Some(seed) }),
        proptest::collection::vec(0.0f64..=1.0, 64)
            .prop_map(|ps| OpponentSchedule::Sequence { ys: ps.iter().map(|p| s(&[*p, 1.0 - p])).collect() }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn regret_and_oracle_invariants(sched in schedule_strategy(), seed in any::<u64>(), kind in 0usize..4, game_ix in 0usize..3) {
        let game = [mv(), builtin_game("minority3", None, None).unwrap(), builtin_game("extended_majority", Some(4), Some(2)).unwrap()][game_ix].clone();
        let kinds = [LearnerKind::Hedge, LearnerKind::Saol, LearnerKind::Clone, LearnerKind::SpScratch];
        let t = run_match(&game, &LearnerSpec::new(kinds[kind], 1.0), &sched, 64, seed).unwrap();
        let m = t.metrics();
        let tol = 1e-9 * game.scale();
        prop_assert!(m.dynamic_regret >= m.static_regret - tol);
        prop_assert!(m.u_dagger >= -tol);
        for r in &t.rounds {
            prop_assert!(r.payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max) >= -tol);
        }
        prop_assert!(t.audit(&game).is_ok());
        prop_assert!((static_regret(&t) - m.static_regret).abs() == 0.0);
        prop_assert!((dynamic_regret(&t) - m.dynamic_regret).abs() == 0.0);
        prop_assert!((dynamic_oracle(&t) - m.u_dagger).abs() == 0.0);
    }
}
