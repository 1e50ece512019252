use eqshare_core::game::{builtin_game, MixedStrategy};
use eqshare_core::learners::{HedgeState, LearnerKind, LearnerSpec, RateSchedule, SaolState, SelfPlayMode, SelfPlayState};
use eqshare_core::rng::{stream, substream, Role};
use proptest::prelude::*;
use rand::Rng;

/// Regret of a learner against a fixed gain sequence, computed from scratch.
fn regret(strategies: &[Vec<f64>], gains: &[Vec<f64>]) -> f64 {
    let a = gains[0].len();
    let got: f64 = strategies.iter().zip(gains).map(|(x, g)| x.iter().zip(g).map(|(p, v)| p * v).sum::<f64>()).sum();
    let best = (0..a).map(|i| gains.iter().map(|g| g[i]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
    best - got
}

fn hedge_regret(gains: &[Vec<f64>]) -> f64 {
    let mut h = HedgeState::uniform(gains[0].len(), RateSchedule::sqrt_decay(1.0));
    let mut xs = Vec::new();
    for g in gains {
        xs.push(h.strategy().probs().to_vec());
        h.observe(g);
    }
    regret(&xs, gains)
}

fn envelope(t: usize, a: usize) -> f64 {
    2.0 * (t as f64 * (a as f64).ln()).sqrt() + 2.0
}

#[test]
fn hedge_regret_envelope_on_structured_sequences() {
    let t = 10_000;
    for a in [2usize, 3, 5] {
        let alternating: Vec<Vec<f64>> =
            (0..t).map(|s| (0..a).map(|i| if (s + i) % 2 == 0 { 1.0 } else { -1.0 }).collect()).collect();
        let switch: Vec<Vec<f64>> =
            (0..t).map(|s| (0..a).map(|i| if (i == 0) == (s < t / 2) { 1.0 } else { -1.0 }).collect()).collect();
        for gains in [alternating, switch] {
            assert!(hedge_regret(&gains) <= envelope(t, a), "A={a}");
        }
    }
}

#[test]
fn hedge_regret_envelope_against_adaptive_adversary() {
    // Gain 1 to the currently least likely action, -1 elsewhere.
    for a in [2usize, 3] {
        let t = 5_000;
        let mut h = HedgeState::uniform(a, RateSchedule::sqrt_decay(1.0));
        let (mut xs, mut gs) = (Vec::new(), Vec::new());
        for _ in 0..t {
            let x = h.strategy().probs().to_vec();
            let low = (0..a).min_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap()).unwrap();
            let g: Vec<f64> = (0..a).map(|i| if i == low { 1.0 } else { -1.0 }).collect();
            h.observe(&g);
            xs.push(x);
            gs.push(g);
        }
        assert!(regret(&xs, &gs) <= envelope(t, a), "A={a}");
    }
}

#[test]
fn hedge_on_expected_majority_gains_matches_closed_form() {
    // Expected gains vs y = [0.49, 0.51] are constant, so the logit gap after T rounds is
    // 0.02 * sqrt(ln 2) * sum_{t<=T} t^(-1/2).
    let game = builtin_game("majority3", None, None).unwrap();
    let y = MixedStrategy::new(vec![0.49, 0.51]).unwrap();
    let gains = game.payoff_vector(&y).unwrap();
    let mut h = HedgeState::uniform(2, RateSchedule::sqrt_decay(1.0));
    let mut partial = 0.0;
    let mut t = 0usize;
    for (horizon, expected) in [(1_000usize, 0.73673), (10_000, 0.96463), (100_000, 0.99997)] {
        while t < horizon {
            t += 1;
            partial += 1.0 / (t as f64).sqrt();
            h.observe(&gains);
        }
        let closed = 1.0 / (1.0 + (-0.02 * 2f64.ln().sqrt() * partial).exp());
        let x1 = h.strategy().probs()[1];
        assert!((x1 - closed).abs() < 1e-9, "T={horizon}: {x1} vs {closed}");
        assert!((x1 - expected).abs() < 1e-4, "T={horizon}: {x1}");
    }
}

#[test]
fn saol_recovers_after_each_switch_where_hedge_does_not() {
    let t = 4096;
    let block = 1024;
    let gains: Vec<Vec<f64>> =
        (0..t).map(|i| if (i / block) % 2 == 0 { vec![1.0, -1.0] } else { vec![-1.0, 1.0] }).collect();
    let mut s = SaolState::new(2, t, RateSchedule::sqrt_decay(1.0)).unwrap();
    let mut h = HedgeState::uniform(2, RateSchedule::sqrt_decay(1.0));
    let (mut xs, mut hs) = (Vec::new(), Vec::new());
    for g in &gains {
        xs.push(s.strategy().probs().to_vec());
        hs.push(h.strategy().probs().to_vec());
        s.observe_gains(g).unwrap();
        h.observe(g);
    }
    for b in 0..4 {
        let range = b * block..(b + 1) * block;
        let saol = regret(&xs[range.clone()], &gains[range.clone()]);
        let hedge = regret(&hs[range.clone()], &gains[range]);
        assert!(saol <= 0.3 * block as f64, "block {b}: {saol}");
        if b % 2 == 1 {
            assert!(saol < hedge / 5.0, "block {b}: saol {saol} hedge {hedge}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hedge_regret_envelope_on_random_sequences(seed in any::<u64>(), a in 2usize..5, t in 1usize..3000) {
        let mut rng = stream(seed, Role::Evaluation);
        let gains: Vec<Vec<f64>> = (0..t).map(|_| (0..a).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
        prop_assert!(hedge_regret(&gains) <= envelope(t, a));
    }

    #[test]
    fn every_act_is_a_valid_strategy(seed in any::<u64>(), kind in 0usize..6) {
        let game = builtin_game("extended_majority", Some(4), Some(3)).unwrap();
        let meta = MixedStrategy::new(vec![0.2, 0.5, 0.3]).unwrap();
        let kinds = [LearnerKind::Hedge, LearnerKind::Saol, LearnerKind::Clone, LearnerKind::SpScratch, LearnerKind::SpBc, LearnerKind::SpBcReg];
        let spec = LearnerSpec::new(kinds[kind], 1.0).with_meta(meta.clone()).with_lambda(0.1);
        let mut learner = spec.build(&game, 200).unwrap();
        let mut own = substream(seed, Role::Learner, 0);
        let mut opp = substream(seed, Role::Opponents, 0);
        for t in 1..=200 {
            let x = learner.strategy();
            prop_assert!(x.probs().iter().all(|p| *p >= 0.0));
            prop_assert!((x.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            let a = learner.act(&mut own);
            let fb = eqshare_core::learners::LearnerFeedback::sample(&game, &meta, t, a, &mut opp);
            learner.observe(&game, &fb, &mut own).unwrap();
        }
    }

    #[test]
    fn regularized_at_zero_lambda_tracks_plain_self_play(seed in any::<u64>()) {
        let game = builtin_game("sdg", Some(7), None).unwrap();
        let meta = MixedStrategy::new(vec![0.399, 0.6, 0.001]).unwrap();
        let sched = RateSchedule::sqrt_decay(2.0);
        let mut a = SelfPlayState::new(3, SelfPlayMode::BcInit { meta: meta.clone() }, sched).unwrap();
        let mut b = SelfPlayState::new(3, SelfPlayMode::Regularized { lambda: 0.0, meta }, sched).unwrap();
        let (mut ra, mut rb) = (stream(seed, Role::Learner), stream(seed, Role::Learner));
        for _ in 0..300 {
            prop_assert_eq!(a.step(&game, &mut ra).unwrap(), b.step(&game, &mut rb).unwrap());
        }
    }
}

#[test]
fn self_play_on_sdg_from_the_meta_strategy_reaches_action_c() {
    let game = builtin_game("sdg", Some(30), None).unwrap();
    let meta = MixedStrategy::new(vec![0.399, 0.6, 0.001]).unwrap();
    let mut s = SelfPlayState::new(3, SelfPlayMode::BcInit { meta }, RateSchedule::sqrt_decay(2.0)).unwrap();
    let x = s.train(&game, 5_000, &mut stream(1, Role::Learner)).unwrap();
    assert!(x.probs()[2] >= 0.99, "{x}");
}
