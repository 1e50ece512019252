use rand::RngCore;

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, SymmetricGame};
use crate::learners::{Learner, LearnerFeedback, LearnerKind, RateSchedule};

/// One exponential-weights step: `x'(a) ∝ x(a) exp(eta * gains(a))`.
///
/// Computed in log space with max subtraction, so zero-mass actions stay at
/// zero and adding a constant to every gain leaves the result unchanged.
pub fn hedge_update(x: &MixedStrategy, gains: &[f64], eta: f64) -> Result<MixedStrategy> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("learning rate must be positive, got {eta}")));
    }
    if gains.len() != x.len() {
        return Err(Error::Dimension { expected: x.len(), got: gains.len() });
    }
    if gains.iter().any(|g| !g.is_finite()) {
        return Err(Error::param("gains must be finite"));
    }
    // Shift gains by their max so exp never overflows and uniform shifts cancel exactly.
    let top = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_w: Vec<f64> = x
        .probs()
        .iter()
        .zip(gains)
        .map(|(p, g)| p.ln() + eta * (g - top))
        .collect();
    MixedStrategy::from_log_weights(&log_w)
}

/// Exponential weights with a round counter and a rate schedule.
///
/// Log-weights accumulate `eta_t * gains` without renormalization; the
/// strategy is their softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeState {
    log_weights: Vec<f64>,
    rounds: usize,
    schedule: RateSchedule,
}

impl HedgeState {
    pub fn uniform(actions: usize, schedule: RateSchedule) -> Self {
        HedgeState { log_weights: vec![0.0; actions], rounds: 0, schedule }
    }

    /// Starts from `x0`; zero entries stay at zero forever.
    pub fn from_strategy(x0: &MixedStrategy, schedule: RateSchedule) -> Self {
        HedgeState { log_weights: x0.probs().iter().map(|p| p.ln()).collect(), rounds: 0, schedule }
    }

    pub fn strategy(&self) -> MixedStrategy {
        MixedStrategy::from_log_weights(&self.log_weights).expect("hedge keeps some finite weight")
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Unnormalized log-weights; `-inf` marks actions with zero mass.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn actions(&self) -> usize {
        self.log_weights.len()
    }

    pub fn schedule(&self) -> RateSchedule {
        self.schedule
    }

    /// Applies round `rounds + 1` with rate `eta_t` from the schedule.
    pub fn observe(&mut self, gains: &[f64]) {
        debug_assert_eq!(gains.len(), self.log_weights.len());
        self.rounds += 1;
        let eta = self.schedule.rate(self.rounds, self.log_weights.len());
        for (w, g) in self.log_weights.iter_mut().zip(gains) {
            *w += eta * g;
        }
    }
}

/// Hedge driven by realized opponent actions, gains normalized by the payoff bound.
#[derive(Debug, Clone)]
pub struct HedgeLearner {
    state: HedgeState,
}

impl HedgeLearner {
    pub fn new(actions: usize, schedule: RateSchedule) -> Self {
        HedgeLearner { state: HedgeState::uniform(actions, schedule) }
    }

    pub fn state(&self) -> &HedgeState {
        &self.state
    }
}

impl Learner for HedgeLearner {
    fn kind(&self) -> LearnerKind {
        LearnerKind::Hedge
    }

    fn strategy(&self) -> MixedStrategy {
        self.state.strategy()
    }

    fn observe(&mut self, game: &SymmetricGame, feedback: &LearnerFeedback, _rng: &mut dyn RngCore) -> Result<()> {
        let gains = game.normalized_gains(feedback.opponent_counts.counts());
        self.state.observe(&gains);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionId, BuiltinGame};
    use crate::learners::RateRule;
    use crate::rng::{stream, Role};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn closed_form_examples() {
        let half = MixedStrategy::uniform(2);
        let x = hedge_update(&half, &[3.7, 3.7], 0.9).unwrap();
        assert_eq!(x.probs(), &[0.5, 0.5]);
        let x = hedge_update(&half, &[1.0, 0.0], 2f64.ln()).unwrap();
        assert_abs_diff_eq!(x.probs()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x.probs()[1], 1.0 / 3.0, epsilon = 1e-15);
        let pure = MixedStrategy::pure(2, ActionId(0));
        let x = hedge_update(&pure, &[-5.0, 9.0], 3.0).unwrap();
        assert_eq!(x.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let half = MixedStrategy::uniform(2);
        assert!(hedge_update(&half, &[0.0, 0.0], 0.0).is_err());
        assert!(hedge_update(&half, &[0.0], 1.0).is_err());
        assert!(hedge_update(&half, &[f64::NAN, 0.0], 1.0).is_err());
    }

    #[test]
    fn fresh_state_is_uniform() {
        let h = HedgeState::uniform(2, RateSchedule::sqrt_decay(1.0));
        assert_eq!(h.strategy().probs(), &[0.5, 0.5]);
    }

    #[test]
    fn fixed_rate_observations_compose() {
        let schedule = RateSchedule { eta: 0.3, rule: RateRule::Fixed };
        let mut two = HedgeState::uniform(3, schedule);
        two.observe(&[0.2, -0.5, 1.0]);
        two.observe(&[0.7, 0.1, -0.4]);
        let mut one = HedgeState::uniform(3, schedule);
        one.observe(&[0.9, -0.4, 0.6]);
        for (a, b) in two.strategy().probs().iter().zip(one.strategy().probs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn converges_against_fixed_majority_opponents() {
        // Fixed rate 1 for 10^4 rounds against y = [0.49, 0.51].
        let game = SymmetricGame::builtin(BuiltinGame::Majority3).unwrap();
        let y = MixedStrategy::new(vec![0.49, 0.51]).unwrap();
        let mut learner = HedgeLearner::new(2, RateSchedule { eta: 1.0, rule: RateRule::Fixed });
        let mut opp = stream(11, Role::Opponents);
        let mut own = stream(11, Role::Learner);
        for t in 1..=10_000 {
            let played = learner.act(&mut own);
            let fb = LearnerFeedback::sample(&game, &y, t, played, &mut opp);
            learner.observe(&game, &fb, &mut own).unwrap();
        }
        assert!(learner.strategy().probs()[1] >= 0.99, "{}", learner.strategy());
    }

    proptest! {
        #[test]
        fn shift_invariance(
            p in 0.01f64..0.99,
            g0 in -1.0f64..1.0, g1 in -1.0f64..1.0,
            shift in -5.0f64..5.0, eta in 0.01f64..3.0,
        ) {
            let x = MixedStrategy::new(vec![p, 1.0 - p]).unwrap();
            let a = hedge_update(&x, &[g0, g1], eta).unwrap();
            let b = hedge_update(&x, &[g0 + shift, g1 + shift], eta).unwrap();
            prop_assert!((a.probs()[0] - b.probs()[0]).abs() < 1e-12);
        }

        #[test]
        fn argmax_monotonicity(
            w in proptest::collection::vec(0.01f64..1.0, 3),
            g in proptest::collection::vec(-1.0f64..1.0, 3),
            eta in 0.01f64..3.0,
        ) {
            let x = MixedStrategy::from_weights(w).unwrap();
            let out = hedge_update(&x, &g, eta).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    if g[a] >= g[b] && x.probs()[a] >= x.probs()[b] {
                        prop_assert!(out.probs()[a] >= out.probs()[b] - 1e-15);
                    }
                }
            }
            let sum: f64 = out.probs().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }
    }
}
