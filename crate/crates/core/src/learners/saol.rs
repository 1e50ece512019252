use rand::RngCore;

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, SymmetricGame};
use crate::learners::{HedgeState, Learner, LearnerFeedback, LearnerKind, RateSchedule};

/// Floor for a meta-weight factor `1 + eta_I * r`, keeping weights strictly positive.
const MIN_FACTOR: f64 = 1e-300;

/// Covering intervals `[q 2^k, (q+1) 2^k - 1] ∩ [1, horizon]` that start at round `t`.
///
/// Returned as `(start, end)` pairs, shortest first.
pub fn geometric_intervals_starting_at(t: usize, horizon: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if t == 0 || t > horizon {
        return out;
    }
    let mut len = 1usize;
    while len <= t && t.is_multiple_of(len) {
        out.push((t, (t + len - 1).min(horizon)));
        len = match len.checked_mul(2) {
            Some(l) => l,
            None => break,
        };
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
struct Expert {
    start: usize,
    end: usize,
    eta: f64,
    log_weight: f64,
    hedge: HedgeState,
}

impl Expert {
    fn new(start: usize, end: usize, actions: usize, schedule: RateSchedule) -> Self {
        let len = (end - start + 1) as f64;
        let eta = (1.0 / len.sqrt()).min(0.5);
        Expert { start, end, eta, log_weight: eta.ln(), hedge: HedgeState::uniform(actions, schedule) }
    }
}

/// Strongly adaptive learner: Hedge restarted on every covering interval,
/// mixed by multiplicative weights on each expert's regret against the mix.
#[derive(Debug, Clone, PartialEq)]
pub struct SaolState {
    actions: usize,
    horizon: usize,
    rounds: usize,
    schedule: RateSchedule,
    experts: Vec<Expert>,
}

impl SaolState {
    pub fn new(actions: usize, horizon: usize, schedule: RateSchedule) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::param("saol needs a horizon of at least one round"));
        }
        if actions == 0 {
            return Err(Error::param("saol needs at least one action"));
        }
        let experts = geometric_intervals_starting_at(1, horizon)
            .into_iter()
            .map(|(s, e)| Expert::new(s, e, actions, schedule))
            .collect();
        Ok(SaolState { actions, horizon, rounds: 0, schedule, experts })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Intervals covering the upcoming round.
    pub fn active_intervals(&self) -> Vec<(usize, usize)> {
        self.experts.iter().map(|e| (e.start, e.end)).collect()
    }

    /// Meta-weights `w_t(I)` of the active intervals, same order as [`SaolState::active_intervals`].
    pub fn meta_weights(&self) -> Vec<f64> {
        self.experts.iter().map(|e| e.log_weight.exp()).collect()
    }

    /// `ln w_t(I)`; finite exactly when the weight is positive.
    pub fn log_meta_weights(&self) -> Vec<f64> {
        self.experts.iter().map(|e| e.log_weight).collect()
    }

    /// Normalized mixing coefficients over the active experts.
    pub fn mixing(&self) -> Vec<f64> {
        let top = self.experts.iter().map(|e| e.log_weight).fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = self.experts.iter().map(|e| (e.log_weight - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    pub fn expert_strategies(&self) -> Vec<MixedStrategy> {
        self.experts.iter().map(|e| e.hedge.strategy()).collect()
    }

    /// `Σ w(I) x^I / Σ w(I)` over the active intervals.
    pub fn strategy(&self) -> MixedStrategy {
        let mut mix = vec![0.0; self.actions];
        for (c, x) in self.mixing().iter().zip(self.expert_strategies()) {
            for (m, p) in mix.iter_mut().zip(x.probs()) {
                *m += c * p;
            }
        }
        MixedStrategy::from_weights(mix).expect("convex combination of strategies")
    }

    /// Feeds one round of gains (already normalized to [-1, 1]).
    pub fn observe_gains(&mut self, gains: &[f64]) -> Result<()> {
        if self.rounds >= self.horizon {
            return Err(Error::BeyondHorizon { round: self.rounds + 1, horizon: self.horizon });
        }
        if gains.len() != self.actions {
            return Err(Error::Dimension { expected: self.actions, got: gains.len() });
        }
        let mixed = self.strategy().dot(gains);
        for e in &mut self.experts {
            let r = e.hedge.strategy().dot(gains) - mixed;
            e.log_weight += (1.0 + e.eta * r).max(MIN_FACTOR).ln();
            e.hedge.observe(gains);
        }
        self.rounds += 1;
        let t = self.rounds;
        if t < self.horizon {
            self.experts.retain(|e| e.end > t);
            let (actions, schedule) = (self.actions, self.schedule);
            self.experts.extend(
                geometric_intervals_starting_at(t + 1, self.horizon)
                    .into_iter()
                    .map(|(s, e)| Expert::new(s, e, actions, schedule)),
            );
        }
        Ok(())
    }
}

impl Learner for SaolState {
    fn kind(&self) -> LearnerKind {
        LearnerKind::Saol
    }

    fn strategy(&self) -> MixedStrategy {
        SaolState::strategy(self)
    }

    fn observe(&mut self, game: &SymmetricGame, feedback: &LearnerFeedback, _rng: &mut dyn RngCore) -> Result<()> {
        self.observe_gains(&game.normalized_gains(feedback.opponent_counts.counts()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn covering_intervals() {
        assert_eq!(geometric_intervals_starting_at(1, 10), vec![(1, 1)]);
        assert_eq!(geometric_intervals_starting_at(2, 10), vec![(2, 2), (2, 3)]);
        assert_eq!(geometric_intervals_starting_at(8, 10), vec![(8, 8), (8, 9), (8, 10), (8, 10)]);
        assert_eq!(geometric_intervals_starting_at(6, 100), vec![(6, 6), (6, 7)]);
        assert!(geometric_intervals_starting_at(11, 10).is_empty());
    }

    #[test]
    fn single_round_is_uniform_then_stops() {
        let mut s = SaolState::new(3, 1, RateSchedule::sqrt_decay(1.0)).unwrap();
        assert_eq!(s.active_intervals(), vec![(1, 1)]);
        assert_eq!(s.strategy().probs(), MixedStrategy::uniform(3).probs());
        s.observe_gains(&[1.0, 0.0, -1.0]).unwrap();
        assert!(matches!(s.observe_gains(&[0.0; 3]), Err(Error::BeyondHorizon { round: 2, horizon: 1 })));
    }

    #[test]
    fn identical_experts_give_their_common_strategy() {
        let mut s = SaolState::new(1, 50, RateSchedule::sqrt_decay(1.0)).unwrap();
        for _ in 0..20 {
            s.observe_gains(&[0.3]).unwrap();
            assert_eq!(s.strategy().probs(), &[1.0]);
        }
        // Constant gains keep every expert uniform.
        let mut s = SaolState::new(2, 50, RateSchedule::sqrt_decay(1.0)).unwrap();
        for _ in 0..20 {
            s.observe_gains(&[0.4, 0.4]).unwrap();
            assert_eq!(s.strategy().probs(), &[0.5, 0.5]);
        }
    }

    #[test]
    fn tracks_a_switch() {
        let t_max = 2000;
        let mut s = SaolState::new(2, t_max, RateSchedule::sqrt_decay(1.0)).unwrap();
        let mut h = HedgeState::uniform(2, RateSchedule::sqrt_decay(1.0));
        for t in 1..=t_max {
            let g = if t <= t_max / 2 { [1.0, -1.0] } else { [-1.0, 1.0] };
            s.observe_gains(&g).unwrap();
            h.observe(&g);
        }
        // After the switch SAOL moves to action 1 well before plain Hedge does.
        assert!(s.strategy().probs()[1] > 0.9, "{}", s.strategy());
        assert!(h.strategy().probs()[1] < 0.6, "{}", h.strategy());
    }

    proptest! {
        #[test]
        fn weights_positive_and_mix_convex(
            horizon in 1usize..200,
            gains in proptest::collection::vec(proptest::collection::vec(-1.0f64..=1.0, 3), 200),
        ) {
            let mut s = SaolState::new(3, horizon, RateSchedule::sqrt_decay(1.0)).unwrap();
            for (t, g) in gains.iter().take(horizon).enumerate() {
                let active = s.active_intervals();
                prop_assert!(!active.is_empty());
                prop_assert!(active.len() <= ((t + 1) as f64).log2().floor() as usize + 1);
                for (a, b) in &active {
                    prop_assert!(*a <= t + 1 && t < *b);
                }
                prop_assert!(s.log_meta_weights().iter().all(|w| w.is_finite()));
                let mix = s.mixing();
                prop_assert!(mix.iter().all(|c| *c >= 0.0));
                prop_assert!((mix.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let x = s.strategy();
                prop_assert!((x.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
                s.observe_gains(g).unwrap();
            }
        }

        #[test]
        fn extreme_regret_keeps_weights_positive(signs in proptest::collection::vec(any::<bool>(), 1..64)) {
            let mut s = SaolState::new(2, signs.len(), RateSchedule::fixed(50.0)).unwrap();
            for b in signs {
                let g = if b { [1.0, -1.0] } else { [-1.0, 1.0] };
                s.observe_gains(&g).unwrap();
                prop_assert!(s.log_meta_weights().iter().all(|w| w.is_finite()));
            }
        }
    }
}
