use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::game::{CountVector, MixedStrategy, SymmetricGame};
use crate::learners::{HedgeState, Learner, LearnerFeedback, LearnerKind, RateSchedule};

#[derive(Debug, Clone, PartialEq)]
pub enum SelfPlayMode {
    /// Starts uniform.
    Scratch,
    /// Starts at the opponents' meta-strategy.
    BcInit { meta: MixedStrategy },
    /// Starts at the meta-strategy and is pulled back toward it with strength `lambda`.
    Regularized { lambda: f64, meta: MixedStrategy },
}

/// Self-play: the population plays against copies of its own previous strategy.
///
/// The unregularized accumulator `ln x0 + Σ η_s g_s` lives in a [`HedgeState`];
/// the regularized strategy is
/// `softmax((acc + λ Σ η_s ln y_meta) / (1 + λ Σ η_s))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfPlayState {
    mode: SelfPlayMode,
    hedge: HedgeState,
    cum_eta: f64,
    ln_meta: Vec<f64>,
}

impl SelfPlayState {
    pub fn new(actions: usize, mode: SelfPlayMode, schedule: RateSchedule) -> Result<Self> {
        let (x0, ln_meta) = match &mode {
            SelfPlayMode::Scratch => (MixedStrategy::uniform(actions), Vec::new()),
            SelfPlayMode::BcInit { meta } => {
                meta.ensure_len(actions)?;
                (meta.clone(), Vec::new())
            }
            SelfPlayMode::Regularized { lambda, meta } => {
                meta.ensure_len(actions)?;
                if !(*lambda >= 0.0 && lambda.is_finite()) {
                    return Err(Error::param(format!("lambda must be >= 0, got {lambda}")));
                }
                if meta.probs().iter().any(|&p| p <= 0.0) {
                    return Err(Error::InvalidStrategy(format!(
                        "regularized self-play takes ln of the meta-strategy, which has a zero entry: {meta}"
                    )));
                }
                (meta.clone(), meta.probs().iter().map(|p| p.ln()).collect())
            }
        };
        Ok(SelfPlayState { mode, hedge: HedgeState::from_strategy(&x0, schedule), cum_eta: 0.0, ln_meta })
    }

    pub fn mode(&self) -> &SelfPlayMode {
        &self.mode
    }

    pub fn rounds(&self) -> usize {
        self.hedge.rounds()
    }

    pub fn strategy(&self) -> MixedStrategy {
        match self.mode {
            SelfPlayMode::Regularized { lambda, .. } => {
                let pull = lambda * self.cum_eta;
                let logits: Vec<f64> = self
                    .hedge
                    .log_weights()
                    .iter()
                    .zip(&self.ln_meta)
                    .map(|(a, m)| (a + pull * m) / (1.0 + pull))
                    .collect();
                MixedStrategy::from_log_weights(&logits).expect("finite regularized logits")
            }
            _ => self.hedge.strategy(),
        }
    }

    /// One round: draw n-1 opponents from the current strategy and update on the realized gains.
    pub fn step<R: Rng + ?Sized>(&mut self, game: &SymmetricGame, rng: &mut R) -> Result<MixedStrategy> {
        let x = self.strategy();
        x.ensure_len(game.actions())?;
        let mut counts = CountVector::zeros(game.actions());
        for _ in 1..game.players() {
            counts.add(x.sample(rng));
        }
        self.hedge.observe(&game.normalized_gains(counts.counts()));
        self.cum_eta += self.hedge.schedule().rate(self.hedge.rounds(), game.actions());
        Ok(self.strategy())
    }

    /// Runs `rounds` steps and returns the last iterate.
    pub fn train<R: Rng + ?Sized>(&mut self, game: &SymmetricGame, rounds: usize, rng: &mut R) -> Result<MixedStrategy> {
        for _ in 0..rounds {
            self.step(game, rng)?;
        }
        Ok(self.strategy())
    }
}

impl Learner for SelfPlayState {
    fn kind(&self) -> LearnerKind {
        match self.mode {
            SelfPlayMode::Scratch => LearnerKind::SpScratch,
            SelfPlayMode::BcInit { .. } => LearnerKind::SpBc,
            SelfPlayMode::Regularized { .. } => LearnerKind::SpBcReg,
        }
    }

    fn strategy(&self) -> MixedStrategy {
        SelfPlayState::strategy(self)
    }

    /// Self-play ignores the match opponents and trains one more round against itself.
    fn observe(&mut self, game: &SymmetricGame, _feedback: &LearnerFeedback, rng: &mut dyn RngCore) -> Result<()> {
        self.step(game, rng).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionId, BuiltinGame};
    use crate::rng::{stream, Role};

    fn mv() -> SymmetricGame {
        SymmetricGame::builtin(BuiltinGame::Majority3).unwrap()
    }

    #[test]
    fn pure_state_is_absorbing() {
        let meta = MixedStrategy::pure(2, ActionId(0));
        let mut s = SelfPlayState::new(2, SelfPlayMode::BcInit { meta }, RateSchedule::sqrt_decay(1.0)).unwrap();
        let mut rng = stream(0, Role::Learner);
        for _ in 0..50 {
            assert_eq!(s.step(&mv(), &mut rng).unwrap().probs(), &[1.0, 0.0]);
        }
    }

    #[test]
    fn zero_lambda_matches_plain_self_play_bitwise() {
        let meta = MixedStrategy::new(vec![0.49, 0.51]).unwrap();
        let schedule = RateSchedule::sqrt_decay(1.0);
        let mut plain = SelfPlayState::new(2, SelfPlayMode::BcInit { meta: meta.clone() }, schedule).unwrap();
        let mut reg = SelfPlayState::new(2, SelfPlayMode::Regularized { lambda: 0.0, meta }, schedule).unwrap();
        let (mut r1, mut r2) = (stream(5, Role::Learner), stream(5, Role::Learner));
        for _ in 0..2000 {
            let a = plain.step(&mv(), &mut r1).unwrap();
            let b = reg.step(&mv(), &mut r2).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn huge_lambda_stays_at_meta() {
        let meta = MixedStrategy::new(vec![0.49, 0.51]).unwrap();
        let mut s = SelfPlayState::new(2, SelfPlayMode::Regularized { lambda: 1e9, meta: meta.clone() }, RateSchedule::sqrt_decay(1.0))
            .unwrap();
        assert_eq!(s.strategy(), meta);
        let mut rng = stream(2, Role::Learner);
        for _ in 0..500 {
            let x = s.step(&mv(), &mut rng).unwrap();
            assert!(x.tv_distance(&meta) < 1e-6, "{x}");
        }
    }

    #[test]
    fn regularized_rejects_zero_meta_entries() {
        let meta = MixedStrategy::new(vec![1.0, 0.0]).unwrap();
        let r = SelfPlayState::new(2, SelfPlayMode::Regularized { lambda: 0.1, meta }, RateSchedule::sqrt_decay(1.0));
        assert!(r.is_err());
    }

    #[test]
    fn reg_formula_matches_direct_evaluation() {
        // Recompute the closed form from an independent record of the draws.
        let meta = MixedStrategy::new(vec![0.3, 0.7]).unwrap();
        let lambda = 0.5;
        let schedule = RateSchedule::sqrt_decay(1.3);
        let game = mv();
        let mut s = SelfPlayState::new(2, SelfPlayMode::Regularized { lambda, meta: meta.clone() }, schedule).unwrap();
        let mut rng = stream(9, Role::Learner);
        let mut mirror = stream(9, Role::Learner);
        let mut sum_g = [0.0f64; 2];
        let mut sum_eta = 0.0;
        for t in 1..=200 {
            let x = s.strategy();
            let mut c = [0u32; 2];
            for _ in 0..2 {
                c[x.sample(&mut mirror).index()] += 1;
            }
            let eta = 1.3 * (2f64.ln() / t as f64).sqrt();
            for (a, g) in sum_g.iter_mut().enumerate() {
                *g += eta * game.payoff_raw(a, &c);
            }
            sum_eta += eta;
            let got = s.step(&game, &mut rng).unwrap();
            let logits: Vec<f64> = (0..2)
                .map(|a| (meta.probs()[a].ln() + sum_g[a] + lambda * sum_eta * meta.probs()[a].ln()) / (1.0 + lambda * sum_eta))
                .collect();
            let want = MixedStrategy::from_log_weights(&logits).unwrap();
            assert!(got.tv_distance(&want) < 1e-12);
        }
    }
}
