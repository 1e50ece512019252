use rand::Rng;

use crate::error::Result;
use crate::game::{ActionId, CountVector, MixedStrategy, SymmetricGame};
use crate::learners::{HedgeState, RateSchedule};

/// A population of n-1 opponents learning one shared strategy that minimizes
/// a fixed target strategy's payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploiterState {
    hedge: HedgeState,
    target: MixedStrategy,
}

impl ExploiterState {
    pub fn new(game: &SymmetricGame, target: MixedStrategy, schedule: RateSchedule) -> Result<Self> {
        target.ensure_len(game.actions())?;
        Ok(ExploiterState { hedge: HedgeState::uniform(game.actions(), schedule), target })
    }

    pub fn target(&self) -> &MixedStrategy {
        &self.target
    }

    pub fn strategy(&self) -> MixedStrategy {
        self.hedge.strategy()
    }

    pub fn rounds(&self) -> usize {
        self.hedge.rounds()
    }

    /// Gains for the population after a round with target action `a1` and opponent counts `counts`:
    /// minus the target's payoff averaged over which opponent switches to `a`, divided by B.
    pub fn gains(game: &SymmetricGame, a1: ActionId, counts: &CountVector) -> Vec<f64> {
        let opponents = (game.players() - 1) as f64;
        let mut swapped = counts.counts().to_vec();
        (0..game.actions())
            .map(|a| {
                let mut avg = 0.0;
                for b in 0..game.actions() {
                    let cb = counts.counts()[b];
                    if cb == 0 {
                        continue;
                    }
                    swapped[b] -= 1;
                    swapped[a] += 1;
                    avg += cb as f64 / opponents * game.payoff_raw(a1.index(), &swapped);
                    swapped[a] -= 1;
                    swapped[b] += 1;
                }
                -avg / game.scale()
            })
            .collect()
    }

    /// One round: draw the target's action and n-1 population actions, then update.
    pub fn step<R: Rng + ?Sized>(&mut self, game: &SymmetricGame, rng: &mut R) -> Result<MixedStrategy> {
        let y = self.strategy();
        let a1 = self.target.sample(rng);
        let mut counts = CountVector::zeros(game.actions());
        for _ in 1..game.players() {
            counts.add(y.sample(rng));
        }
        self.hedge.observe(&Self::gains(game, a1, &counts));
        Ok(self.strategy())
    }

    pub fn train<R: Rng + ?Sized>(&mut self, game: &SymmetricGame, rounds: usize, rng: &mut R) -> Result<MixedStrategy> {
        for _ in 0..rounds {
            self.step(game, rng)?;
        }
        Ok(self.strategy())
    }

    /// Exact `U_1(target, y^{⊗ n-1})` at the current population strategy.
    pub fn target_payoff(&self, game: &SymmetricGame) -> Result<f64> {
        game.expected_payoff_mixed(&self.target, &self.strategy())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::BuiltinGame;
    use crate::rng::{stream, substream, Role};

    #[test]
    fn exploits_majority_action_one() {
        let game = SymmetricGame::builtin(BuiltinGame::Majority3).unwrap();
        let target = MixedStrategy::pure(2, ActionId(1));
        let mut e = ExploiterState::new(&game, target, RateSchedule::sqrt_decay(1.0)).unwrap();
        let y = e.train(&game, 2000, &mut stream(4, Role::Learner)).unwrap();
        assert!(y.probs()[0] > 0.99, "{y}");
        let exact = game.expected_payoff_mixed(e.target(), &MixedStrategy::pure(2, ActionId(0))).unwrap();
        assert_eq!(exact, -1.0);
        assert!((e.target_payoff(&game).unwrap() + 1.0).abs() < 0.02);
    }

    #[test]
    fn gains_average_over_switching_opponent() {
        // Majority with opponents (0,1) and target action 0: switching the 0-player to a
        // gives payoff(0, {a,1}); switching the 1-player gives payoff(0, {0,a}).
        let game = SymmetricGame::builtin(BuiltinGame::Majority3).unwrap();
        let counts = CountVector::new(vec![1, 1]);
        let g = ExploiterState::gains(&game, ActionId(0), &counts);
        let want0 = -(0.5 * game.payoff_raw(0, &[1, 1]) + 0.5 * game.payoff_raw(0, &[2, 0]));
        let want1 = -(0.5 * game.payoff_raw(0, &[0, 2]) + 0.5 * game.payoff_raw(0, &[1, 1]));
        assert_eq!(g, vec![want0, want1]);
    }

    #[test]
    fn symmetric_target_gives_symmetric_outcomes() {
        let game = SymmetricGame::builtin(BuiltinGame::Minority3).unwrap();
        let target = MixedStrategy::uniform(2);
        let p0 = game.expected_payoff_mixed(&target, &MixedStrategy::pure(2, ActionId(0))).unwrap();
        let p1 = game.expected_payoff_mixed(&target, &MixedStrategy::pure(2, ActionId(1))).unwrap();
        assert_eq!(p0, p1);
        let runs = 400;
        let mut leaning_zero = 0;
        for r in 0..runs {
            let mut e = ExploiterState::new(&game, target.clone(), RateSchedule::sqrt_decay(1.0)).unwrap();
            let y = e.train(&game, 200, &mut substream(17, Role::Learner, r)).unwrap();
            if y.probs()[0] > 0.5 {
                leaning_zero += 1;
            }
        }
        // Binomial(400, 1/2) has sd 10; allow 4 sd.
        assert!((leaning_zero as i64 - 200).abs() <= 40, "{leaning_zero}");
    }
}
