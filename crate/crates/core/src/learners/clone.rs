use rand::RngCore;

use crate::error::Result;
use crate::game::{ActionId, MixedStrategy, SymmetricGame};
use crate::learners::{Learner, LearnerFeedback, LearnerKind};

/// Behavior cloning: uniform in round 1, then repeat what Player 2 played last round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloneLearner {
    actions: usize,
    last_seen: Option<ActionId>,
}

impl CloneLearner {
    pub fn new(actions: usize) -> Self {
        CloneLearner { actions, last_seen: None }
    }

    pub fn last_seen(&self) -> Option<ActionId> {
        self.last_seen
    }
}

impl Learner for CloneLearner {
    fn kind(&self) -> LearnerKind {
        LearnerKind::Clone
    }

    fn strategy(&self) -> MixedStrategy {
        match self.last_seen {
            None => MixedStrategy::uniform(self.actions),
            Some(a) => MixedStrategy::pure(self.actions, a),
        }
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> ActionId {
        match self.last_seen {
            None => MixedStrategy::uniform(self.actions).sample(rng),
            Some(a) => a,
        }
    }

    fn observe(&mut self, _game: &SymmetricGame, feedback: &LearnerFeedback, _rng: &mut dyn RngCore) -> Result<()> {
        self.last_seen = feedback.opponent_actions.first().copied();
        Ok(())
    }
}
