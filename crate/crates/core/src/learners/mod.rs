//! Online learners and self-play baselines behind one interface.
//!
//! Every learner exposes its current mixed strategy, samples an action from
//! it, and observes the realized opponent actions after each round. Gains fed
//! to the exponential-weights machinery are payoffs divided by the game's
//! payoff bound, so rate schedules tuned for [-1, 1] apply to every game.

mod clone;
mod exploiter;
mod hedge;
mod saol;
mod selfplay;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ActionId, CountVector, MixedStrategy, SymmetricGame};

pub use clone::CloneLearner;
pub use exploiter::ExploiterState;
pub use hedge::{hedge_update, HedgeLearner, HedgeState};
pub use saol::{geometric_intervals_starting_at, SaolState};
pub use selfplay::{SelfPlayMode, SelfPlayState};

/// What a learner sees after a round.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerFeedback {
    /// 1-based round index.
    pub round: usize,
    /// Opponent actions in seat order; the first slot is "Player 2".
    pub opponent_actions: Vec<ActionId>,
    pub opponent_counts: CountVector,
    pub own_action: ActionId,
}

impl LearnerFeedback {
    pub fn new(actions: usize, round: usize, opponent_actions: Vec<ActionId>, own_action: ActionId) -> Result<Self> {
        let opponent_counts = CountVector::from_actions(actions, &opponent_actions)?;
        Ok(LearnerFeedback { round, opponent_actions, opponent_counts, own_action })
    }

    /// Draws n-1 opponents i.i.d. from `y`.
    pub fn sample<R: Rng + ?Sized>(
        game: &SymmetricGame,
        y: &MixedStrategy,
        round: usize,
        own_action: ActionId,
        rng: &mut R,
    ) -> Self {
        let opponent_actions: Vec<ActionId> = (1..game.players()).map(|_| y.sample(rng)).collect();
        Self::new(game.actions(), round, opponent_actions, own_action).expect("sampled actions are in range")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RateRule {
    Fixed,
    #[default]
    SqrtDecay,
}

/// How realized payoffs enter the exponential weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GainScale {
    /// Gains `U / B` in [-1, 1].
    #[default]
    Normalized,
    /// Raw payoffs `U`, realized exactly as normalized gains with `eta * B` and `lambda / B`.
    Raw,
}

/// Learning-rate schedule: `eta` or `eta * sqrt(ln A / t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSchedule {
    pub eta: f64,
    pub rule: RateRule,
}

impl RateSchedule {
    pub fn sqrt_decay(eta: f64) -> Self {
        RateSchedule { eta, rule: RateRule::SqrtDecay }
    }

    pub fn fixed(eta: f64) -> Self {
        RateSchedule { eta, rule: RateRule::Fixed }
    }

    /// Rate for 1-based round `t` over `actions` actions.
    pub fn rate(&self, t: usize, actions: usize) -> f64 {
        match self.rule {
            RateRule::Fixed => self.eta,
            RateRule::SqrtDecay => self.eta * ((actions as f64).ln() / t as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Hedge,
    Saol,
    Clone,
    SpScratch,
    SpBc,
    SpBcReg,
    Exploiter,
}

impl LearnerKind {
    pub fn label(&self) -> &'static str {
        match self {
            LearnerKind::Hedge => "hedge",
            LearnerKind::Saol => "saol",
            LearnerKind::Clone => "clone",
            LearnerKind::SpScratch => "sp_scratch",
            LearnerKind::SpBc => "sp_bc",
            LearnerKind::SpBcReg => "sp_bc_reg",
            LearnerKind::Exploiter => "exploiter",
        }
    }
}

/// An online learner facing the other n-1 players.
pub trait Learner: Send {
    fn kind(&self) -> LearnerKind;

    /// Strategy `x^t` for the upcoming round.
    fn strategy(&self) -> MixedStrategy;

    /// Action for the upcoming round, drawn from [`Learner::strategy`] unless overridden.
    fn act(&mut self, rng: &mut dyn RngCore) -> ActionId {
        self.strategy().sample(rng)
    }

    fn observe(&mut self, game: &SymmetricGame, feedback: &LearnerFeedback, rng: &mut dyn RngCore) -> Result<()>;
}

fn default_eta() -> f64 {
    1.0
}

fn is_normalized(g: &GainScale) -> bool {
    *g == GainScale::Normalized
}

/// Learner as written in an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub rate: RateRule,
    #[serde(default, skip_serializing_if = "is_normalized")]
    pub gains: GainScale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    /// Overrides the run seed for the learner's own random stream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Opponent meta-strategy known to behavior-cloning initialized learners.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<MixedStrategy>,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind, eta: f64) -> Self {
        LearnerSpec {
            kind,
            eta,
            rate: RateRule::SqrtDecay,
            gains: GainScale::Normalized,
            lambda: None, horizon: None, seed: None, meta: None }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_meta(mut self, meta: MixedStrategy) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn with_gains(mut self, gains: GainScale) -> Self {
        self.gains = gains;
        self
    }

    /// Rate schedule on normalized gains. Under [`GainScale::Raw`] this is `eta * B`.
    pub fn schedule_for(&self, game: &SymmetricGame) -> RateSchedule {
        let eta = match self.gains {
            GainScale::Normalized => self.eta,
            GainScale::Raw => self.eta * game.scale(),
        };
        RateSchedule { eta, rule: self.rate }
    }

    /// Regularization strength on normalized gains. Under [`GainScale::Raw`] this is `lambda / B`.
    pub fn lambda_for(&self, game: &SymmetricGame) -> Option<f64> {
        self.lambda.map(|l| match self.gains {
            GainScale::Normalized => l,
            GainScale::Raw => l / game.scale(),
        })
    }

    /// Problems with this spec for `game`, all of them.
    pub fn problems(&self, game: &SymmetricGame) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            out.push(format!("learner eta must be positive, got {}", self.eta));
        }
        if let Some(meta) = &self.meta {
            if meta.len() != game.actions() {
                out.push(format!("learner meta has {} entries, game has {} actions", meta.len(), game.actions()));
            }
        }
        match self.kind {
            LearnerKind::SpBc | LearnerKind::SpBcReg if self.meta.is_none() => {
                out.push(format!("{} needs the opponents' meta-strategy (learner.meta)", self.kind.label()))
            }
            LearnerKind::Exploiter => {
                out.push("exploiter is not an online learner; use exploitability analysis".into())
            }
            _ => {}
        }
        if self.kind == LearnerKind::SpBcReg {
            match self.lambda {
                Some(l) if l >= 0.0 && l.is_finite() => {}
                other => out.push(format!("sp_bc_reg needs lambda >= 0, got {other:?}")),
            }
        }
        out
    }

    /// Builds the learner. `horizon` is the match length (SAOL needs it).
    pub fn build(&self, game: &SymmetricGame, horizon: usize) -> Result<Box<dyn Learner>> {
        if let Some(p) = self.problems(game).into_iter().next() {
            return Err(Error::param(p));
        }
        let schedule = self.schedule_for(game);
        let actions = game.actions();
        Ok(match self.kind {
            LearnerKind::Hedge => Box::new(HedgeLearner::new(actions, schedule)),
            LearnerKind::Saol => Box::new(SaolState::new(actions, self.horizon.unwrap_or(horizon), schedule)?),
            LearnerKind::Clone => Box::new(CloneLearner::new(actions)),
            LearnerKind::SpScratch => Box::new(SelfPlayState::new(actions, SelfPlayMode::Scratch, schedule)?),
            LearnerKind::SpBc => {
                let meta = self.meta.clone().expect("checked above");
                Box::new(SelfPlayState::new(actions, SelfPlayMode::BcInit { meta }, schedule)?)
            }
            LearnerKind::SpBcReg => {
                let meta = self.meta.clone().expect("checked above");
                let lambda = self.lambda_for(game).expect("checked above");
                Box::new(SelfPlayState::new(actions, SelfPlayMode::Regularized { lambda, meta }, schedule)?)
            }
            LearnerKind::Exploiter => unreachable!("rejected by problems()"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_decay_rates() {
        let s = RateSchedule::sqrt_decay(2.0);
        assert_eq!(s.rate(1, 2), 2.0 * 2f64.ln().sqrt());
        assert!((s.rate(4, 3) - 2.0 * (3f64.ln() / 4.0).sqrt()).abs() < 1e-15);
        assert!((1..1000).all(|t| s.rate(t, 2) > 0.0));
    }

    #[test]
    fn spec_parsing_and_problems() {
        let spec: LearnerSpec = serde_json::from_str(r#"{"kind":"sp_bc_reg","eta":1,"lambda":0.01}"#).unwrap();
        let game = crate::game::builtin_game("majority3", None, None).unwrap();
        let problems = spec.problems(&game);
        assert_eq!(problems.len(), 1, "{problems:?}");
        assert!(spec.build(&game, 10).is_err());
        let spec: LearnerSpec = serde_json::from_str(r#"{"kind":"hedge"}"#).unwrap();
        assert_eq!(spec.eta, 1.0);
        assert_eq!(spec.rate, RateRule::SqrtDecay);
        assert!(spec.build(&game, 10).is_ok());
        let bad: LearnerSpec = serde_json::from_str(r#"{"kind":"exploiter","eta":-1}"#).unwrap();
        assert_eq!(bad.problems(&game).len(), 2);
    }

    #[test]
    fn raw_gains_rescale_eta_and_lambda() {
        let game = crate::game::builtin_game("sdg", Some(30), None).unwrap();
        let meta = MixedStrategy::new(vec![0.399, 0.6, 0.001]).unwrap();
        let raw = LearnerSpec::new(LearnerKind::SpBcReg, 2.0).with_lambda(1e-2).with_meta(meta.clone()).with_gains(GainScale::Raw);
        assert_eq!(raw.schedule_for(&game).eta, 58.0);
        assert_eq!(raw.lambda_for(&game), Some(1e-2 / 29.0));
        let json = serde_json::to_string(&raw).unwrap();
        assert!(json.contains(r#""gains":"raw""#), "{json}");
        let plain = LearnerSpec::new(LearnerKind::SpBcReg, 58.0).with_lambda(1e-2 / 29.0).with_meta(meta);
        let (mut a, mut b) = (raw.build(&game, 100).unwrap(), plain.build(&game, 100).unwrap());
        let (mut r1, mut r2) = (crate::rng::stream(1, crate::rng::Role::Learner), crate::rng::stream(1, crate::rng::Role::Learner));
        let fb = LearnerFeedback::new(3, 1, vec![ActionId(0); 29], ActionId(0)).unwrap();
        for _ in 0..200 {
            a.observe(&game, &fb, &mut r1).unwrap();
            b.observe(&game, &fb, &mut r2).unwrap();
            assert_eq!(a.strategy(), b.strategy());
        }
    }
}
