use serde::{Deserialize, Serialize};

use crate::arena::{Metrics, MetricsAccumulator, OpponentSchedule, RealizedSchedule, RoundRecord, Transcript};
use crate::error::{Error, Result};
use crate::game::{ActionId, MixedStrategy, SymmetricGame};
use crate::learners::{LearnerFeedback, LearnerSpec};
use crate::rng::{stream, Role};

/// Result of a match played without keeping the per-round record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub seed: u64,
    pub metrics: Metrics,
    /// Learner strategy after the last update.
    pub final_strategy: MixedStrategy,
}

struct RoundView<'a> {
    t: usize,
    strategy: &'a MixedStrategy,
    action: ActionId,
    meta: &'a MixedStrategy,
    opponents: &'a LearnerFeedback,
    realized: f64,
    expected: f64,
    payoffs: &'a [f64],
}

fn play(
    game: &SymmetricGame,
    spec: &LearnerSpec,
    schedule: &RealizedSchedule,
    seed: u64,
    mut sink: impl FnMut(RoundView<'_>),
) -> Result<MixedStrategy> {
    let horizon = schedule.horizon();
    let mut learner = spec.build(game, horizon)?;
    let mut own_rng = stream(spec.seed.unwrap_or(seed), Role::Learner);
    let mut opp_rng = stream(seed, Role::Opponents);
    let mut cached: Option<(&MixedStrategy, Vec<f64>)> = None;
    for (i, y) in schedule.metas.iter().enumerate() {
        let t = i + 1;
        if cached.as_ref().is_none_or(|(last, _)| *last != y) {
            cached = Some((y, game.payoff_vector(y)?));
        }
        let payoffs = &cached.as_ref().expect("filled above").1;
        let x = learner.strategy();
        let action = learner.act(&mut own_rng);
        let feedback = match &schedule.actions {
            Some(recorded) => LearnerFeedback::new(game.actions(), t, recorded[i].clone(), action)?,
            None => LearnerFeedback::sample(game, y, t, action, &mut opp_rng),
        };
        let realized = game.payoff_raw(action.index(), feedback.opponent_counts.counts());
        let expected = x.dot(payoffs);
        sink(RoundView { t, strategy: &x, action, meta: y, opponents: &feedback, realized, expected, payoffs });
        learner.observe(game, &feedback, &mut own_rng)?;
    }
    Ok(learner.strategy())
}

fn prepare(game: &SymmetricGame, schedule: &OpponentSchedule, horizon: usize, seed: u64) -> Result<RealizedSchedule> {
    if horizon == 0 {
        return Err(Error::param("a match needs at least one round"));
    }
    schedule.realize(game, horizon, seed)
}

/// Plays `horizon` rounds and keeps the full per-round record.
pub fn run_match(
    game: &SymmetricGame,
    learner: &LearnerSpec,
    schedule: &OpponentSchedule,
    horizon: usize,
    seed: u64,
) -> Result<Transcript> {
    let realized = prepare(game, schedule, horizon, seed)?;
    let mut rounds = Vec::with_capacity(horizon);
    play(game, learner, &realized, seed, |r| {
        rounds.push(RoundRecord {
            t: r.t,
            strategy: r.strategy.clone(),
            action: r.action,
            meta: r.meta.clone(),
            opponent_actions: r.opponents.opponent_actions.clone(),
            opponent_counts: r.opponents.opponent_counts.counts().to_vec(),
            realized: r.realized,
            expected: r.expected,
            payoffs: r.payoffs.to_vec(),
        })
    })?;
    Ok(Transcript {
        game: game.name().to_string(),
        learner: learner.clone(),
        schedule: schedule.label().to_string(),
        seed,
        rounds,
    })
}

/// Plays `horizon` rounds keeping only the metrics and the final strategy.
pub fn run_match_summary(
    game: &SymmetricGame,
    learner: &LearnerSpec,
    schedule: &OpponentSchedule,
    horizon: usize,
    seed: u64,
) -> Result<MatchSummary> {
    let realized = prepare(game, schedule, horizon, seed)?;
    run_realized(game, learner, &realized, seed)
}

/// Like [`run_match_summary`] on an already realized schedule.
pub fn run_realized(game: &SymmetricGame, learner: &LearnerSpec, schedule: &RealizedSchedule, seed: u64) -> Result<MatchSummary> {
    let mut acc = MetricsAccumulator::new();
    let final_strategy = play(game, learner, schedule, seed, |r| acc.push(r.payoffs, r.expected, r.realized))?;
    Ok(MatchSummary { seed, metrics: acc.finish(), final_strategy })
}
