use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ActionId, BuiltinGame, MixedStrategy, SymmetricGame};
use crate::rng::{stream, Role};

/// One recorded round for replay: the meta-strategy in force and the opponents' actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayRound {
    pub meta: MixedStrategy,
    pub actions: Vec<ActionId>,
}

/// How the opponents' common meta-strategy `y^t` evolves.
///
/// `margin_switch` and `pure_switch` are the batched lower-bound instances: the
/// horizon is split into batches of length Δ and a fair coin per batch picks
/// one of two meta-strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpponentSchedule {
    Fixed {
        y: MixedStrategy,
    },
    Sequence {
        ys: Vec<MixedStrategy>,
    },
    /// Δ = max(1, round((T/V)^{2/3})), ε = min(1/(8√Δ), VΔ/T); per batch
    /// `(1/2-ε, 1/2+ε, 0, ..)` or its mirror. Only on `extended_majority`.
    MarginSwitch {
        v: f64,
        t: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Δ = max(1, round(T/V)); per batch the point mass on action 0 or on action 1.
    PureSwitch {
        v: f64,
        t: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Replay {
        rounds: Vec<ReplayRound>,
    },
}

/// Batch length and margin of the `margin_switch` instance.
pub fn margin_switch_params(v: f64, t: usize) -> Result<(usize, f64)> {
    check_budget(v, t)?;
    let delta = ((t as f64 / v).powf(2.0 / 3.0).round() as usize).max(1);
    let eps = (1.0 / (8.0 * (delta as f64).sqrt())).min(v * delta as f64 / t as f64);
    Ok((delta, eps))
}

/// Batch length of the `pure_switch` instance.
pub fn pure_switch_batch(v: f64, t: usize) -> Result<usize> {
    check_budget(v, t)?;
    Ok(((t as f64 / v).round() as usize).max(1))
}

fn check_budget(v: f64, t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::param("schedule horizon must be at least 1"));
    }
    if !(v >= 1.0 && v <= t as f64) {
        return Err(Error::param(format!("variation budget must lie in [1, {t}], got {v}")));
    }
    Ok(())
}

/// A schedule drawn out to its horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedSchedule {
    pub metas: Vec<MixedStrategy>,
    /// Recorded opponent actions, present only for replays.
    pub actions: Option<Vec<Vec<ActionId>>>,
    pub batch: Option<usize>,
    pub epsilon: Option<f64>,
}

impl RealizedSchedule {
    pub fn horizon(&self) -> usize {
        self.metas.len()
    }
}

impl OpponentSchedule {
    /// The horizon the schedule pins, if any.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            OpponentSchedule::Fixed { .. } => None,
            OpponentSchedule::Sequence { ys } => Some(ys.len()),
            OpponentSchedule::MarginSwitch { t, .. } | OpponentSchedule::PureSwitch { t, .. } => Some(*t),
            OpponentSchedule::Replay { rounds } => Some(rounds.len()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            OpponentSchedule::Fixed { .. } => "fixed",
            OpponentSchedule::Sequence { .. } => "sequence",
            OpponentSchedule::MarginSwitch { .. } => "margin_switch",
            OpponentSchedule::PureSwitch { .. } => "pure_switch",
            OpponentSchedule::Replay { .. } => "replay",
        }
    }

    /// Every problem with this schedule for `game` over `horizon` rounds.
    pub fn problems(&self, game: &SymmetricGame, horizon: usize) -> Vec<String> {
        let mut out = Vec::new();
        if horizon == 0 {
            out.push("horizon must be at least 1".into());
        }
        if let Some(t) = self.horizon() {
            if t != horizon {
                out.push(format!("{} schedule covers {t} rounds but the match has {horizon}", self.label()));
            }
        }
        let check = |y: &MixedStrategy, what: &str, out: &mut Vec<String>| {
            if y.len() != game.actions() {
                out.push(format!("{what} has {} entries, game has {} actions", y.len(), game.actions()));
            }
        };
        match self {
            OpponentSchedule::Fixed { y } => check(y, "fixed y", &mut out),
            OpponentSchedule::Sequence { ys } => {
                if let Some((i, _)) = ys.iter().enumerate().find(|(_, y)| y.len() != game.actions()) {
                    check(&ys[i], &format!("sequence entry {}", i + 1), &mut out);
                }
            }
            OpponentSchedule::MarginSwitch { v, t, .. } => {
                if let Err(e) = margin_switch_params(*v, *t) {
                    out.push(e.to_string());
                }
                if !matches!(game.builtin_kind(), Some(BuiltinGame::ExtendedMajority { .. })) {
                    out.push(format!("margin_switch is defined only on extended_majority, not {}", game.name()));
                }
            }
            OpponentSchedule::PureSwitch { v, t, .. } => {
                if let Err(e) = pure_switch_batch(*v, *t) {
                    out.push(e.to_string());
                }
            }
            OpponentSchedule::Replay { rounds } => {
                for (i, r) in rounds.iter().enumerate() {
                    if r.meta.len() != game.actions() || r.actions.len() + 1 != game.players() {
                        out.push(format!("replay round {} does not fit the game", i + 1));
                        break;
                    }
                    if r.actions.iter().any(|a| a.index() >= game.actions()) {
                        out.push(format!("replay round {} has an out-of-range action", i + 1));
                        break;
                    }
                }
            }
        }
        out
    }

    /// Draws the whole schedule. Batch coins come from the schedule's own seed,
    /// or from the run seed's schedule stream when none is given.
    pub fn realize(&self, game: &SymmetricGame, horizon: usize, run_seed: u64) -> Result<RealizedSchedule> {
        if let Some(p) = self.problems(game, horizon).into_iter().next() {
            return Err(Error::param(p));
        }
        let coin_stream = |seed: &Option<u64>| match seed {
            Some(s) => stream(*s, Role::Schedule),
            None => stream(run_seed, Role::Schedule),
        };
        let a = game.actions();
        Ok(match self {
            OpponentSchedule::Fixed { y } => plain(vec![y.clone(); horizon]),
            OpponentSchedule::Sequence { ys } => plain(ys.clone()),
            OpponentSchedule::MarginSwitch { v, t, seed } => {
                let (delta, eps) = margin_switch_params(*v, *t)?;
                let mut low = vec![0.0; a];
                low[0] = 0.5 - eps;
                low[1] = 0.5 + eps;
                let mut high = low.clone();
                high.swap(0, 1);
                let options = [MixedStrategy::new(low)?, MixedStrategy::new(high)?];
                let metas = batched(*t, delta, &options, &mut coin_stream(seed));
                RealizedSchedule { metas, actions: None, batch: Some(delta), epsilon: Some(eps) }
            }
            OpponentSchedule::PureSwitch { v, t, seed } => {
                let delta = pure_switch_batch(*v, *t)?;
                let options = [MixedStrategy::pure(a, ActionId(0)), MixedStrategy::pure(a, ActionId(1))];
                let metas = batched(*t, delta, &options, &mut coin_stream(seed));
                RealizedSchedule { metas, actions: None, batch: Some(delta), epsilon: None }
            }
            OpponentSchedule::Replay { rounds } => RealizedSchedule {
                metas: rounds.iter().map(|r| r.meta.clone()).collect(),
                actions: Some(rounds.iter().map(|r| r.actions.clone()).collect()),
                batch: None,
                epsilon: None,
            },
        })
    }
}

fn plain(metas: Vec<MixedStrategy>) -> RealizedSchedule {
    RealizedSchedule { metas, actions: None, batch: None, epsilon: None }
}

fn batched<R: Rng + ?Sized>(t: usize, delta: usize, options: &[MixedStrategy; 2], rng: &mut R) -> Vec<MixedStrategy> {
    let mut out = Vec::with_capacity(t);
    while out.len() < t {
        let pick = &options[usize::from(rng.gen::<bool>())];
        let len = delta.min(t - out.len());
        out.extend(std::iter::repeat_n(pick.clone(), len));
    }
    out
}
