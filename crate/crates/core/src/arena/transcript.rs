use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::arena::{Metrics, MetricsAccumulator, OpponentSchedule, ReplayRound};
use crate::error::{Error, Result};
use crate::game::{ActionId, MixedStrategy, SymmetricGame};
use crate::learners::LearnerSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: usize,
    /// Learner strategy `x^t`.
    pub strategy: MixedStrategy,
    pub action: ActionId,
    /// Opponent meta-strategy `y^t`.
    pub meta: MixedStrategy,
    pub opponent_actions: Vec<ActionId>,
    pub opponent_counts: Vec<u32>,
    pub realized: f64,
    /// `u^t(x^t)`.
    pub expected: f64,
    /// `u^t(a)` for every action.
    pub payoffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub game: String,
    pub learner: LearnerSpec,
    pub schedule: String,
    pub seed: u64,
    pub rounds: Vec<RoundRecord>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn metrics(&self) -> Metrics {
        let mut acc = MetricsAccumulator::new();
        for r in &self.rounds {
            acc.push(&r.payoffs, r.expected, r.realized);
        }
        acc.finish()
    }

    pub fn final_strategy(&self) -> Option<&MixedStrategy> {
        self.rounds.last().map(|r| &r.strategy)
    }

    /// A schedule that replays this transcript's opponents exactly.
    pub fn to_replay(&self) -> OpponentSchedule {
        OpponentSchedule::Replay {
            rounds: self
                .rounds
                .iter()
                .map(|r| ReplayRound { meta: r.meta.clone(), actions: r.opponent_actions.clone() })
                .collect(),
        }
    }

    /// Recomputes every stored expected quantity and realized payoff from the game.
    /// Returns the worst absolute deviation, or an error past `1e-9 * B`.
    pub fn audit(&self, game: &SymmetricGame) -> Result<f64> {
        let tol = 1e-9 * game.scale();
        let mut worst = 0.0f64;
        for r in &self.rounds {
            let u = game.payoff_vector(&r.meta)?;
            let mut dev = r.strategy.dot(&u) - r.expected;
            for (a, b) in u.iter().zip(&r.payoffs) {
                dev = dev.abs().max((a - b).abs());
            }
            let realized = game.payoff_raw(r.action.index(), &r.opponent_counts);
            worst = worst.max(dev.abs()).max((realized - r.realized).abs());
            if worst > tol {
                return Err(Error::param(format!("transcript round {} deviates by {worst:e}", r.t)));
            }
        }
        Ok(worst)
    }

    /// One row per round: `t, x_0.., action, realized, expected, best`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let actions = self.rounds.first().map_or(0, |r| r.strategy.len());
        let mut header = vec!["t".to_string()];
        header.extend((0..actions).map(|a| format!("x_{a}")));
        header.extend(["action", "realized", "expected", "best"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rounds {
            let mut row = vec![r.t.to_string()];
            row.extend(r.strategy.probs().iter().map(|p| p.to_string()));
            row.push(r.action.to_string());
            row.push(r.realized.to_string());
            row.push(r.expected.to_string());
            row.push(r.payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max).to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::param(format!("writing transcript: {e}")))?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::param(format!("serializing transcript: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::param(format!("parsing transcript: {e}")))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::param(format!("writing transcript: {e}"))
}
