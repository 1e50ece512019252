use serde::{Deserialize, Serialize};

use crate::arena::{RealizedSchedule, Transcript};
use crate::error::Result;
use crate::game::{MixedStrategy, SymmetricGame};

/// Summary statistics of one match, all on expected payoffs `u^t` except `realized_avg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rounds: usize,
    /// `(1/T) Σ u^t(x^t)`.
    pub u_avg: f64,
    /// Average of the payoffs actually received.
    pub realized_avg: f64,
    /// `max_a Σ u^t(a) - Σ u^t(x^t)`.
    pub static_regret: f64,
    /// `Σ max_a u^t(a) - Σ u^t(x^t)`.
    pub dynamic_regret: f64,
    /// `max_a (1/T) Σ u^t(a)`.
    pub u_star: f64,
    /// `(1/T) Σ max_a u^t(a)`.
    pub u_dagger: f64,
    /// `Σ_t max_a |u^{t+1}(a) - u^t(a)|`.
    pub variation: f64,
}

/// Streaming computation of [`Metrics`].
#[derive(Debug, Clone, Default)]
pub struct MetricsAccumulator {
    rounds: usize,
    sum_expected: f64,
    sum_realized: f64,
    sum_best: f64,
    cumulative: Vec<f64>,
    variation: f64,
    previous: Option<Vec<f64>>,
}

impl MetricsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a round with payoff vector `payoffs`, expected learner payoff and realized payoff.
    pub fn push(&mut self, payoffs: &[f64], expected: f64, realized: f64) {
        self.rounds += 1;
        self.sum_expected += expected;
        self.sum_realized += realized;
        self.sum_best += max(payoffs);
        if self.cumulative.is_empty() {
            self.cumulative = vec![0.0; payoffs.len()];
        }
        for (c, u) in self.cumulative.iter_mut().zip(payoffs) {
            *c += u;
        }
        if let Some(prev) = &self.previous {
            self.variation += sup_distance(prev, payoffs);
            if prev.as_slice() != payoffs {
                self.previous = Some(payoffs.to_vec());
            }
        } else {
            self.previous = Some(payoffs.to_vec());
        }
    }

    pub fn finish(&self) -> Metrics {
        let t = self.rounds.max(1) as f64;
        let best_fixed = max(&self.cumulative);
        Metrics {
            rounds: self.rounds,
            u_avg: self.sum_expected / t,
            realized_avg: self.sum_realized / t,
            static_regret: best_fixed - self.sum_expected,
            dynamic_regret: self.sum_best - self.sum_expected,
            u_star: best_fixed / t,
            u_dagger: self.sum_best / t,
            variation: self.variation,
        }
    }
}

fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn static_regret(transcript: &Transcript) -> f64 {
    transcript.metrics().static_regret
}

pub fn dynamic_regret(transcript: &Transcript) -> f64 {
    transcript.metrics().dynamic_regret
}

/// `u†`, the average per-round best expected payoff.
pub fn dynamic_oracle(transcript: &Transcript) -> f64 {
    transcript.metrics().u_dagger
}

/// `V̂_T` of a sequence of payoff vectors.
pub fn variation_of(payoffs: &[Vec<f64>]) -> f64 {
    payoffs.windows(2).map(|w| sup_distance(&w[0], &w[1])).sum()
}

/// `V̂_T` of a realized schedule, computing `u^t` exactly.
pub fn variation_budget(game: &SymmetricGame, schedule: &RealizedSchedule) -> Result<f64> {
    let mut total = 0.0;
    let mut prev: Option<(&MixedStrategy, Vec<f64>)> = None;
    for y in &schedule.metas {
        if let Some((last, _)) = &prev {
            if *last == y {
                continue;
            }
        }
        let u = game.payoff_vector(y)?;
        if let Some((_, p)) = &prev {
            total += sup_distance(p, &u);
        }
        prev = Some((y, u));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_vectors() {
        let mut acc = MetricsAccumulator::new();
        for _ in 0..100 {
            acc.push(&[0.0098, -0.0102], -0.0102, 0.0);
        }
        let m = acc.finish();
        assert!((m.static_regret - 100.0 * 0.02).abs() < 1e-12);
        assert_eq!(m.static_regret, m.dynamic_regret);
        assert_eq!(m.variation, 0.0);
        assert!((m.u_dagger - 0.0098).abs() < 1e-15);
    }

    #[test]
    fn switch_variation() {
        assert_eq!(variation_of(&[vec![0.0, -1.0], vec![-1.0, 0.0], vec![-1.0, 0.0]]), 1.0);
        let mut acc = MetricsAccumulator::new();
        acc.push(&[0.0, -1.0], 0.0, 0.0);
        acc.push(&[-1.0, 0.0], 0.0, 0.0);
        acc.push(&[0.0, -1.0], -1.0, -1.0);
        let m = acc.finish();
        assert_eq!(m.variation, 2.0);
        assert_eq!(m.dynamic_regret, 1.0);
        assert_eq!(m.static_regret, -1.0 + 1.0);
    }
}
