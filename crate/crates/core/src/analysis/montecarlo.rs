use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{CountVector, MixedStrategy, SymmetricGame};
use crate::rng::{substream, Role};

/// Games per independent substream. Fixed so results do not depend on the thread count.
pub const MC_CHUNK: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub games: usize,
}

/// Sample mean of realized payoffs with `a_1 ~ x` and opponents i.i.d. from `y`.
pub fn monte_carlo_utility(
    game: &SymmetricGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
    num_games: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if num_games == 0 {
        return Err(Error::param("monte carlo needs at least one game"));
    }
    x.ensure_len(game.actions())?;
    y.ensure_len(game.actions())?;
    let chunks = num_games.div_ceil(MC_CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, Role::Evaluation, c as u64);
            let games = MC_CHUNK.min(num_games - c * MC_CHUNK);
            let mut counts = CountVector::zeros(game.actions());
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..games {
                let a = x.sample(&mut rng);
                counts = CountVector::zeros(counts.len());
                for _ in 1..game.players() {
                    counts.add(y.sample(&mut rng));
                }
                let u = game.payoff_raw(a.index(), counts.counts());
                s += u;
                s2 += u * u;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    let m = num_games as f64;
    let mean = s / m;
    let var = if num_games > 1 { ((s2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    Ok(MonteCarloEstimate { mean, std_error: (var / m).sqrt(), games: num_games })
}
