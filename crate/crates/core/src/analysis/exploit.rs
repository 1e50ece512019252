use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::grid::{arg_extreme, evaluate, SimplexGrid, REFINE_FACTOR};
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, SymmetricGame};
use crate::learners::{ExploiterState, RateSchedule};
use crate::rng::{substream, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExploitMethod {
    Grid,
    Exploiter,
}

/// Settings of the exploiter-population search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExploiterParams {
    pub runs: usize,
    pub rounds: usize,
    pub eta: f64,
    pub seed: u64,
}

impl Default for ExploiterParams {
    fn default() -> Self {
        ExploiterParams { runs: 100, rounds: 2000, eta: 1.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploitabilityResult {
    pub method: ExploitMethod,
    /// `min_y U_1(x, y^{⊗ n-1})` as found by the method.
    pub value: f64,
    pub worst: MixedStrategy,
    /// Exploiter method only: the exact target payoff at each run's final strategy.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub run_values: Vec<f64>,
}

/// Grid for up to three actions, exploiter runs otherwise.
pub fn default_exploit_method(game: &SymmetricGame) -> ExploitMethod {
    if game.actions() <= 3 {
        ExploitMethod::Grid
    } else {
        ExploitMethod::Exploiter
    }
}

/// Exact minimum of `U_1(x, y^{⊗ n-1})` over a simplex grid, refined once.
pub fn exploitability_grid(game: &SymmetricGame, x: &MixedStrategy, grid: &SimplexGrid) -> Result<ExploitabilityResult> {
    x.ensure_len(game.actions())?;
    if grid.actions() != game.actions() {
        return Err(Error::Dimension { expected: game.actions(), got: grid.actions() });
    }
    let points = grid.collect()?;
    let payoff = |y: &MixedStrategy| game.expected_payoff_mixed(x, y);
    let values = evaluate(&points, payoff)?;
    let (i, mut value) = arg_extreme(&values, true);
    let mut worst = points[i].clone();
    let near = grid.neighborhood(&worst, REFINE_FACTOR);
    if !near.is_empty() {
        let fine = evaluate(&near, payoff)?;
        let (j, v) = arg_extreme(&fine, true);
        if v < value {
            value = v;
            worst = near[j].clone();
        }
    }
    Ok(ExploitabilityResult { method: ExploitMethod::Grid, value, worst, run_values: Vec::new() })
}

/// Coarse-grid payoff vectors computed once, for scoring many strategies in one game.
///
/// Gives the same result as [`exploitability_grid`] on the same grid.
#[derive(Debug, Clone)]
pub struct ExploitabilityTable {
    grid: SimplexGrid,
    points: Vec<MixedStrategy>,
    payoffs: Vec<Vec<f64>>,
}

impl ExploitabilityTable {
    pub fn new(game: &SymmetricGame, grid: SimplexGrid) -> Result<Self> {
        if grid.actions() != game.actions() {
            return Err(Error::Dimension { expected: game.actions(), got: grid.actions() });
        }
        let points = grid.collect()?;
        let payoffs = points.par_iter().map(|y| game.payoff_vector(y)).collect::<Result<_>>()?;
        Ok(ExploitabilityTable { grid, points, payoffs })
    }

    pub fn grid(&self) -> &SimplexGrid {
        &self.grid
    }

    pub fn evaluate(&self, game: &SymmetricGame, x: &MixedStrategy) -> Result<ExploitabilityResult> {
        x.ensure_len(game.actions())?;
        let values: Vec<f64> = self.payoffs.iter().map(|v| x.dot(v)).collect();
        let (i, mut value) = arg_extreme(&values, true);
        let mut worst = self.points[i].clone();
        let near = self.grid.neighborhood(&worst, REFINE_FACTOR);
        if !near.is_empty() {
            let fine = evaluate(&near, |y: &MixedStrategy| game.expected_payoff_mixed(x, y))?;
            let (j, v) = arg_extreme(&fine, true);
            if v < value {
                value = v;
                worst = near[j].clone();
            }
        }
        Ok(ExploitabilityResult { method: ExploitMethod::Grid, value, worst, run_values: Vec::new() })
    }
}

/// Best of `params.runs` independent exploiter populations, each scored exactly.
pub fn exploitability_exploiter(
    game: &SymmetricGame,
    x: &MixedStrategy,
    params: &ExploiterParams,
) -> Result<ExploitabilityResult> {
    x.ensure_len(game.actions())?;
    if params.runs == 0 {
        return Err(Error::param("exploiter search needs at least one run"));
    }
    let finals: Vec<(f64, MixedStrategy)> = (0..params.runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(params.seed, Role::Evaluation, r as u64);
            let mut e = ExploiterState::new(game, x.clone(), RateSchedule::sqrt_decay(params.eta))?;
            let y = e.train(game, params.rounds, &mut rng)?;
            Ok((game.expected_payoff_mixed(x, &y)?, y))
        })
        .collect::<Result<_>>()?;
    let run_values: Vec<f64> = finals.iter().map(|f| f.0).collect();
    let (i, value) = arg_extreme(&run_values, true);
    Ok(ExploitabilityResult { method: ExploitMethod::Exploiter, value, worst: finals[i].1.clone(), run_values })
}

pub fn exploitability(
    game: &SymmetricGame,
    x: &MixedStrategy,
    method: ExploitMethod,
    grid: Option<&SimplexGrid>,
    params: &ExploiterParams,
) -> Result<ExploitabilityResult> {
    match method {
        ExploitMethod::Grid => {
            let default = SimplexGrid::default_for(game.actions())?;
            exploitability_grid(game, x, grid.unwrap_or(&default))
        }
        ExploitMethod::Exploiter => exploitability_exploiter(game, x, params),
    }
}
