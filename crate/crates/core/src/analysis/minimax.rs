use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::grid::{arg_extreme, evaluate, SimplexGrid, REFINE_FACTOR};
use crate::error::{Error, Result};
use crate::game::{ActionId, MixedStrategy, SymmetricGame};

/// Largest number of (outer, inner) evaluations a max-min scan may perform.
pub const PAIR_CAP: u128 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimaxOrder {
    /// `max_{x1} min_{opponents} U_1`.
    Maxmin,
    /// `min_{opponents} max_{x1} U_1`.
    Minmax,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxResult {
    pub order: MinimaxOrder,
    pub value: f64,
    /// Learner strategy attaining the value (the max-min argument, or a pure best response).
    pub learner: MixedStrategy,
    /// Opponent strategies attaining the value, one per opponent (or one shared strategy).
    pub opponents: Vec<MixedStrategy>,
    pub resolution: usize,
}

/// Minimax over identical opponents `x^{⊗ n-1}`.
///
/// The inner maximization over the learner is exact over pure actions; only
/// the outer variable is gridded, then refined once at 10x resolution.
pub fn minimax_identical(game: &SymmetricGame, grid: &SimplexGrid, order: MinimaxOrder) -> Result<MinimaxResult> {
    check_grid(game, grid)?;
    let points = grid.collect()?;
    match order {
        MinimaxOrder::Minmax => {
            let best_response = |x: &MixedStrategy| -> Result<f64> { Ok(max(&game.payoff_vector(x)?)) };
            let values = evaluate(&points, best_response)?;
            let (i, mut value) = arg_extreme(&values, true);
            let mut arg = points[i].clone();
            let near = grid.neighborhood(&arg, REFINE_FACTOR);
            if !near.is_empty() {
                let fine = evaluate(&near, best_response)?;
                let (j, v) = arg_extreme(&fine, true);
                if v < value {
                    value = v;
                    arg = near[j].clone();
                }
            }
            let u = game.payoff_vector(&arg)?;
            let br = ActionId(arg_extreme(&u, false).0);
            Ok(MinimaxResult {
                order,
                value,
                learner: MixedStrategy::pure(game.actions(), br),
                opponents: vec![arg],
                resolution: grid.resolution(),
            })
        }
        MinimaxOrder::Maxmin => {
            let n = points.len() as u128;
            if n * n > PAIR_CAP {
                return Err(Error::SizeCap { what: "max-min grid pairs".into(), needed: n * n, cap: PAIR_CAP });
            }
            let mut inner_points = points.clone();
            let mut inner: Vec<Vec<f64>> = points.par_iter().map(|y| game.payoff_vector(y)).collect::<Result<_>>()?;
            let worst = |x1: &MixedStrategy, inner: &[Vec<f64>]| -> (usize, f64) {
                let vals: Vec<f64> = inner.iter().map(|u| x1.dot(u)).collect();
                arg_extreme(&vals, true)
            };
            let outer: Vec<(usize, f64)> = points.par_iter().map(|x1| worst(x1, &inner)).collect();
            let values: Vec<f64> = outer.iter().map(|o| o.1).collect();
            let (i, _) = arg_extreme(&values, false);
            let mut learner = points[i].clone();
            // Refine: add fine inner points near the incumbent's worst case, then
            // re-scan fine learner points near the incumbent against the enlarged set.
            let near_inner = grid.neighborhood(&inner_points[outer[i].0], REFINE_FACTOR);
            let extra: Vec<Vec<f64>> = near_inner.par_iter().map(|y| game.payoff_vector(y)).collect::<Result<_>>()?;
            inner_points.extend(near_inner);
            inner.extend(extra);
            let mut candidates = vec![learner.clone()];
            candidates.extend(grid.neighborhood(&learner, REFINE_FACTOR));
            let refined: Vec<(usize, f64)> = candidates.par_iter().map(|x1| worst(x1, &inner)).collect();
            let vals: Vec<f64> = refined.iter().map(|o| o.1).collect();
            let (j, value) = arg_extreme(&vals, false);
            learner = candidates[j].clone();
            Ok(MinimaxResult {
                order,
                value,
                learner,
                opponents: vec![inner_points[refined[j].0].clone()],
                resolution: grid.resolution(),
            })
        }
    }
}

/// Minimax over independent opponents `(x_2, .., x_n)`, for n <= 3.
///
/// For max-min the inner minimum is taken over pure opponent profiles, which
/// is exact because the payoff is multilinear in the opponents' strategies.
/// For min-max the opponents are gridded jointly and refined once.
pub fn minimax_independent(game: &SymmetricGame, grid: &SimplexGrid, order: MinimaxOrder) -> Result<MinimaxResult> {
    check_grid(game, grid)?;
    let n = game.players();
    if n > 3 {
        return Err(Error::Unsupported(format!(
            "independent-opponent minimax searches at most 3 players, game has {n}"
        )));
    }
    let k = game.actions();
    let tensor = PayoffTensor::new(game);
    let points = grid.collect()?;
    match order {
        MinimaxOrder::Maxmin => {
            let profiles = tensor.pure_profiles();
            let pure: Vec<Vec<MixedStrategy>> = profiles
                .iter()
                .map(|p| p.iter().map(|&b| MixedStrategy::pure(k, ActionId(b))).collect())
                .collect();
            let vectors: Vec<Vec<f64>> = pure.iter().map(|opp| tensor.vector(opp)).collect();
            let worst = |x1: &MixedStrategy| -> (usize, f64) {
                let vals: Vec<f64> = vectors.iter().map(|u| x1.dot(u)).collect();
                arg_extreme(&vals, true)
            };
            let mut candidates = points;
            let outer: Vec<(usize, f64)> = candidates.par_iter().map(worst).collect();
            let (i, _) = arg_extreme(&outer.iter().map(|o| o.1).collect::<Vec<_>>(), false);
            let near = grid.neighborhood(&candidates[i], REFINE_FACTOR);
            candidates = std::iter::once(candidates[i].clone()).chain(near).collect();
            let refined: Vec<(usize, f64)> = candidates.par_iter().map(worst).collect();
            let (j, value) = arg_extreme(&refined.iter().map(|o| o.1).collect::<Vec<_>>(), false);
            Ok(MinimaxResult {
                order,
                value,
                learner: candidates[j].clone(),
                opponents: pure[refined[j].0].clone(),
                resolution: grid.resolution(),
            })
        }
        MinimaxOrder::Minmax => {
            let opponents = n - 1;
            let total = (points.len() as u128).pow(opponents as u32);
            if total > PAIR_CAP {
                return Err(Error::SizeCap { what: "independent opponent grid".into(), needed: total, cap: PAIR_CAP });
            }
            let best = |opp: &[&MixedStrategy]| max(&tensor.vector_refs(opp));
            let (value, arg) = if opponents == 1 {
                let vals: Vec<f64> = points.par_iter().map(|y| best(&[y])).collect();
                let (i, v) = arg_extreme(&vals, true);
                (v, vec![points[i].clone()])
            } else {
                let rows: Vec<(usize, f64)> = (0..points.len())
                    .into_par_iter()
                    .map(|i| {
                        let vals: Vec<f64> = points.iter().map(|y3| best(&[&points[i], y3])).collect();
                        arg_extreme(&vals, true)
                    })
                    .collect();
                let (i, v) = arg_extreme(&rows.iter().map(|r| r.1).collect::<Vec<_>>(), true);
                (v, vec![points[i].clone(), points[rows[i].0].clone()])
            };
            // Joint local refinement around the incumbent.
            let hoods: Vec<Vec<MixedStrategy>> = arg
                .iter()
                .map(|y| {
                    let mut h = grid.neighborhood(y, REFINE_FACTOR);
                    if h.is_empty() {
                        h.push(y.clone());
                    }
                    h
                })
                .collect();
            let (mut value, mut arg) = (value, arg);
            if opponents == 1 {
                let vals: Vec<f64> = hoods[0].par_iter().map(|y| best(&[y])).collect();
                let (i, v) = arg_extreme(&vals, true);
                if v < value {
                    value = v;
                    arg = vec![hoods[0][i].clone()];
                }
            } else {
                let rows: Vec<(usize, f64)> = hoods[0]
                    .par_iter()
                    .map(|y2| {
                        let vals: Vec<f64> = hoods[1].iter().map(|y3| best(&[y2, y3])).collect();
                        arg_extreme(&vals, true)
                    })
                    .collect();
                let (i, v) = arg_extreme(&rows.iter().map(|r| r.1).collect::<Vec<_>>(), true);
                if v < value {
                    value = v;
                    arg = vec![hoods[0][i].clone(), hoods[1][rows[i].0].clone()];
                }
            }
            let u = tensor.vector_refs(&arg.iter().collect::<Vec<_>>());
            let br = ActionId(arg_extreme(&u, false).0);
            Ok(MinimaxResult { order, value, learner: MixedStrategy::pure(k, br), opponents: arg, resolution: grid.resolution() })
        }
    }
}

/// `U_1(a, b_2, .., b_n)` tabulated over pure profiles for n <= 3.
struct PayoffTensor {
    actions: usize,
    opponents: usize,
    /// Indexed `[a][b_2 * A + b_3]` (or `[a][b_2]` for two players).
    values: Vec<Vec<f64>>,
}

impl PayoffTensor {
    fn new(game: &SymmetricGame) -> Self {
        let k = game.actions();
        let opponents = game.players() - 1;
        let size = k.pow(opponents as u32);
        let values = (0..k)
            .map(|a| {
                (0..size)
                    .map(|idx| {
                        let mut counts = vec![0u32; k];
                        let mut rest = idx;
                        for _ in 0..opponents {
                            counts[rest % k] += 1;
                            rest /= k;
                        }
                        game.payoff_raw(a, &counts)
                    })
                    .collect()
            })
            .collect();
        PayoffTensor { actions: k, opponents, values }
    }

    fn pure_profiles(&self) -> Vec<Vec<usize>> {
        let size = self.actions.pow(self.opponents as u32);
        (0..size)
            .map(|idx| {
                let mut rest = idx;
                (0..self.opponents)
                    .map(|_| {
                        let b = rest % self.actions;
                        rest /= self.actions;
                        b
                    })
                    .collect()
            })
            .collect()
    }

    fn vector(&self, opponents: &[MixedStrategy]) -> Vec<f64> {
        self.vector_refs(&opponents.iter().collect::<Vec<_>>())
    }

    /// Index digit i of a profile is opponent i's action (least significant first).
    fn vector_refs(&self, opponents: &[&MixedStrategy]) -> Vec<f64> {
        let k = self.actions;
        (0..k)
            .map(|a| {
                let row = &self.values[a];
                match opponents {
                    [y] => y.dot(row),
                    [y2, y3] => {
                        let mut total = 0.0;
                        for (b3, p3) in y3.probs().iter().enumerate() {
                            if *p3 == 0.0 {
                                continue;
                            }
                            let mut inner = 0.0;
                            for (b2, p2) in y2.probs().iter().enumerate() {
                                inner += p2 * row[b2 + k * b3];
                            }
                            total += p3 * inner;
                        }
                        total
                    }
                    _ => unreachable!("at most two opponents"),
                }
            })
            .collect()
    }
}

fn check_grid(game: &SymmetricGame, grid: &SimplexGrid) -> Result<()> {
    if grid.actions() != game.actions() {
        return Err(Error::Dimension { expected: game.actions(), got: grid.actions() });
    }
    Ok(())
}

fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Actions within `tol` of the best expected payoff against `y^{⊗ n-1}`.
pub fn best_response_set(game: &SymmetricGame, y: &MixedStrategy, tol: f64) -> Result<Vec<ActionId>> {
    let u = game.payoff_vector(y)?;
    let top = max(&u);
    Ok(u.iter().enumerate().filter(|(_, v)| **v >= top - tol).map(|(a, _)| ActionId(a)).collect())
}
