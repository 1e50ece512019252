use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{DenseGame, MixedStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EquilibriumConcept {
    Ne,
    Ce,
    Cce,
}

/// A candidate equilibrium: independent per-player strategies or a joint distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointDistribution {
    Product(Vec<MixedStrategy>),
    /// Probabilities over joint actions, row-major with player 0 most significant.
    Correlated(Vec<f64>),
}

impl JointDistribution {
    /// Uniform over the listed joint actions.
    pub fn uniform_over(game: &DenseGame, joints: &[Vec<usize>]) -> Self {
        let mut p = vec![0.0; game.joint_count()];
        for j in joints {
            p[game.index(j)] += 1.0 / joints.len() as f64;
        }
        JointDistribution::Correlated(p)
    }

    fn probabilities(&self, game: &DenseGame) -> Result<Vec<f64>> {
        match self {
            JointDistribution::Correlated(p) => {
                if p.len() != game.joint_count() {
                    return Err(Error::Dimension { expected: game.joint_count(), got: p.len() });
                }
                if p.iter().any(|v| v.is_nan() || *v < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidStrategy("joint distribution is not a probability vector".into()));
                }
                Ok(p.clone())
            }
            JointDistribution::Product(xs) => {
                if xs.len() != game.players() {
                    return Err(Error::Dimension { expected: game.players(), got: xs.len() });
                }
                for x in xs {
                    x.ensure_len(game.actions())?;
                }
                Ok((0..game.joint_count())
                    .map(|idx| game.joint(idx).iter().zip(xs).map(|(&a, x)| x.probs()[a]).product())
                    .collect())
            }
        }
    }
}

/// Largest deviation gain for the concept, and whether it is within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub concept: EquilibriumConcept,
    /// Max over players and admissible deviations of the gain, floored at 0.
    pub epsilon: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// (player, conditioning action for CE, deviation) of the largest gain.
    pub witness: Option<(usize, Option<usize>, usize)>,
}

/// Checks a candidate against NE, CE or CCE on a tensor game.
pub fn check_equilibrium(
    game: &DenseGame,
    dist: &JointDistribution,
    concept: EquilibriumConcept,
    tol: f64,
) -> Result<EquilibriumReport> {
    if concept == EquilibriumConcept::Ne && !matches!(dist, JointDistribution::Product(_)) {
        return Err(Error::param("a Nash equilibrium check needs a product distribution"));
    }
    let p = dist.probabilities(game)?;
    let (n, k) = (game.players(), game.actions());
    let mut epsilon = 0.0f64;
    let mut witness = None;
    for i in 0..n {
        // gain[from][to] = Σ_{joint: a_i = from} p(joint) (U_i(to, a_-i) - U_i(joint)).
        let mut gain = vec![vec![0.0; k]; k];
        let mut mass = vec![0.0; k];
        for (idx, &pj) in p.iter().enumerate() {
            if pj == 0.0 {
                continue;
            }
            let mut joint = game.joint(idx);
            let from = joint[i];
            let base = game.utility(i, &joint);
            mass[from] += pj;
            for to in 0..k {
                joint[i] = to;
                gain[from][to] += pj * (game.utility(i, &joint) - base);
            }
        }
        match concept {
            EquilibriumConcept::Ce => {
                for from in 0..k {
                    if mass[from] <= 0.0 {
                        continue;
                    }
                    for to in 0..k {
                        let g = gain[from][to] / mass[from];
                        if g > epsilon {
                            epsilon = g;
                            witness = Some((i, Some(from), to));
                        }
                    }
                }
            }
            EquilibriumConcept::Ne | EquilibriumConcept::Cce => {
                for to in 0..k {
                    let g: f64 = (0..k).map(|from| gain[from][to]).sum();
                    if g > epsilon {
                        epsilon = g;
                        witness = Some((i, None, to));
                    }
                }
            }
        }
    }
    Ok(EquilibriumReport { concept, epsilon, tolerance: tol, holds: epsilon <= tol, witness })
}
