use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{SymmetricGame, PAYOFF_TOL};

/// Largest player count for tensor-form games.
pub const DENSE_MAX_PLAYERS: usize = 4;
/// Largest action count accepted by [`dense_from_symmetric`].
pub const DENSE_MAX_ACTIONS: usize = 8;

/// Normal-form game with one full utility tensor per player.
///
/// Joint actions are flattened row-major with player 0 most significant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseGame {
    players: usize,
    actions: usize,
    utilities: Vec<Vec<f64>>,
}

impl DenseGame {
    pub fn new(players: usize, actions: usize, utilities: Vec<Vec<f64>>) -> Result<Self> {
        if !(2..=DENSE_MAX_PLAYERS).contains(&players) {
            return Err(Error::param(format!("dense games need 2..={DENSE_MAX_PLAYERS} players, got {players}")));
        }
        if actions < 1 {
            return Err(Error::param("dense games need at least one action"));
        }
        let size = actions.pow(players as u32);
        if utilities.len() != players {
            return Err(Error::Dimension { expected: players, got: utilities.len() });
        }
        if let Some(u) = utilities.iter().find(|u| u.len() != size) {
            return Err(Error::Dimension { expected: size, got: u.len() });
        }
        Ok(DenseGame { players, actions, utilities })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn joint_count(&self) -> usize {
        self.actions.pow(self.players as u32)
    }

    pub fn index(&self, joint: &[usize]) -> usize {
        joint.iter().fold(0, |acc, &a| acc * self.actions + a)
    }

    pub fn joint(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.players];
        for slot in out.iter_mut().rev() {
            *slot = index % self.actions;
            index /= self.actions;
        }
        out
    }

    pub fn utility(&self, player: usize, joint: &[usize]) -> f64 {
        self.utilities[player][self.index(joint)]
    }

    pub fn set_utility(&mut self, player: usize, joint: &[usize], value: f64) {
        let i = self.index(joint);
        self.utilities[player][i] = value;
    }
}

/// Expands a count-form game into per-player tensors:
/// `U_i(a_1..a_n) = payoff(a_i, counts of the other n-1 entries)`.
pub fn dense_from_symmetric(game: &SymmetricGame) -> Result<DenseGame> {
    let (n, k) = (game.players(), game.actions());
    if n > DENSE_MAX_PLAYERS || k > DENSE_MAX_ACTIONS {
        let needed = (k as u128).pow(n as u32) * n as u128;
        return Err(Error::SizeCap {
            what: format!("dense expansion of {}", game.name()),
            needed,
            cap: (DENSE_MAX_ACTIONS as u128).pow(DENSE_MAX_PLAYERS as u32) * DENSE_MAX_PLAYERS as u128,
        });
    }
    let size = k.pow(n as u32);
    let mut utilities = vec![vec![0.0; size]; n];
    let mut dense = DenseGame { players: n, actions: k, utilities: Vec::new() };
    let mut others = vec![0u32; k];
    for idx in 0..size {
        let joint = dense.joint(idx);
        for (i, u) in utilities.iter_mut().enumerate() {
            others.iter_mut().for_each(|c| *c = 0);
            for (j, &a) in joint.iter().enumerate() {
                if j != i {
                    others[a] += 1;
                }
            }
            u[idx] = game.payoff_raw(joint[i], &others);
        }
    }
    dense.utilities = utilities;
    Ok(dense)
}

/// Zero-sum and permutation-symmetry checks of a tensor game.
#[derive(Debug, Clone, Serialize)]
pub struct DenseValidationReport {
    pub zero_sum: bool,
    pub worst_zero_sum_violation: f64,
    pub symmetric: bool,
    pub worst_symmetry_violation: f64,
    /// (permutation, player, joint action) of the worst symmetry violation.
    pub symmetry_witness: Option<(Vec<usize>, usize, Vec<usize>)>,
    pub tolerance: f64,
}

impl DenseValidationReport {
    pub fn passed(&self) -> bool {
        self.zero_sum && self.symmetric
    }
}

/// Checks `Σ_i U_i(a) = 0` and `U_i(a_1..a_n) = U_{σ⁻¹(i)}(a_σ(1)..a_σ(n))` for all σ.
pub fn validate_dense(game: &DenseGame) -> DenseValidationReport {
    let scale = game
        .utilities
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let tolerance = PAYOFF_TOL * scale;
    let size = game.joint_count();

    let mut worst_sum = 0.0f64;
    for idx in 0..size {
        let s: f64 = game.utilities.iter().map(|u| u[idx]).sum();
        worst_sum = worst_sum.max(s.abs());
    }

    let mut worst_sym = 0.0f64;
    let mut witness = None;
    for sigma in permutations(game.players) {
        let mut inverse = vec![0; game.players];
        for (i, &s) in sigma.iter().enumerate() {
            inverse[s] = i;
        }
        for idx in 0..size {
            let joint = game.joint(idx);
            let permuted: Vec<usize> = sigma.iter().map(|&s| joint[s]).collect();
            for i in 0..game.players {
                let lhs = game.utilities[i][idx];
                let rhs = game.utility(inverse[i], &permuted);
                let gap = (lhs - rhs).abs();
                if gap > worst_sym {
                    worst_sym = gap;
                    witness = Some((sigma.clone(), i, joint.clone()));
                }
            }
        }
    }

    DenseValidationReport {
        zero_sum: worst_sum <= tolerance,
        worst_zero_sum_violation: worst_sum,
        symmetric: worst_sym <= tolerance,
        worst_symmetry_violation: worst_sym,
        symmetry_witness: if worst_sym > tolerance { witness } else { None },
        tolerance,
    }
}

/// All permutations of 0..n in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                extend(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::BuiltinGame;

    #[test]
    fn majority_tensor_matches_table() {
        let g = SymmetricGame::builtin(BuiltinGame::Majority3).unwrap();
        let d = dense_from_symmetric(&g).unwrap();
        let expected = [
            ([0, 0, 0], 0.0),
            ([1, 1, 1], 0.0),
            ([0, 1, 0], 0.5),
            ([0, 0, 1], 0.5),
            ([1, 1, 0], 0.5),
            ([1, 0, 1], 0.5),
            ([0, 1, 1], -1.0),
            ([1, 0, 0], -1.0),
        ];
        for (joint, u) in expected {
            assert_eq!(d.utility(0, &joint), u, "{joint:?}");
        }
        let r = validate_dense(&d);
        assert!(r.zero_sum && r.symmetric, "{r:?}");
    }

    #[test]
    fn minority_tensor() {
        let g = SymmetricGame::builtin(BuiltinGame::Minority3).unwrap();
        let d = dense_from_symmetric(&g).unwrap();
        assert_eq!(d.utility(0, &[1, 0, 0]), 1.0);
        assert!(validate_dense(&d).passed());
    }

    #[test]
    fn player_swap_symmetry() {
        let g = SymmetricGame::builtin(BuiltinGame::ExtendedMajority { n: 4, actions: 3 }).unwrap();
        let d = dense_from_symmetric(&g).unwrap();
        for idx in 0..d.joint_count() {
            let j = d.joint(idx);
            let swapped = [j[1], j[0], j[2], j[3]];
            assert_eq!(d.utility(0, &j), d.utility(1, &swapped));
        }
        assert!(validate_dense(&d).passed());
    }

    #[test]
    fn asymmetric_defect_is_caught() {
        let g = SymmetricGame::builtin(BuiltinGame::Majority3).unwrap();
        let mut d = dense_from_symmetric(&g).unwrap();
        // Swap U_1 between (0,1,0) and (0,0,1) asymmetrically: keep zero-sum by moving the
        // difference onto player 2 at the same profile.
        d.set_utility(0, &[0, 1, 0], 0.25);
        d.set_utility(1, &[0, 1, 0], -0.75);
        let r = validate_dense(&d);
        assert!(r.zero_sum);
        assert!(!r.symmetric);
        assert!(r.symmetry_witness.is_some());
    }

    #[test]
    fn size_cap() {
        let g = SymmetricGame::builtin(BuiltinGame::SwitchDominance { n: 30 }).unwrap();
        assert!(dense_from_symmetric(&g).unwrap_err().is_size_cap());
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
    }
}
