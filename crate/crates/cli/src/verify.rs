use std::fmt::Write as _;

use eqshare_core::game::{
    dense_from_symmetric, validate, validate_dense, DenseValidationReport, SymmetricGame, ValidationReport,
    DEFAULT_ENUMERATION_CAP, DENSE_MAX_ACTIONS, DENSE_MAX_PLAYERS,
};
use serde::Serialize;

use crate::error::CliResult;

/// Zero-sum and boundedness over count profiles, plus tensor symmetry for small games.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub game: String,
    pub players: usize,
    pub actions: usize,
    pub scale: f64,
    pub count_form: ValidationReport,
    /// Present when the game is small enough to expand into per-player tensors.
    pub dense: Option<DenseValidationReport>,
    pub passed: bool,
}

impl VerifyReport {
    /// First failed check, naming the offending profile.
    pub fn failure(&self) -> Option<String> {
        if let Some(m) = self.count_form.failure_message() {
            return Some(m);
        }
        let d = self.dense.as_ref()?;
        if !d.zero_sum {
            return Some(format!("tensor payoffs do not sum to zero (worst {:.3e})", d.worst_zero_sum_violation));
        }
        if !d.symmetric {
            let (perm, player, joint) = d.symmetry_witness.clone().unwrap_or_default();
            return Some(format!(
                "payoffs are not permutation symmetric: player {player} at {joint:?} under permutation {perm:?}"
            ));
        }
        None
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: n={}, A={}, B={}, {} full profiles checked\n",
            self.game, self.players, self.actions, self.scale, self.count_form.profiles_checked
        );
        let _ = writeln!(s, "zero-sum worst violation: {:.3e}", self.count_form.worst_violation);
        match &self.dense {
            Some(d) => {
                let _ = writeln!(s, "tensor symmetry worst violation: {:.3e}", d.worst_symmetry_violation);
            }
            None => s.push_str("tensor checks skipped (game too large to expand)\n"),
        }
        match self.failure() {
            None => s.push_str("PASS\n"),
            Some(f) => {
                let _ = writeln!(s, "FAIL: {f}");
            }
        }
        s
    }
}

pub fn verify(game: &SymmetricGame) -> CliResult<VerifyReport> {
    let count_form = validate(game, DEFAULT_ENUMERATION_CAP)?;
    let dense = if game.players() <= DENSE_MAX_PLAYERS && game.actions() <= DENSE_MAX_ACTIONS {
        Some(validate_dense(&dense_from_symmetric(game)?))
    } else {
        None
    };
    let passed = count_form.passed && dense.as_ref().is_none_or(|d| d.passed());
    Ok(VerifyReport {
        game: game.name().to_string(),
        players: game.players(),
        actions: game.actions(),
        scale: game.scale(),
        count_form,
        dense,
        passed,
    })
}
