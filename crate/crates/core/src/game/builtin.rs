//! Payoff rules of the benchmark games.
//!
//! All rules take the learner's own action and the opponents' per-action
//! counts (total n-1).

use serde::{Deserialize, Serialize};

/// Which benchmark game to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuiltinGame {
    /// 3-player majority vote over {0, 1}.
    Majority3,
    /// 3-player minority game over {0, 1}.
    Minority3,
    /// Switch dominance game over {A, B, C} with `n` players.
    SwitchDominance { n: usize },
    /// `n`-player pairwise average of the 3-player majority game with
    /// `actions - 2` dummy actions.
    ExtendedMajority { n: usize, actions: usize },
}

/// Majority vote: 0 if everyone agrees, 1/2 in the majority, -1 alone.
pub(crate) fn majority3(a: usize, others: &[u32]) -> f64 {
    match others[a] {
        2 => 0.0,
        1 => 0.5,
        _ => -1.0,
    }
}

/// Minority game: 0 if everyone agrees, -1/2 in the majority, 1 alone.
pub(crate) fn minority3(a: usize, others: &[u32]) -> f64 {
    match others[a] {
        2 => 0.0,
        1 => -0.5,
        _ => 1.0,
    }
}

/// Switch dominance game with actions A=0, B=1, C=2.
///
/// With `n_A > 0.2 n` the ordering is B > A > C, otherwise C > B > A. For
/// ordering i > j > k the payoffs are
/// `r_i = I[n_j+n_k>0]`,
/// `r_j = I[n_k>0] - I[n_j+n_k>0] n_i/(n_j+n_k)`,
/// `r_k = -I[n_j+n_k>0] n_i/(n_j+n_k) - I[n_k>0] n_j/n_k`.
/// Terms under a zero indicator are never evaluated.
pub(crate) fn switch_dominance(n: usize, a: usize, others: &[u32]) -> f64 {
    let mut full = [others[0], others[1], others[2]];
    full[a] += 1;
    // n_A > 0.2 n, in integers
    let (i, j, k) = if 5 * full[0] as usize > n { (1, 0, 2) } else { (2, 1, 0) };
    let (ni, nj, nk) = (full[i] as f64, full[j] as f64, full[k] as f64);
    let lower = nj + nk;
    let share_of_top = if lower > 0.0 { ni / lower } else { 0.0 };
    if a == i {
        if lower > 0.0 { 1.0 } else { 0.0 }
    } else if a == j {
        let win = if nk > 0.0 { 1.0 } else { 0.0 };
        win - share_of_top
    } else {
        let beaten_by_middle = if nk > 0.0 { nj / nk } else { 0.0 };
        -share_of_top - beaten_by_middle
    }
}

/// Three-player majority game extended with dummy actions (every action >= 2).
///
/// Binary profiles follow majority vote; a dummy facing two binary players
/// gets -1. Remaining profiles use the symmetric zero-sum completion in which
/// dummies are interchangeable: with one dummy the two binary players get
/// 1/2 each, with two dummies the binary player gets 1 and each dummy -1/2,
/// and three dummies all get 0.
pub(crate) fn majority3_with_dummies(a: usize, b: usize, c: usize) -> f64 {
    let dummies_among_others = usize::from(b >= 2) + usize::from(c >= 2);
    match (a >= 2, dummies_among_others) {
        (false, 0) => {
            let same = usize::from(b == a) + usize::from(c == a);
            match same {
                2 => 0.0,
                1 => 0.5,
                _ => -1.0,
            }
        }
        (false, 1) => 0.5,
        (false, _) => 1.0,
        (true, 0) => -1.0,
        (true, 1) => -0.5,
        (true, _) => 0.0,
    }
}

/// `U^(n)_1(a, a_2..a_n) = 1/((n-1)(n-2)) * sum over ordered opponent pairs i != j of U^(3)_1(a, a_i, a_j)`,
/// evaluated from counts: the pair (x, y) occurs `c_x c_y - [x == y] c_x` times.
pub(crate) fn extended_majority(n: usize, a: usize, others: &[u32]) -> f64 {
    let pairs_total = ((n - 1) * (n - 2)) as f64;
    let mut sum = 0.0;
    for (x, &cx) in others.iter().enumerate() {
        if cx == 0 {
            continue;
        }
        for (y, &cy) in others.iter().enumerate() {
            let pairs = if x == y { cx * (cx - 1) } else { cx * cy };
            if pairs > 0 {
                sum += pairs as f64 * majority3_with_dummies(a, x, y);
            }
        }
    }
    sum / pairs_total
}
