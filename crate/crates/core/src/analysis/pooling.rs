use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{binomial, MixedStrategy, SymmetricGame};

/// Largest number of opponent subsets the exact pooling check enumerates.
pub const POOLING_CAP: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolingReport {
    /// `|E_{without replacement}[U_1(z, x_S)] - U_1(z, x̄^{⊗ n-1})|`.
    pub lhs: f64,
    /// `2 B (n-2)^2 / N`.
    pub bound: f64,
    pub passed: bool,
    pub subsets: u128,
}

/// Compares drawing n-1 distinct population members against i.i.d. draws from their mixture.
///
/// The payoff is symmetric in the opponents, so unordered subsets carry equal
/// weight and are enumerated instead of ordered tuples.
pub fn pooling_check(game: &SymmetricGame, population: &[MixedStrategy], z: &MixedStrategy) -> Result<PoolingReport> {
    let (n, big_n) = (game.players(), population.len());
    if big_n < n - 1 {
        return Err(Error::param(format!("population of {big_n} cannot seat {} opponents", n - 1)));
    }
    z.ensure_len(game.actions())?;
    for x in population {
        x.ensure_len(game.actions())?;
    }
    let subsets = binomial(big_n as u128, (n - 1) as u128);
    if subsets > POOLING_CAP {
        return Err(Error::SizeCap { what: "pooling subsets".into(), needed: subsets, cap: POOLING_CAP });
    }
    let mut total = 0.0;
    let mut chosen: Vec<usize> = (0..n - 1).collect();
    loop {
        let opponents: Vec<MixedStrategy> = chosen.iter().map(|&i| population[i].clone()).collect();
        total += z.dot(&game.payoff_vector_independent(&opponents)?);
        if !next_combination(&mut chosen, big_n) {
            break;
        }
    }
    let without = total / subsets as f64;
    let mut pooled = vec![0.0; game.actions()];
    for x in population {
        for (p, q) in pooled.iter_mut().zip(x.probs()) {
            *p += q / big_n as f64;
        }
    }
    let pooled = MixedStrategy::from_weights(pooled)?;
    let with = game.expected_payoff_mixed(z, &pooled)?;
    let lhs = (without - with).abs();
    let bound = 2.0 * game.scale() * ((n - 2) * (n - 2)) as f64 / big_n as f64;
    Ok(PoolingReport { lhs, bound, passed: lhs <= bound + 1e-9 * game.scale(), subsets })
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_enumerate_all() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
    }
}
