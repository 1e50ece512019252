use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::ActionId;

/// Per-action counts of a multiset of actions.
///
/// Opponent multisets have total n-1; full profiles have total n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CountVector {
    counts: Vec<u32>,
    total: u32,
}

impl CountVector {
    pub fn new(counts: Vec<u32>) -> Self {
        let total = counts.iter().sum();
        CountVector { counts, total }
    }

    pub fn zeros(actions: usize) -> Self {
        CountVector { counts: vec![0; actions], total: 0 }
    }

    /// Collapses an ordered action tuple into counts.
    pub fn from_actions(actions: usize, played: &[ActionId]) -> Result<Self> {
        let mut counts = vec![0u32; actions];
        for a in played {
            if a.0 >= actions {
                return Err(Error::Dimension { expected: actions, got: a.0 + 1 });
            }
            counts[a.0] += 1;
        }
        Ok(CountVector { counts, total: played.len() as u32 })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, a: ActionId) -> u32 {
        self.counts[a.0]
    }

    pub fn add(&mut self, a: ActionId) {
        self.counts[a.0] += 1;
        self.total += 1;
    }

    /// Panics if the count of `a` is zero.
    pub fn remove(&mut self, a: ActionId) {
        assert!(self.counts[a.0] > 0, "removing absent action {a}");
        self.counts[a.0] -= 1;
        self.total -= 1;
    }

    pub fn with_added(&self, a: ActionId) -> Self {
        let mut c = self.clone();
        c.add(a);
        c
    }

    pub fn with_removed(&self, a: ActionId) -> Self {
        let mut c = self.clone();
        c.remove(a);
        c
    }

    /// Sorted action tuple, e.g. counts `[1, 2]` become `(0,1,1)`.
    pub fn to_sorted_actions(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(a, &c)| std::iter::repeat_n(a, c as usize))
            .collect()
    }

    /// Parses `"0,2"`.
    pub fn parse(text: &str) -> Result<Self> {
        let counts = text
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|e| Error::param(format!("count {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(CountVector::new(counts))
    }
}

impl fmt::Display for CountVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tuple: Vec<String> = self.to_sorted_actions().iter().map(|a| a.to_string()).collect();
        write!(f, "({})", tuple.join(","))
    }
}

/// Number of compositions of `total` into `parts` non-negative parts, C(total+parts-1, parts-1).
pub fn composition_count(total: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial((total + parts - 1) as u128, (parts - 1) as u128)
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Lexicographic iterator over all compositions of `total` into `parts` parts.
///
/// The first composition is `[total, 0, ..., 0]`, the last `[0, ..., 0, total]`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<u32>,
    done: bool,
}

impl Compositions {
    pub fn new(total: u32, parts: usize) -> Self {
        if parts == 0 {
            return Compositions { current: Vec::new(), done: total != 0 };
        }
        let mut current = vec![0; parts];
        current[0] = total;
        Compositions { current, done: false }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let parts = self.current.len();
        // Move one unit from the rightmost non-zero slot (excluding the last)
        // one step right, and sweep everything after it back into that slot.
        match (0..parts.saturating_sub(1)).rev().find(|&i| self.current[i] > 0) {
            None => self.done = true,
            Some(i) => {
                let tail = self.current[parts - 1];
                self.current[parts - 1] = 0;
                self.current[i] -= 1;
                self.current[i + 1] = tail + 1;
            }
        }
        Some(out)
    }
}

/// Table of ln k! for k = 0..=max.
pub(crate) fn ln_factorials(max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_enumeration_matches_count() {
        for total in 0..8u32 {
            for parts in 1..5usize {
                let all: Vec<_> = Compositions::new(total, parts).collect();
                assert_eq!(all.len() as u128, composition_count(total as usize, parts));
                assert!(all.iter().all(|c| c.iter().sum::<u32>() == total));
                let mut sorted = all.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), all.len());
            }
        }
        assert_eq!(composition_count(29, 3), 465);
    }

    #[test]
    fn display_as_sorted_tuple() {
        assert_eq!(CountVector::new(vec![1, 2]).to_string(), "(0,1,1)");
    }

    #[test]
    fn from_actions_counts() {
        let c = CountVector::from_actions(3, &[ActionId(2), ActionId(0), ActionId(2)]).unwrap();
        assert_eq!(c.counts(), &[1, 0, 2]);
        assert_eq!(c.total(), 3);
        assert!(CountVector::from_actions(2, &[ActionId(2)]).is_err());
    }
}
