use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::sample_index;

/// Absolute tolerance on the probability sum of a mixed strategy.
pub const PROB_TOL: f64 = 1e-9;

/// Index of an action in the shared action set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Probability vector over the shared action set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Validates non-negativity and the unit sum (within [`PROB_TOL`]).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("empty probability vector".into()));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidStrategy(format!("entry {i} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidStrategy(format!("entries sum to {sum}")));
        }
        Ok(MixedStrategy(probs))
    }

    /// Normalizes a non-negative weight vector.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidStrategy(format!("cannot normalize weights {weights:?}")));
        }
        Ok(MixedStrategy(weights.into_iter().map(|w| w / sum).collect()))
    }

    /// Softmax of log-weights with max subtraction. Entries equal to -inf get zero mass.
    pub fn from_log_weights(log_weights: &[f64]) -> Result<Self> {
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidStrategy("all log-weights are -inf".into()));
        }
        let w: Vec<f64> = log_weights.iter().map(|l| (l - max).exp()).collect();
        Self::from_weights(w)
    }

    pub fn uniform(actions: usize) -> Self {
        MixedStrategy(vec![1.0 / actions as f64; actions])
    }

    pub fn pure(actions: usize, a: ActionId) -> Self {
        let mut p = vec![0.0; actions];
        p[a.0] = 1.0;
        MixedStrategy(p)
    }

    /// Parses `"0.49,0.51"`.
    pub fn parse(text: &str) -> Result<Self> {
        let probs = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidStrategy(format!("{s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prob(&self, a: ActionId) -> f64 {
        self.0[a.0]
    }

    pub fn dot(&self, values: &[f64]) -> f64 {
        self.0.iter().zip(values).map(|(p, v)| p * v).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ActionId {
        ActionId(sample_index(&self.0, rng))
    }

    /// Index and value of the largest coordinate (first on ties).
    pub fn argmax(&self) -> (ActionId, f64) {
        let mut best = (0, self.0[0]);
        for (i, &p) in self.0.iter().enumerate().skip(1) {
            if p > best.1 {
                best = (i, p);
            }
        }
        (ActionId(best.0), best.1)
    }

    /// The pure action this strategy has converged to, if its top coordinate reaches `threshold`.
    pub fn converged_action(&self, threshold: f64) -> Option<ActionId> {
        let (a, p) = self.argmax();
        (p >= threshold).then_some(a)
    }

    pub fn ensure_len(&self, actions: usize) -> Result<()> {
        if self.len() != actions {
            return Err(Error::Dimension { expected: actions, got: self.len() });
        }
        Ok(())
    }

    /// Total-variation distance.
    pub fn tv_distance(&self, other: &MixedStrategy) -> f64 {
        0.5 * self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

impl<'de> Deserialize<'de> for MixedStrategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        MixedStrategy::new(probs).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p:.4}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_vectors() {
        assert!(MixedStrategy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![-0.1, 1.1]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
        assert!(MixedStrategy::new(vec![f64::NAN, 1.0]).is_err());
        assert!(MixedStrategy::new(vec![0.5, 0.5 + 1e-12]).is_ok());
    }

    #[test]
    fn log_weights_with_neg_infinity() {
        let x = MixedStrategy::from_log_weights(&[f64::NEG_INFINITY, 0.0, 0.0]).unwrap();
        assert_eq!(x.probs(), &[0.0, 0.5, 0.5]);
        assert!(MixedStrategy::from_log_weights(&[f64::NEG_INFINITY; 2]).is_err());
    }

    #[test]
    fn parse_and_converged() {
        let x = MixedStrategy::parse("0.005, 0.995").unwrap();
        assert_eq!(x.converged_action(0.99), Some(ActionId(1)));
        assert_eq!(MixedStrategy::uniform(2).converged_action(0.99), None);
    }
}
