//! Symmetric zero-sum games in opponent-count form.
//!
//! A symmetric game is fully described by the payoff of one player as a
//! function of its own action and the multiset of the other players'
//! actions. Storing that multiset as per-action counts makes the exact
//! expectation against i.i.d. opponents a sum over
//! C(n-2+A, A-1) count vectors instead of A^(n-1) joint actions.

mod builtin;
mod counts;
mod dense;
mod spec;
mod strategy;
mod symmetric;

pub use builtin::BuiltinGame;
pub use counts::{composition_count, Compositions, CountVector};
pub use dense::{dense_from_symmetric, validate_dense, DenseGame, DenseValidationReport, DENSE_MAX_ACTIONS, DENSE_MAX_PLAYERS};
pub use spec::{builtin_game, CustomGame, GameSpec};
pub use strategy::{ActionId, MixedStrategy, PROB_TOL};
pub use symmetric::{
    opponent_count_distribution, validate, SymmetricGame, ValidationReport, DEFAULT_ENUMERATION_CAP, PAYOFF_TOL,
};

pub(crate) use counts::binomial;
