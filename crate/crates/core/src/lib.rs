//! Securing an equal share in multiplayer symmetric zero-sum games.
//!
//! * [`game`]: count-form games, exact payoffs, validators, benchmark games.
//! * [`learners`]: Hedge, the strongly adaptive interval learner, behavior
//!   cloning, self-play variants and the exploiter.
//! * [`arena`]: learner-vs-schedule matches, adversary schedules and regret metrics.
//! * [`analysis`]: minimax grids, equilibrium checks, exploitability, pooling
//!   bounds and Monte Carlo utility.

pub mod analysis;
pub mod arena;
pub mod error;
pub mod game;
pub mod learners;
pub mod rng;

pub use error::{Error, Result};
