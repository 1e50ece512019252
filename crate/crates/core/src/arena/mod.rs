//! Learner-versus-schedule matches and the payoff, regret and variation metrics.

mod metrics;
mod play;
mod schedule;
mod transcript;

pub use metrics::{
    dynamic_oracle, dynamic_regret, static_regret, variation_budget, variation_of, Metrics, MetricsAccumulator,
};
pub use play::{run_match, run_match_summary, run_realized, MatchSummary};
pub use schedule::{margin_switch_params, pure_switch_batch, OpponentSchedule, RealizedSchedule, ReplayRound};
pub use transcript::{RoundRecord, Transcript};
