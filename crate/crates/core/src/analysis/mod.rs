//! Numerical oracles: grid minimax, best responses, equilibrium checks,
//! exploitability, the pooling bound and Monte Carlo utility.

mod equilibrium;
mod exploit;
mod grid;
mod minimax;
mod montecarlo;
mod pooling;
mod report;

pub use equilibrium::{check_equilibrium, EquilibriumConcept, EquilibriumReport, JointDistribution};
pub use exploit::{
    default_exploit_method, exploitability, exploitability_exploiter, exploitability_grid, ExploitMethod, ExploitabilityTable,
    ExploitabilityResult, ExploiterParams,
};
pub use grid::{grid_gap, SimplexGrid, GRID_POINT_CAP, REFINE_FACTOR};
pub use minimax::{best_response_set, minimax_identical, minimax_independent, MinimaxOrder, MinimaxResult, PAIR_CAP};
pub use montecarlo::{monte_carlo_utility, MonteCarloEstimate, MC_CHUNK};
pub use pooling::{pooling_check, PoolingReport, POOLING_CAP};
pub use report::AnalysisReport;
