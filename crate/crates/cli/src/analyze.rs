use eqshare_core::analysis::{
    check_equilibrium, default_exploit_method, exploitability, grid_gap, minimax_identical, minimax_independent,
    pooling_check, AnalysisReport, EquilibriumConcept, ExploitMethod, ExploiterParams, JointDistribution, MinimaxOrder,
    SimplexGrid,
};
use eqshare_core::game::{dense_from_symmetric, MixedStrategy, SymmetricGame};
use serde_json::json;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimaxWhich {
    MaxminIdentical,
    MinmaxIdentical,
    MaxminIndependent,
    MinmaxIndependent,
}

impl MinimaxWhich {
    pub fn parse(text: &str) -> CliResult<Self> {
        Ok(match text {
            "maxmin-identical" => MinimaxWhich::MaxminIdentical,
            "minmax-identical" => MinimaxWhich::MinmaxIdentical,
            "maxmin-independent" => MinimaxWhich::MaxminIndependent,
            "minmax-independent" => MinimaxWhich::MinmaxIndependent,
            other => {
                return Err(CliError::config(format!(
                    "unknown minimax {other:?}; expected maxmin-identical, minmax-identical, maxmin-independent or minmax-independent"
                )))
            }
        })
    }

    fn label(&self) -> &'static str {
        match self {
            MinimaxWhich::MaxminIdentical => "maxmin-identical",
            MinimaxWhich::MinmaxIdentical => "minmax-identical",
            MinimaxWhich::MaxminIndependent => "maxmin-independent",
            MinimaxWhich::MinmaxIndependent => "minmax-independent",
        }
    }
}

/// Candidate for an equilibrium check.
#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    /// Every player plays the pure action at its seat.
    Profile(Vec<usize>),
    /// Every player plays the same mixed strategy independently.
    Symmetric(MixedStrategy),
    /// Uniform over the listed joint actions.
    UniformOver(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyzeRequest {
    Minimax { which: MinimaxWhich, resolution: Option<usize> },
    Equilibrium { candidate: Candidate, concept: EquilibriumConcept, tol: f64 },
    Exploitability { x: MixedStrategy, method: Option<ExploitMethod>, params: ExploiterParams },
    Pooling { population: Vec<MixedStrategy>, z: MixedStrategy },
}

/// A report plus whether the analyzed property held, where that is meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOutcome {
    pub report: AnalysisReport,
    pub summary: String,
    /// Pooling only: a failed bound is an invariant violation.
    pub violation: Option<String>,
}

fn concept_label(c: EquilibriumConcept) -> &'static str {
    match c {
        EquilibriumConcept::Ne => "NE",
        EquilibriumConcept::Ce => "CE",
        EquilibriumConcept::Cce => "CCE",
    }
}

/// Parses `0,1,1` or `0.5,0.5`.
pub fn parse_numbers<T: std::str::FromStr>(text: &str, what: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| CliError::config(format!("{what}: cannot parse {p:?} in {text:?}"))))
        .collect()
}

pub fn parse_strategy(text: &str, what: &str) -> CliResult<MixedStrategy> {
    MixedStrategy::new(parse_numbers(text, what)?).map_err(|e| CliError::config(format!("{what}: {e}")))
}

pub fn analyze(game: &SymmetricGame, request: &AnalyzeRequest) -> CliResult<AnalyzeOutcome> {
    match request {
        AnalyzeRequest::Minimax { which, resolution } => {
            let grid = match resolution {
                Some(m) => SimplexGrid::new(game.actions(), *m)?,
                None => SimplexGrid::default_for(game.actions())?,
            };
            let r = match which {
                MinimaxWhich::MaxminIdentical => minimax_identical(game, &grid, MinimaxOrder::Maxmin)?,
                MinimaxWhich::MinmaxIdentical => minimax_identical(game, &grid, MinimaxOrder::Minmax)?,
                MinimaxWhich::MaxminIndependent => minimax_independent(game, &grid, MinimaxOrder::Maxmin)?,
                MinimaxWhich::MinmaxIndependent => minimax_independent(game, &grid, MinimaxOrder::Minmax)?,
            };
            let tolerance = grid_gap(game, grid.resolution());
            let opponents: Vec<String> = r.opponents.iter().map(|o| o.to_string()).collect();
            Ok(AnalyzeOutcome {
                summary: format!(
                    "{} on {}: {:.6} (grid resolution {}, tolerance {:.4}); learner {}, opponents {}",
                    which.label(),
                    game.name(),
                    r.value,
                    r.resolution,
                    tolerance,
                    r.learner,
                    opponents.join(" ")
                ),
                report: AnalysisReport {
                    quantity: format!("minimax/{}", which.label()),
                    value: r.value,
                    argument: json!({"learner": r.learner, "opponents": r.opponents, "resolution": r.resolution}),
                    tolerance,
                    method: "grid with exact inner maximum".into(),
                    seed: None,
                },
                violation: None,
            })
        }
        AnalyzeRequest::Equilibrium { candidate, concept, tol } => {
            let dense = dense_from_symmetric(game)?;
            let dist = match candidate {
                Candidate::Profile(p) => {
                    if p.len() != game.players() || p.iter().any(|&a| a >= game.actions()) {
                        return Err(CliError::config(format!("profile {p:?} does not fit {}", game.name())));
                    }
                    JointDistribution::Product(
                        p.iter().map(|&a| MixedStrategy::pure(game.actions(), eqshare_core::game::ActionId(a))).collect(),
                    )
                }
                Candidate::Symmetric(x) => {
                    x.ensure_len(game.actions())?;
                    JointDistribution::Product(vec![x.clone(); game.players()])
                }
                Candidate::UniformOver(joints) => {
                    if joints.is_empty()
                        || joints.iter().any(|j| j.len() != game.players() || j.iter().any(|&a| a >= game.actions()))
                    {
                        return Err(CliError::config(format!("joint actions {joints:?} do not fit {}", game.name())));
                    }
                    JointDistribution::uniform_over(&dense, joints)
                }
            };
            let r = check_equilibrium(&dense, &dist, *concept, *tol)?;
            Ok(AnalyzeOutcome {
                summary: format!(
                    "{} check on {}: epsilon {:.3e}, tolerance {:.1e}: {}",
                    concept_label(*concept),
                    game.name(),
                    r.epsilon,
                    tol,
                    if r.holds { "holds" } else { "does not hold" }
                ),
                report: AnalysisReport {
                    quantity: format!("equilibrium/{}", concept_label(*concept)),
                    value: r.epsilon,
                    argument: json!({"candidate": format!("{candidate:?}"), "holds": r.holds, "witness": r.witness}),
                    tolerance: *tol,
                    method: "exact deviation gains on the tensor game".into(),
                    seed: None,
                },
                violation: None,
            })
        }
        AnalyzeRequest::Exploitability { x, method, params } => {
            let method = method.unwrap_or_else(|| default_exploit_method(game));
            let r = exploitability(game, x, method, None, params)?;
            let (tolerance, seed) = match method {
                ExploitMethod::Grid => (grid_gap(game, SimplexGrid::default_for(game.actions())?.resolution()), None),
                ExploitMethod::Exploiter => (0.0, Some(params.seed)),
            };
            Ok(AnalyzeOutcome {
                summary: format!("exploitability of {x} on {}: {:.6} at y = {}", game.name(), r.value, r.worst),
                report: AnalysisReport {
                    quantity: "exploitability".into(),
                    value: r.value,
                    argument: json!({"x": x, "worst": r.worst}),
                    tolerance,
                    method: format!("{method:?}").to_lowercase(),
                    seed,
                },
                violation: None,
            })
        }
        AnalyzeRequest::Pooling { population, z } => {
            let r = pooling_check(game, population, z)?;
            Ok(AnalyzeOutcome {
                summary: format!(
                    "pooling on {} with N={}: lhs {:.6e} vs bound {:.6} over {} subsets: {}",
                    game.name(),
                    population.len(),
                    r.lhs,
                    r.bound,
                    r.subsets,
                    if r.passed { "pass" } else { "FAIL" }
                ),
                violation: (!r.passed).then(|| format!("pooling bound exceeded: {} > {}", r.lhs, r.bound)),
                report: AnalysisReport {
                    quantity: "pooling".into(),
                    value: r.lhs,
                    argument: json!({"z": z, "population": population, "passed": r.passed, "subsets": r.subsets.to_string()}),
                    tolerance: r.bound,
                    method: "enumeration".into(),
                    seed: None,
                },
            })
        }
    }
}
