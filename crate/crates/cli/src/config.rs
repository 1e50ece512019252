use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use eqshare_core::analysis::{ExploitMethod, ExploiterParams};
use eqshare_core::arena::OpponentSchedule;
use eqshare_core::game::{GameSpec, MixedStrategy, SymmetricGame};
use eqshare_core::learners::LearnerSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// A game given inline or as a path to a game file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameRef {
    File { file: PathBuf },
    Spec(GameSpec),
}

impl GameRef {
    /// `file:<path>` or a built-in name with optional size parameters.
    pub fn from_arg(name: &str, n: Option<usize>, actions: Option<usize>) -> Self {
        match name.strip_prefix("file:") {
            Some(path) => GameRef::File { file: PathBuf::from(path) },
            None => GameRef::Spec(GameSpec::Named { name: name.to_string(), n, actions }),
        }
    }

    /// Relative file paths resolve against `base`.
    pub fn load(&self, base: Option<&Path>) -> CliResult<SymmetricGame> {
        let spec = match self {
            GameRef::File { file } => {
                let path = match base {
                    Some(b) if file.is_relative() => b.join(file),
                    _ => file.clone(),
                };
                GameSpec::from_file(&path)?
            }
            GameRef::Spec(spec) => spec.clone(),
        };
        Ok(spec.build()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range {
        count: u64,
        #[serde(default)]
        base: u64,
    },
}

impl Seeds {
    pub fn resolve(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Range { count, base } => (0..*count).map(|i| base + i).collect(),
        }
    }
}

fn default_exploit_runs() -> usize {
    ExploiterParams::default().runs
}

fn default_exploit_rounds() -> usize {
    ExploiterParams::default().rounds
}

/// Post-run evaluation of each seed's final strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSpec {
    /// Monte Carlo games per seed; 0 skips the estimate.
    #[serde(default)]
    pub num_games: usize,
    #[serde(default)]
    pub exploitability: bool,
    /// Defaults to grid for up to three actions, exploiter otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploit_method: Option<ExploitMethod>,
    #[serde(default = "default_exploit_runs")]
    pub exploit_runs: usize,
    #[serde(default = "default_exploit_rounds")]
    pub exploit_rounds: usize,
    /// Opponent strategy for utility; defaults to the last round's meta-strategy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub against: Option<MixedStrategy>,
}

impl Default for EvaluationSpec {
    fn default() -> Self {
        EvaluationSpec {
            num_games: 0,
            exploitability: false,
            exploit_method: None,
            exploit_runs: default_exploit_runs(),
            exploit_rounds: default_exploit_rounds(),
            against: None,
        }
    }
}

fn default_true() -> bool {
    true
}

/// One experiment: a learner against a schedule, repeated over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameRef,
    pub learner: LearnerSpec,
    pub schedule: OpponentSchedule,
    pub t: usize,
    pub seeds: Seeds,
    #[serde(default)]
    pub evaluation: EvaluationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Write one per-round CSV per seed.
    #[serde(default = "default_true")]
    pub transcripts: bool,
}

/// A config whose references all resolved.
#[derive(Debug, Clone)]
pub struct ValidatedExperiment {
    pub config: ExperimentConfig,
    pub game: SymmetricGame,
    pub seeds: Vec<u64>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("parsing {}: {e}", path.display())))
    }

    /// Checks everything and reports every problem found, not just the first.
    pub fn validate(&self, base: Option<&Path>) -> CliResult<ValidatedExperiment> {
        let mut problems = Vec::new();
        let game = match self.game.load(base) {
            Ok(g) => Some(g),
            Err(e) => {
                problems.push(format!("game: {}", e.to_string().trim_start_matches("config error:\n  ")));
                None
            }
        };
        if self.t == 0 {
            problems.push("t must be at least 1".into());
        }
        let seeds = self.seeds.resolve();
        if seeds.is_empty() {
            problems.push("seeds must not be empty".into());
        }
        if seeds.iter().collect::<BTreeSet<_>>().len() != seeds.len() {
            problems.push("seeds must be distinct".into());
        }
        let eval = &self.evaluation;
        if eval.exploitability && eval.exploit_method == Some(ExploitMethod::Exploiter) && eval.exploit_runs == 0 {
            problems.push("evaluation.exploit_runs must be at least 1".into());
        }
        if let Some(g) = &game {
            problems.extend(self.learner.problems(g).into_iter().map(|p| format!("learner: {p}")));
            // Structural schedule problems are still worth listing when t itself is invalid.
            let horizon = self.t.max(1);
            problems.extend(self.schedule.problems(g, horizon).into_iter().map(|p| format!("schedule: {p}")));
            if let Some(y) = &eval.against {
                if y.len() != g.actions() {
                    problems.push(format!(
                        "evaluation.against has {} entries, game has {} actions",
                        y.len(),
                        g.actions()
                    ));
                }
            }
        }
        match game {
            Some(game) if problems.is_empty() => Ok(ValidatedExperiment { config: self.clone(), game, seeds }),
            _ => Err(CliError::Config(problems)),
        }
    }
}
