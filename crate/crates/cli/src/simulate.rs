use std::path::Path;

use eqshare_core::analysis::{
    default_exploit_method, exploitability, monte_carlo_utility, ExploitMethod, ExploiterParams, ExploitabilityTable,
    SimplexGrid,
};
use eqshare_core::arena::{run_match, run_match_summary};
use eqshare_core::game::{MixedStrategy, SymmetricGame};
use eqshare_core::learners::LearnerSpec;
use eqshare_core::rng::{stream, Role};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{EvaluationSpec, ValidatedExperiment};
use crate::error::{CliError, CliResult};
use crate::report::{write_file, ReportHeader, RunReport, SeedRow};

/// One seeded run of one config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Job {
    pub config: usize,
    pub seed: u64,
}

/// Jobs for every (config, seed) pair, ordered by config index then seed.
pub fn jobs(seeds_per_config: &[Vec<u64>]) -> Vec<Job> {
    let mut out: Vec<Job> = seeds_per_config
        .iter()
        .enumerate()
        .flat_map(|(config, seeds)| seeds.iter().map(move |&seed| Job { config, seed }))
        .collect();
    out.sort();
    out
}

/// Runs jobs in parallel and returns their results in job order.
pub fn run_ordered<T, F>(jobs: &[Job], f: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(Job) -> CliResult<T> + Sync + Send,
{
    jobs.par_iter().map(|&j| f(j)).collect()
}

/// Scores final strategies; the grid table is built once per game.
pub struct Evaluator<'a> {
    game: &'a SymmetricGame,
    spec: EvaluationSpec,
    method: ExploitMethod,
    table: Option<ExploitabilityTable>,
}

impl<'a> Evaluator<'a> {
    pub fn new(game: &'a SymmetricGame, spec: &EvaluationSpec) -> CliResult<Self> {
        let method = spec.exploit_method.unwrap_or_else(|| default_exploit_method(game));
        let table = if spec.exploitability && method == ExploitMethod::Grid {
            Some(ExploitabilityTable::new(game, SimplexGrid::default_for(game.actions())?)?)
        } else {
            None
        };
        Ok(Evaluator { game, spec: spec.clone(), method, table })
    }

    /// Fills utility, Monte Carlo and exploitability fields of `row`.
    pub fn score(&self, row: &mut SeedRow, x: &MixedStrategy, y: &MixedStrategy, seed: u64) -> CliResult<()> {
        row.utility = self.game.expected_payoff_mixed(x, y)?;
        if self.spec.num_games > 0 {
            let mc = monte_carlo_utility(self.game, x, y, self.spec.num_games, seed)?;
            row.utility_mc = Some(mc.mean);
            row.utility_mc_se = Some(mc.std_error);
        }
        if self.spec.exploitability {
            let value = match &self.table {
                Some(t) => t.evaluate(self.game, x)?.value,
                None => {
                    let params = ExploiterParams {
                        runs: self.spec.exploit_runs,
                        rounds: self.spec.exploit_rounds,
                        eta: 1.0,
                        seed: stream(seed, Role::Evaluation).gen(),
                    };
                    exploitability(self.game, x, self.method, None, &params)?.value
                }
            };
            row.exploitability = Some(value);
        }
        Ok(())
    }
}

/// Output of one simulated seed.
struct SeedOutput {
    row: SeedRow,
    transcript_csv: Option<Vec<u8>>,
}

fn label_of(spec: &LearnerSpec) -> String {
    match spec.lambda {
        Some(l) => format!("{}_{l:e}", spec.kind.label()),
        None => spec.kind.label().to_string(),
    }
}

/// Runs every seed of a validated experiment. With `out`, writes
/// `transcripts/seed_<s>.csv`, `runs.csv`, `aggregates.csv`, `report.json` and `summary.md`.
pub fn simulate(exp: &ValidatedExperiment, out: Option<&Path>) -> CliResult<RunReport> {
    let cfg = &exp.config;
    let game = &exp.game;
    let evaluator = Evaluator::new(game, &cfg.evaluation)?;
    let label = label_of(&cfg.learner);
    let all = jobs(std::slice::from_ref(&exp.seeds));
    let outputs = run_ordered(&all, |job| {
        let realized = cfg.schedule.realize(game, cfg.t, job.seed)?;
        let y_eval = cfg.evaluation.against.clone().unwrap_or_else(|| realized.metas.last().expect("t >= 1").clone());
        let (metrics, x, transcript_csv) = if cfg.transcripts {
            let tr = run_match(game, &cfg.learner, &cfg.schedule, cfg.t, job.seed)?;
            tr.audit(game).map_err(|e| CliError::Invariant(format!("seed {}: {e}", job.seed)))?;
            let mut bytes = Vec::new();
            tr.write_csv(&mut bytes)?;
            let x = tr.final_strategy().expect("t >= 1").clone();
            (tr.metrics(), x, Some(bytes))
        } else {
            let s = run_match_summary(game, &cfg.learner, &cfg.schedule, cfg.t, job.seed)?;
            (s.metrics, s.final_strategy, None)
        };
        let mut row = SeedRow::new(job.config, &label, job.seed, &metrics, &x, 0.0);
        evaluator.score(&mut row, &x, &y_eval, job.seed)?;
        Ok(SeedOutput { row, transcript_csv })
    })?;

    let mut header = ReportHeader::new("simulate", game.name(), cfg.t);
    header.notes.push(format!("learner: {}", serde_json::to_string(&cfg.learner)?));
    header.notes.push(format!("schedule: {}", cfg.schedule.label()));
    if cfg.evaluation.exploitability {
        header.notes.push(format!("exploitability method: {:?}", evaluator.method).to_lowercase());
    }
    let mut rows = Vec::with_capacity(outputs.len());
    if let Some(dir) = out {
        for o in &outputs {
            if let Some(bytes) = &o.transcript_csv {
                write_file(&dir.join("transcripts"), &format!("seed_{}.csv", o.row.seed), bytes)?;
            }
        }
    }
    rows.extend(outputs.into_iter().map(|o| o.row));
    let report = RunReport::new(header, rows);
    if let Some(dir) = out {
        write_report(dir, &report)?;
    }
    if !report.audit_ok {
        return Err(CliError::Invariant("aggregates do not match their per-seed rows".into()));
    }
    Ok(report)
}

pub fn write_report(dir: &Path, report: &RunReport) -> CliResult<()> {
    write_file(dir, "runs.csv", &report.rows_csv()?)?;
    write_file(dir, "aggregates.csv", &report.aggregates_csv()?)?;
    write_file(dir, "report.json", serde_json::to_string_pretty(report)?.as_bytes())?;
    write_file(dir, "summary.md", report.markdown().as_bytes())
}
