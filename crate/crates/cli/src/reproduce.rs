use std::fmt::Write as _;
use std::path::Path;

use eqshare_core::analysis::{monte_carlo_utility, ExploitabilityTable, SimplexGrid};
use eqshare_core::arena::{run_match_summary, OpponentSchedule};
use eqshare_core::game::{builtin_game, MixedStrategy, SymmetricGame};
use eqshare_core::learners::{GainScale, LearnerKind, LearnerSpec};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::{header_markdown, pure_label, write_file, ReportHeader, RunReport, SeedRow, Stat};
use crate::simulate::{jobs, run_ordered, write_report};

/// Regularization strengths of the regularized self-play roster.
pub const LAMBDAS: [f64; 4] = [1e-5, 1e-4, 1e-3, 1e-2];

/// A convergence-table reproduction: every algorithm of the roster trained
/// against fixed opponents playing `meta`.
#[derive(Debug, Clone)]
pub struct TableSetup {
    pub name: String,
    pub game: SymmetricGame,
    pub meta: MixedStrategy,
    pub eta: f64,
    pub horizon: usize,
    pub runs: usize,
    pub base_seed: u64,
    /// Monte Carlo games per evaluated strategy.
    pub mc_games: usize,
    /// Runs of the worst class scored by Monte Carlo.
    pub mc_runs: usize,
}

impl TableSetup {
    pub fn mv() -> Self {
        TableSetup {
            name: "mv".into(),
            game: builtin_game("majority3", None, None).expect("built-in"),
            meta: MixedStrategy::new(vec![0.49, 0.51]).expect("valid"),
            eta: 1.0,
            horizon: 100_000,
            runs: 100,
            base_seed: 0,
            mc_games: 300_000,
            mc_runs: 10,
        }
    }

    pub fn sdg() -> Self {
        TableSetup {
            name: "sdg".into(),
            game: builtin_game("sdg", Some(30), None).expect("built-in"),
            meta: MixedStrategy::new(vec![0.399, 0.6, 0.001]).expect("valid"),
            eta: 2.0,
            horizon: 10_000,
            runs: 100,
            base_seed: 0,
            mc_games: 300_000,
            mc_runs: 10,
        }
    }

    /// SP_scratch, SP_BC, SP_BC_reg for each λ, then Hedge; all on raw payoffs.
    pub fn roster(&self) -> Vec<LearnerSpec> {
        let base = |kind| LearnerSpec::new(kind, self.eta).with_gains(GainScale::Raw);
        let mut out = vec![base(LearnerKind::SpScratch), base(LearnerKind::SpBc).with_meta(self.meta.clone())];
        out.extend(LAMBDAS.iter().map(|&l| base(LearnerKind::SpBcReg).with_meta(self.meta.clone()).with_lambda(l)));
        out.push(base(LearnerKind::Hedge));
        out
    }
}

pub fn algorithm_label(spec: &LearnerSpec) -> String {
    match (spec.kind, spec.lambda) {
        (LearnerKind::SpBcReg, Some(l)) => format!("sp_bc_{l:e}"),
        (k, _) => k.label().to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub algorithm: String,
    pub class: String,
    pub runs: usize,
    pub frequency: f64,
}

/// Utility and exploitability of an algorithm's worst converged solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table2Row {
    pub algorithm: String,
    pub class: String,
    pub class_runs: usize,
    /// Exact utility against the meta-strategy, averaged over the class.
    pub utility_exact: f64,
    /// Monte Carlo estimates over the first runs of the class.
    pub utility_mc_mean: f64,
    pub utility_mc_std: f64,
    pub utility_mc_se: f64,
    pub mc_runs: usize,
    pub exploitability_mean: f64,
    pub exploitability_std: f64,
    pub worst_opponent: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub run: RunReport,
    pub table1: Vec<Table1Row>,
    pub table2: Vec<Table2Row>,
}

impl TableReport {
    pub fn table1_row(&self, algorithm: &str, class: &str) -> Option<&Table1Row> {
        self.table1.iter().find(|r| r.algorithm == algorithm && r.class == class)
    }

    pub fn table2_row(&self, algorithm: &str) -> Option<&Table2Row> {
        self.table2.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn markdown(&self, setup: &TableSetup) -> String {
        let mut s = header_markdown(&self.run.header);
        let algos: Vec<String> = setup.roster().iter().map(algorithm_label).collect();
        let mut classes: Vec<String> = (0..setup.game.actions()).map(|a| pure_label(setup.game.actions(), a)).collect();
        classes.push("unconverged".into());
        s.push_str("## Convergence distribution\n\n| strategy |");
        for a in &algos {
            let _ = write!(s, " {a} |");
        }
        s.push_str("\n|---|");
        s.push_str(&"---|".repeat(algos.len()));
        s.push('\n');
        for c in &classes {
            let _ = write!(s, "| {c} |");
            for a in &algos {
                let f = self.table1_row(a, c).map_or(0.0, |r| r.frequency);
                let _ = write!(s, " {:.0}% |", 100.0 * f);
            }
            s.push('\n');
        }
        s.push_str("\n## Utility and exploitability of the worst converged solution\n\n");
        s.push_str("| algorithm | class | utility (exact) | utility (MC) | exploitability |\n|---|---|---|---|---|\n");
        for r in &self.table2 {
            let _ = writeln!(
                s,
                "| {} | {} ({} runs) | {:.4} | {:.4} ± {:.4} | {:.2} ± {:.2} |",
                r.algorithm,
                r.class,
                r.class_runs,
                r.utility_exact,
                r.utility_mc_mean,
                r.utility_mc_std,
                r.exploitability_mean,
                r.exploitability_std
            );
        }
        let _ = writeln!(s, "\nself-audit: {}", if self.run.audit_ok { "ok" } else { "FAILED" });
        s
    }
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Trains the whole roster `runs` times and tabulates convergence, utility and exploitability.
pub fn reproduce_table(setup: &TableSetup) -> CliResult<TableReport> {
    let game = &setup.game;
    let roster = setup.roster();
    let labels: Vec<String> = roster.iter().map(algorithm_label).collect();
    let schedule = OpponentSchedule::Fixed { y: setup.meta.clone() };
    let table = ExploitabilityTable::new(game, SimplexGrid::default_for(game.actions())?)?;
    let seeds: Vec<u64> = (0..setup.runs as u64).map(|i| setup.base_seed + i).collect();
    let all = jobs(&vec![seeds; roster.len()]);
    let results = run_ordered(&all, |job| {
        let spec = &roster[job.config];
        let s = run_match_summary(game, spec, &schedule, setup.horizon, job.seed)?;
        let utility = game.expected_payoff_mixed(&s.final_strategy, &setup.meta)?;
        let mut row = SeedRow::new(job.config, &labels[job.config], job.seed, &s.metrics, &s.final_strategy, utility);
        row.exploitability = Some(table.evaluate(game, &s.final_strategy)?.value);
        Ok((row, s.final_strategy))
    })?;
    let (rows, finals): (Vec<SeedRow>, Vec<MixedStrategy>) = results.into_iter().unzip();

    let mut header = ReportHeader::new(&format!("reproduce {}", setup.name), game.name(), setup.horizon);
    header.notes.push(format!("opponent meta-strategy: {}", setup.meta));
    header.notes.push(format!("eta = {} on raw payoffs, learning rate eta * sqrt(ln A / t)", setup.eta));
    header.notes.push(format!("runs per algorithm: {}, seeds {}..{}", setup.runs, setup.base_seed, setup.base_seed + setup.runs as u64));
    header.notes.push(format!(
        "Monte Carlo: {} games on each of the first {} runs of the worst class",
        setup.mc_games, setup.mc_runs
    ));
    let run = RunReport::new(header, rows);

    let mut table1 = Vec::new();
    let mut table2 = Vec::new();
    for (config, label) in labels.iter().enumerate() {
        let group = &run.aggregates[config];
        for (class, &n) in &group.classes {
            table1.push(Table1Row {
                algorithm: label.clone(),
                class: class.clone(),
                runs: n,
                frequency: n as f64 / group.runs as f64,
            });
        }
        let members: Vec<usize> = (0..run.rows.len()).filter(|&i| run.rows[i].config == config).collect();
        let mut worst: Option<(String, f64)> = None;
        for class in group.classes.keys() {
            let us: Vec<f64> = members.iter().filter(|&&i| &run.rows[i].class == class).map(|&i| run.rows[i].utility).collect();
            let mean = Stat::of(&us).mean;
            if worst.as_ref().is_none_or(|w| mean < w.1) {
                worst = Some((class.clone(), mean));
            }
        }
        let (class, utility_exact) = worst.expect("at least one run");
        let in_class: Vec<usize> = members.into_iter().filter(|&i| run.rows[i].class == class).collect();
        let scored: Vec<(f64, f64)> = in_class
            .iter()
            .take(setup.mc_runs)
            .map(|&i| {
                let mc = monte_carlo_utility(game, &finals[i], &setup.meta, setup.mc_games, run.rows[i].seed)?;
                Ok((mc.mean, mc.std_error))
            })
            .collect::<CliResult<_>>()?;
        let mc = Stat::of(&scored.iter().map(|s| s.0).collect::<Vec<_>>());
        let se = Stat::of(&scored.iter().map(|s| s.1).collect::<Vec<_>>()).mean;
        let exploit = Stat::of(&in_class.iter().map(|&i| run.rows[i].exploitability.expect("scored")).collect::<Vec<_>>());
        let worst_opponent = table.evaluate(game, &finals[in_class[0]])?.worst.to_string();
        table2.push(Table2Row {
            algorithm: label.clone(),
            class,
            class_runs: in_class.len(),
            utility_exact,
            utility_mc_mean: mc.mean,
            utility_mc_std: mc.std,
            utility_mc_se: se,
            mc_runs: scored.len(),
            exploitability_mean: exploit.mean,
            exploitability_std: exploit.std,
            worst_opponent,
        });
    }
    Ok(TableReport { run, table1, table2 })
}

pub fn write_table(dir: &Path, setup: &TableSetup, report: &TableReport) -> CliResult<()> {
    write_report(dir, &report.run)?;
    write_file(dir, "table1.csv", &csv_bytes(&report.table1)?)?;
    write_file(dir, "table2.csv", &csv_bytes(&report.table2)?)?;
    write_file(dir, "report.json", serde_json::to_string_pretty(report)?.as_bytes())?;
    write_file(dir, "summary.md", report.markdown(setup).as_bytes())
}

/// One learner on one schedule instance.
#[derive(Debug, Clone)]
pub struct Case {
    pub label: String,
    pub game: SymmetricGame,
    pub learner: LearnerSpec,
    pub schedule: OpponentSchedule,
    pub v: f64,
    pub t: usize,
}

fn learner_roster() -> Vec<LearnerSpec> {
    [LearnerKind::Hedge, LearnerKind::Saol, LearnerKind::Clone].map(|k| LearnerSpec::new(k, 1.0)).to_vec()
}

fn run_cases(name: &str, cases: &[Case], seeds: &[u64]) -> CliResult<RunReport> {
    let all = jobs(&vec![seeds.to_vec(); cases.len()]);
    let rows = run_ordered(&all, |job| {
        let c = &cases[job.config];
        let s = run_match_summary(&c.game, &c.learner, &c.schedule, c.t, job.seed)?;
        Ok(SeedRow::new(job.config, &c.label, job.seed, &s.metrics, &s.final_strategy, s.metrics.u_avg))
    })?;
    let mut header = ReportHeader::new(name, &cases.iter().map(|c| c.game.name().to_string()).collect::<Vec<_>>().join(", "), "per case");
    header.notes.push(format!("seeds: {} per case, {}..{}", seeds.len(), seeds[0], seeds[seeds.len() - 1] + 1));
    header.notes.push("learners: hedge and saol with eta = 1 on normalized gains, clone".into());
    Ok(RunReport::new(header, rows))
}

/// Mean `u_avg` of one pure-switch case with the two reference levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerboundRow {
    pub learner: String,
    pub v: f64,
    pub t: usize,
    pub u_avg_mean: f64,
    pub u_avg_std: f64,
    pub u_avg_sem: f64,
    /// `-(V+1)/T`, the level behavior cloning is guaranteed.
    pub clone_floor: f64,
    /// `-0.05 V / T`.
    pub sharpness_level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerboundReport {
    pub run: RunReport,
    pub rows: Vec<LowerboundRow>,
}

impl LowerboundReport {
    pub fn row(&self, learner: &str, v: f64, t: usize) -> Option<&LowerboundRow> {
        self.rows.iter().find(|r| r.learner == learner && r.v == v && r.t == t)
    }
}

/// `(V, T)` pairs of the pure-switch sweep.
pub const PURE_SWITCH_CASES: [(f64, usize); 5] = [(32.0, 1024), (128.0, 4096), (256.0, 1024), (1024.0, 4096), (512.0, 1024)];

/// Hedge, SAOL and cloning against pure-switch opponents on majority3.
pub fn reproduce_lowerbound(seeds: &[u64]) -> CliResult<LowerboundReport> {
    let game = builtin_game("majority3", None, None)?;
    let mut cases = Vec::new();
    for &(v, t) in &PURE_SWITCH_CASES {
        for learner in learner_roster() {
            cases.push(Case {
                label: format!("pure_switch V={v} T={t} {}", learner.kind.label()),
                game: game.clone(),
                learner,
                schedule: OpponentSchedule::PureSwitch { v, t, seed: None },
                v,
                t,
            });
        }
    }
    let run = run_cases("reproduce lowerbound", &cases, seeds)?;
    let rows = cases
        .iter()
        .zip(&run.aggregates)
        .map(|(c, g)| LowerboundRow {
            learner: c.learner.kind.label().into(),
            v: c.v,
            t: c.t,
            u_avg_mean: g.u_avg.mean,
            u_avg_std: g.u_avg.std,
            u_avg_sem: g.u_avg.sem(),
            clone_floor: -(c.v + 1.0) / c.t as f64,
            sharpness_level: -0.05 * c.v / c.t as f64,
        })
        .collect();
    Ok(LowerboundReport { run, rows })
}

pub fn write_lowerbound(dir: &Path, report: &LowerboundReport) -> CliResult<()> {
    write_report(dir, &report.run)?;
    write_file(dir, "lowerbound.csv", &csv_bytes(&report.rows)?)?;
    let mut s = header_markdown(&report.run.header);
    s.push_str("| learner | V | T | mean u_avg | std | -(V+1)/T | -0.05 V/T |\n|---|---|---|---|---|---|---|\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {:.5} | {:.5} | {:.5} | {:.5} |",
            r.learner, r.v, r.t, r.u_avg_mean, r.u_avg_std, r.clone_floor, r.sharpness_level
        );
    }
    let _ = writeln!(s, "\nself-audit: {}", if report.run.audit_ok { "ok" } else { "FAILED" });
    write_file(dir, "report.json", serde_json::to_string_pretty(report)?.as_bytes())?;
    write_file(dir, "summary.md", s.as_bytes())
}

/// Horizons of the scaling sweep.
pub const SCALING_HORIZONS: [usize; 5] = [1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14];
/// Variation budget of the scaling sweep.
pub const SCALING_BUDGET: f64 = 8.0;

/// Fitted growth of dynamic regret in T for one learner on one game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub game: String,
    pub learner: String,
    pub horizons: Vec<usize>,
    pub dynamic_regret: Vec<f64>,
    pub dynamic_regret_per_round: Vec<f64>,
    pub u_avg: Vec<f64>,
    /// Least-squares slope of ln D-Reg against ln T.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub run: RunReport,
    pub fits: Vec<ScalingFit>,
}

impl ScalingReport {
    pub fn fit(&self, game: &str, learner: &str) -> Option<&ScalingFit> {
        self.fits.iter().find(|f| f.game == game && f.learner == learner)
    }
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Margin-switch opponents at fixed V over growing T on the given
/// extended-majority games; fits the exponent of each learner's dynamic regret.
pub fn reproduce_scaling(games: &[SymmetricGame], seeds: &[u64]) -> CliResult<ScalingReport> {
    let mut cases = Vec::new();
    for game in games {
        for learner in learner_roster() {
            for &t in &SCALING_HORIZONS {
                cases.push(Case {
                    label: format!("{} margin_switch V={SCALING_BUDGET} T={t} {}", game.name(), learner.kind.label()),
                    game: game.clone(),
                    learner: learner.clone(),
                    schedule: OpponentSchedule::MarginSwitch { v: SCALING_BUDGET, t, seed: None },
                    v: SCALING_BUDGET,
                    t,
                });
            }
        }
    }
    let run = run_cases("reproduce scaling", &cases, seeds)?;
    let mut fits = Vec::new();
    for (chunk, groups) in cases.chunks(SCALING_HORIZONS.len()).zip(run.aggregates.chunks(SCALING_HORIZONS.len())) {
        let horizons: Vec<usize> = chunk.iter().map(|c| c.t).collect();
        let dreg: Vec<f64> = groups.iter().map(|g| g.dynamic_regret.mean).collect();
        let lx: Vec<f64> = horizons.iter().map(|&t| (t as f64).ln()).collect();
        let ly: Vec<f64> = dreg.iter().map(|d| d.max(f64::MIN_POSITIVE).ln()).collect();
        fits.push(ScalingFit {
            game: chunk[0].game.name().to_string(),
            learner: chunk[0].learner.kind.label().into(),
            dynamic_regret_per_round: dreg.iter().zip(&horizons).map(|(d, &t)| d / t as f64).collect(),
            u_avg: groups.iter().map(|g| g.u_avg.mean).collect(),
            slope: ols_slope(&lx, &ly),
            horizons,
            dynamic_regret: dreg,
        });
    }
    Ok(ScalingReport { run, fits })
}

/// The lower-bound game of the scaling sweep and the padded three-action variant.
pub fn scaling_games() -> CliResult<Vec<SymmetricGame>> {
    Ok(vec![builtin_game("extended_majority", Some(3), Some(2))?, builtin_game("extended_majority", Some(5), Some(3))?])
}

pub fn write_scaling(dir: &Path, report: &ScalingReport) -> CliResult<()> {
    write_report(dir, &report.run)?;
    #[derive(Serialize)]
    struct Flat<'a> {
        game: &'a str,
        learner: &'a str,
        t: usize,
        dynamic_regret: f64,
        dynamic_regret_per_round: f64,
        u_avg: f64,
        slope: f64,
    }
    let mut flat = Vec::new();
    for f in &report.fits {
        for i in 0..f.horizons.len() {
            flat.push(Flat {
                game: &f.game,
                learner: &f.learner,
                t: f.horizons[i],
                dynamic_regret: f.dynamic_regret[i],
                dynamic_regret_per_round: f.dynamic_regret_per_round[i],
                u_avg: f.u_avg[i],
                slope: f.slope,
            });
        }
    }
    write_file(dir, "scaling.csv", &csv_bytes(&flat)?)?;
    let mut s = header_markdown(&report.run.header);
    let _ = writeln!(s, "Margin-switch opponents, V = {SCALING_BUDGET}; slope of ln D-Reg against ln T.\n");
    s.push_str("| game | learner | D-Reg per T | slope |\n|---|---|---|---|\n");
    for f in &report.fits {
        let per: Vec<String> = f.horizons.iter().zip(&f.dynamic_regret).map(|(t, d)| format!("{t}: {d:.1}")).collect();
        let _ = writeln!(s, "| {} | {} | {} | {:.3} |", f.game, f.learner, per.join(", "), f.slope);
    }
    let _ = writeln!(s, "\nself-audit: {}", if report.run.audit_ok { "ok" } else { "FAILED" });
    write_file(dir, "report.json", serde_json::to_string_pretty(report)?.as_bytes())?;
    write_file(dir, "summary.md", s.as_bytes())
}
