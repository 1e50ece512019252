use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use eqshare_core::arena::Metrics;
use eqshare_core::game::MixedStrategy;
use serde::Serialize;

use crate::error::CliResult;

/// Probability mass a last iterate needs on one action to count as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.99;

/// Label of the convergence class of a final strategy.
pub fn class_label(x: &MixedStrategy) -> String {
    match x.converged_action(CONVERGENCE_THRESHOLD) {
        Some(a) => pure_label(x.len(), a.index()),
        None => "unconverged".into(),
    }
}

/// `[0,1,0]`-style label of a pure strategy.
pub fn pure_label(actions: usize, a: usize) -> String {
    let parts: Vec<&str> = (0..actions).map(|i| if i == a { "1" } else { "0" }).collect();
    format!("[{}]", parts.join(","))
}

pub fn strategy_text(x: &MixedStrategy) -> String {
    x.probs().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
}

/// Settings every report records, so a table can be read without the command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub command: String,
    pub game: String,
    pub horizon: String,
    pub convergence_threshold: f64,
    pub convergence_rule: String,
    pub notes: Vec<String>,
}

impl ReportHeader {
    pub fn new(command: &str, game: &str, horizon: impl ToString) -> Self {
        ReportHeader {
            command: command.into(),
            game: game.into(),
            horizon: horizon.to_string(),
            convergence_threshold: CONVERGENCE_THRESHOLD,
            convergence_rule: "last iterate puts at least the threshold on one action".into(),
            notes: Vec::new(),
        }
    }
}

/// One seeded run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRow {
    pub config: usize,
    pub label: String,
    pub seed: u64,
    pub rounds: usize,
    pub u_avg: f64,
    pub realized_avg: f64,
    pub static_regret: f64,
    pub dynamic_regret: f64,
    pub u_star: f64,
    pub u_dagger: f64,
    pub variation: f64,
    pub final_strategy: String,
    pub class: String,
    /// Exact utility of the final strategy against the evaluation opponents.
    pub utility: f64,
    pub utility_mc: Option<f64>,
    pub utility_mc_se: Option<f64>,
    pub exploitability: Option<f64>,
}

impl SeedRow {
    pub fn new(config: usize, label: &str, seed: u64, metrics: &Metrics, x: &MixedStrategy, utility: f64) -> Self {
        SeedRow {
            config,
            label: label.into(),
            seed,
            rounds: metrics.rounds,
            u_avg: metrics.u_avg,
            realized_avg: metrics.realized_avg,
            static_regret: metrics.static_regret,
            dynamic_regret: metrics.dynamic_regret,
            u_star: metrics.u_star,
            u_dagger: metrics.u_dagger,
            variation: metrics.variation,
            final_strategy: strategy_text(x),
            class: class_label(x),
            utility,
            utility_mc: None,
            utility_mc_se: None,
            exploitability: None,
        }
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Stat { mean: f64::NAN, std: f64::NAN, n };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean, std, n }
    }

    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        self.std / (self.n as f64).sqrt()
    }
}

/// Aggregates of the rows of one config.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupAggregate {
    pub config: usize,
    pub label: String,
    pub runs: usize,
    pub u_avg: Stat,
    pub realized_avg: Stat,
    pub static_regret: Stat,
    pub dynamic_regret: Stat,
    pub utility: Stat,
    pub exploitability: Option<Stat>,
    /// Runs per convergence class.
    pub classes: BTreeMap<String, usize>,
}

pub fn aggregate(rows: &[SeedRow]) -> Vec<GroupAggregate> {
    let mut groups: BTreeMap<usize, Vec<&SeedRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.config).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(config, rs)| {
            let col = |f: fn(&SeedRow) -> f64| Stat::of(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            let exploit: Vec<f64> = rs.iter().filter_map(|r| r.exploitability).collect();
            let mut classes = BTreeMap::new();
            for r in &rs {
                *classes.entry(r.class.clone()).or_insert(0) += 1;
            }
            GroupAggregate {
                config,
                label: rs[0].label.clone(),
                runs: rs.len(),
                u_avg: col(|r| r.u_avg),
                realized_avg: col(|r| r.realized_avg),
                static_regret: col(|r| r.static_regret),
                dynamic_regret: col(|r| r.dynamic_regret),
                utility: col(|r| r.utility),
                exploitability: (exploit.len() == rs.len()).then(|| Stat::of(&exploit)),
                classes,
            }
        })
        .collect()
}

/// Per-seed rows with their aggregates and a self-audit flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub header: ReportHeader,
    pub rows: Vec<SeedRow>,
    pub aggregates: Vec<GroupAggregate>,
    /// The emitted aggregates equal a recomputation from the rows.
    pub audit_ok: bool,
}

impl RunReport {
    pub fn new(header: ReportHeader, rows: Vec<SeedRow>) -> Self {
        let aggregates = aggregate(&rows);
        let mut report = RunReport { header, rows, aggregates, audit_ok: false };
        report.audit_ok = report.audit();
        report
    }

    /// Recomputes the aggregates from the rows and compares them bitwise.
    pub fn audit(&self) -> bool {
        let same = |a: &Stat, b: &Stat| a.n == b.n && a.mean.to_bits() == b.mean.to_bits() && a.std.to_bits() == b.std.to_bits();
        let again = aggregate(&self.rows);
        again.len() == self.aggregates.len()
            && again.iter().zip(&self.aggregates).all(|(a, b)| {
                a.config == b.config
                    && a.runs == b.runs
                    && a.classes == b.classes
                    && same(&a.u_avg, &b.u_avg)
                    && same(&a.realized_avg, &b.realized_avg)
                    && same(&a.static_regret, &b.static_regret)
                    && same(&a.dynamic_regret, &b.dynamic_regret)
                    && same(&a.utility, &b.utility)
                    && match (&a.exploitability, &b.exploitability) {
                        (Some(x), Some(y)) => same(x, y),
                        (None, None) => true,
                        _ => false,
                    }
            })
    }

    pub fn group(&self, label: &str) -> Option<&GroupAggregate> {
        self.aggregates.iter().find(|g| g.label == label)
    }

    pub fn rows_of(&self, label: &str) -> impl Iterator<Item = &SeedRow> {
        let label = label.to_string();
        self.rows.iter().filter(move |r| r.label == label)
    }

    pub fn rows_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.into_inner().map_err(|e| crate::error::CliError::Io(e.to_string()))
    }

    pub fn aggregates_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "config",
            "label",
            "runs",
            "u_avg_mean",
            "u_avg_std",
            "static_regret_mean",
            "dynamic_regret_mean",
            "dynamic_regret_std",
            "utility_mean",
            "utility_std",
            "exploitability_mean",
            "classes",
        ])?;
        for g in &self.aggregates {
            let classes: Vec<String> = g.classes.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            w.write_record([
                g.config.to_string(),
                g.label.clone(),
                g.runs.to_string(),
                g.u_avg.mean.to_string(),
                g.u_avg.std.to_string(),
                g.static_regret.mean.to_string(),
                g.dynamic_regret.mean.to_string(),
                g.dynamic_regret.std.to_string(),
                g.utility.mean.to_string(),
                g.utility.std.to_string(),
                g.exploitability.map_or(String::new(), |s| s.mean.to_string()),
                classes.join(" "),
            ])?;
        }
        w.into_inner().map_err(|e| crate::error::CliError::Io(e.to_string()))
    }

    /// Header block and per-config aggregate table in markdown.
    pub fn markdown(&self) -> String {
        let mut s = header_markdown(&self.header);
        s.push_str("| config | runs | u_avg | D-Reg | utility | exploitability | classes |\n");
        s.push_str("|---|---|---|---|---|---|---|\n");
        for g in &self.aggregates {
            let classes: Vec<String> = g.classes.iter().map(|(k, v)| format!("{k}: {v}")).collect();
            let _ = writeln!(
                s,
                "| {} | {} | {:.5} ± {:.5} | {:.2} ± {:.2} | {:.5} ± {:.5} | {} | {} |",
                g.label,
                g.runs,
                g.u_avg.mean,
                g.u_avg.std,
                g.dynamic_regret.mean,
                g.dynamic_regret.std,
                g.utility.mean,
                g.utility.std,
                g.exploitability.map_or("-".into(), |e| format!("{:.4} ± {:.4}", e.mean, e.std)),
                classes.join(", ")
            );
        }
        let _ = writeln!(s, "\nself-audit: {}", if self.audit_ok { "ok" } else { "FAILED" });
        s
    }
}

pub fn header_markdown(h: &ReportHeader) -> String {
    let mut s = format!("# {}\n\n", h.command);
    let _ = writeln!(s, "- game: {}", h.game);
    let _ = writeln!(s, "- horizon: {}", h.horizon);
    let _ = writeln!(s, "- convergence: {} ({})", h.convergence_threshold, h.convergence_rule);
    for n in &h.notes {
        let _ = writeln!(s, "- {n}");
    }
    s.push('\n');
    s
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), bytes)?;
    Ok(())
}
