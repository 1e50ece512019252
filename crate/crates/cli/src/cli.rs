use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use eqshare_core::analysis::{EquilibriumConcept, ExploitMethod, ExploiterParams};
use eqshare_core::game::{MixedStrategy, SymmetricGame};

use crate::analyze::{analyze, parse_numbers, parse_strategy, AnalyzeRequest, Candidate, MinimaxWhich};
use crate::config::{ExperimentConfig, GameRef};
use crate::error::{CliError, CliResult};
use crate::report::write_file;
use crate::reproduce::{
    reproduce_lowerbound, reproduce_scaling, reproduce_table, scaling_games, write_lowerbound, write_scaling,
    write_table, TableSetup,
};
use crate::simulate::simulate;
use crate::verify::verify;

/// Equal-share experiments on symmetric zero-sum games.
#[derive(Debug, Parser)]
#[command(name = "eqshare", version)]
pub struct Cli {
    /// Base seed (simulate: replaces the config's seeds with this one).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "EQS_THREADS")]
    pub threads: Option<usize>,
    /// Experiment config (JSON) for simulate.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Built-in name (majority3, minority3, sdg, extended_majority) or file:<path>.
    #[arg(long)]
    pub game: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub actions: Option<usize>,
}

impl GameArgs {
    pub fn load(&self) -> CliResult<SymmetricGame> {
        GameRef::from_arg(&self.game, self.n, self.actions).load(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Mv,
    Sdg,
    Lowerbound,
    Scaling,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check zero-sum, boundedness and symmetry of a game.
    Verify(GameArgs),
    /// Run the experiment in --config over its seeds.
    Simulate,
    /// Regenerate a result table.
    Reproduce {
        table: Table,
        /// Runs (mv, sdg) or seeds per case (lowerbound, scaling).
        #[arg(long)]
        runs: Option<usize>,
        /// Horizon of the mv and sdg runs.
        #[arg(long)]
        t: Option<usize>,
        /// Monte Carlo games per evaluated strategy (mv, sdg).
        #[arg(long)]
        mc_games: Option<usize>,
    },
    /// Game-theoretic quantities of a game.
    Analyze {
        #[command(subcommand)]
        quantity: Quantity,
    },
}

#[derive(Debug, Subcommand)]
pub enum Quantity {
    Minimax {
        #[command(flatten)]
        game: GameArgs,
        /// maxmin-identical, minmax-identical, maxmin-independent or minmax-independent.
        #[arg(long)]
        which: String,
        #[arg(long)]
        resolution: Option<usize>,
    },
    Equilibrium {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_parser = ["NE", "CE", "CCE"])]
        concept: String,
        /// Pure profile, one action per player: 0,0,0.
        #[arg(long, group = "candidate")]
        profile: Option<String>,
        /// Mixed strategy every player plays: 0.5,0.5.
        #[arg(long, group = "candidate")]
        symmetric: Option<String>,
        /// Uniform over joint actions: "0,0,0;1,1,1".
        #[arg(long, group = "candidate")]
        uniform_over: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    Exploitability {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        x: String,
        #[arg(long, value_parser = ["grid", "exploiter"])]
        method: Option<String>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 2000)]
        rounds: usize,
    },
    Pooling {
        #[command(flatten)]
        game: GameArgs,
        /// JSON array of strategies.
        #[arg(long)]
        population: PathBuf,
        #[arg(long)]
        z: String,
    },
}

const DEFAULT_OUT: &str = "eqshare-out";

fn out_dir(cli: &Cli, sub: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT).join(sub))
}

/// Runs a parsed command line, printing results to stdout.
pub fn run(cli: &Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match &cli.command {
        Command::Verify(args) => {
            let game = args.load()?;
            let report = verify(&game)?;
            print!("{}", report.summary());
            if let Some(dir) = &cli.out {
                write_file(dir, "verify.json", serde_json::to_string_pretty(&report)?.as_bytes())?;
            }
            match report.failure() {
                None => Ok(()),
                Some(f) => Err(CliError::Invariant(f)),
            }
        }
        Command::Simulate => {
            let path = cli.config.as_ref().ok_or_else(|| CliError::config("simulate needs --config <file>"))?;
            let mut config = ExperimentConfig::from_path(path)?;
            if let Some(seed) = cli.seed {
                config.seeds = crate::config::Seeds::List(vec![seed]);
            }
            let exp = config.validate(path.parent())?;
            let dir = cli.out.clone().or_else(|| config.output.clone()).unwrap_or_else(|| out_dir(cli, "simulate"));
            let report = simulate(&exp, Some(&dir))?;
            print!("{}", report.markdown());
            println!("wrote {}", dir.display());
            Ok(())
        }
        Command::Reproduce { table, runs, t, mc_games } => {
            let base = cli.seed.unwrap_or(0);
            match table {
                Table::Mv | Table::Sdg => {
                    let mut setup = if *table == Table::Mv { TableSetup::mv() } else { TableSetup::sdg() };
                    setup.base_seed = base;
                    if let Some(r) = runs {
                        setup.runs = *r;
                    }
                    if let Some(t) = t {
                        setup.horizon = *t;
                    }
                    if let Some(m) = mc_games {
                        setup.mc_games = *m;
                    }
                    if setup.runs == 0 || setup.horizon == 0 || setup.mc_games == 0 {
                        return Err(CliError::config("--runs, --t and --mc-games must be at least 1"));
                    }
                    let report = reproduce_table(&setup)?;
                    let dir = out_dir(cli, &setup.name);
                    write_table(&dir, &setup, &report)?;
                    print!("{}", report.markdown(&setup));
                    println!("wrote {}", dir.display());
                    audit(report.run.audit_ok)
                }
                Table::Lowerbound => {
                    let seeds = seed_range(base, runs.unwrap_or(50))?;
                    let report = reproduce_lowerbound(&seeds)?;
                    let dir = out_dir(cli, "lowerbound");
                    write_lowerbound(&dir, &report)?;
                    print!("{}", std::fs::read_to_string(dir.join("summary.md"))?);
                    println!("wrote {}", dir.display());
                    audit(report.run.audit_ok)
                }
                Table::Scaling => {
                    let seeds = seed_range(base, runs.unwrap_or(20))?;
                    let report = reproduce_scaling(&scaling_games()?, &seeds)?;
                    let dir = out_dir(cli, "scaling");
                    write_scaling(&dir, &report)?;
                    print!("{}", std::fs::read_to_string(dir.join("summary.md"))?);
                    println!("wrote {}", dir.display());
                    audit(report.run.audit_ok)
                }
            }
        }
        Command::Analyze { quantity } => {
            let (game, request) = analyze_request(quantity, cli.seed.unwrap_or(0))?;
            let outcome = analyze(&game, &request)?;
            println!("{}", outcome.summary);
            let json = serde_json::to_string_pretty(&outcome.report)?;
            println!("{json}");
            if let Some(dir) = &cli.out {
                write_file(dir, "analysis.json", json.as_bytes())?;
            }
            match outcome.violation {
                None => Ok(()),
                Some(v) => Err(CliError::Invariant(v)),
            }
        }
    }
}

fn audit(ok: bool) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Invariant("aggregates do not match their per-seed rows".into()))
    }
}

fn seed_range(base: u64, count: usize) -> CliResult<Vec<u64>> {
    if count == 0 {
        return Err(CliError::config("--runs must be at least 1"));
    }
    Ok((0..count as u64).map(|i| base + i).collect())
}

fn read_population(path: &Path) -> CliResult<Vec<MixedStrategy>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("parsing {}: {e}", path.display())))
}

fn analyze_request(q: &Quantity, seed: u64) -> CliResult<(SymmetricGame, AnalyzeRequest)> {
    Ok(match q {
        Quantity::Minimax { game, which, resolution } => {
            (game.load()?, AnalyzeRequest::Minimax { which: MinimaxWhich::parse(which)?, resolution: *resolution })
        }
        Quantity::Equilibrium { game, concept, profile, symmetric, uniform_over, tol } => {
            let candidate = match (profile, symmetric, uniform_over) {
                (Some(p), None, None) => Candidate::Profile(parse_numbers(p, "--profile")?),
                (None, Some(x), None) => Candidate::Symmetric(parse_strategy(x, "--symmetric")?),
                (None, None, Some(u)) => Candidate::UniformOver(
                    u.split(';').map(|j| parse_numbers(j, "--uniform-over")).collect::<CliResult<_>>()?,
                ),
                _ => return Err(CliError::config("give exactly one of --profile, --symmetric, --uniform-over")),
            };
            let concept = match concept.as_str() {
                "NE" => EquilibriumConcept::Ne,
                "CE" => EquilibriumConcept::Ce,
                _ => EquilibriumConcept::Cce,
            };
            (game.load()?, AnalyzeRequest::Equilibrium { candidate, concept, tol: *tol })
        }
        Quantity::Exploitability { game, x, method, runs, rounds } => {
            let method = method.as_deref().map(|m| if m == "grid" { ExploitMethod::Grid } else { ExploitMethod::Exploiter });
            let params = ExploiterParams { runs: *runs, rounds: *rounds, seed, ..ExploiterParams::default() };
            (game.load()?, AnalyzeRequest::Exploitability { x: parse_strategy(x, "--x")?, method, params })
        }
        Quantity::Pooling { game, population, z } => (
            game.load()?,
            AnalyzeRequest::Pooling { population: read_population(population)?, z: parse_strategy(z, "--z")? },
        ),
    })
}
