use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BuiltinGame, SymmetricGame};

/// A game as written in a config or game file.
///
/// ```json
/// {"name": "majority3"}
/// {"name": "sdg", "n": 30}
/// {"name": "extended_majority", "n": 5, "actions": 3}
/// {"custom": {"n": 3, "actions": 2, "payoff_table": {"0|2,0": 0.0, "...": 0.5}}}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameSpec {
    Custom { custom: CustomGame },
    Named {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        actions: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomGame {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    pub actions: usize,
    /// Keyed by `"a|c0,c1,..."`: own action, then opponent counts.
    pub payoff_table: BTreeMap<String, f64>,
}

impl GameSpec {
    pub fn named(name: &str) -> Self {
        GameSpec::Named { name: name.to_string(), n: None, actions: None }
    }

    pub fn build(&self) -> Result<SymmetricGame> {
        match self {
            GameSpec::Named { name, n, actions } => builtin_game(name, *n, *actions),
            GameSpec::Custom { custom } => custom.build(),
        }
    }

    /// Reads a game file (JSON).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::param(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::param(format!("parsing {}: {e}", path.display())))
    }
}

impl CustomGame {
    pub fn build(&self) -> Result<SymmetricGame> {
        let mut entries = HashMap::with_capacity(self.payoff_table.len());
        for (key, &value) in &self.payoff_table {
            let (a, counts) = parse_key(key)?;
            entries.insert((a, counts), value);
        }
        SymmetricGame::from_table(self.name.clone().unwrap_or_else(|| "custom".into()), self.n, self.actions, entries)
    }

    /// Serializes an existing game into table form.
    pub fn from_game(game: &SymmetricGame) -> Result<Self> {
        let payoff_table = game
            .tabulate()?
            .into_iter()
            .map(|((a, c), v)| {
                let counts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                (format!("{a}|{}", counts.join(",")), v)
            })
            .collect();
        Ok(CustomGame {
            name: Some(game.name().to_string()),
            n: game.players(),
            actions: game.actions(),
            payoff_table,
        })
    }
}

fn parse_key(key: &str) -> Result<(usize, Vec<u32>)> {
    let (a, counts) = key
        .split_once('|')
        .ok_or_else(|| Error::param(format!("payoff key {key:?} is not of the form a|c0,c1,...")))?;
    let a = a.trim().parse::<usize>().map_err(|e| Error::param(format!("payoff key {key:?}: {e}")))?;
    let counts = counts
        .split(',')
        .map(|c| c.trim().parse::<u32>().map_err(|e| Error::param(format!("payoff key {key:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((a, counts))
}

/// Builds a benchmark game by name: `majority3`, `minority3`, `sdg` (needs n),
/// `extended_majority` (needs n and actions).
pub fn builtin_game(name: &str, n: Option<usize>, actions: Option<usize>) -> Result<SymmetricGame> {
    let kind = match name {
        "majority3" | "mv" => BuiltinGame::Majority3,
        "minority3" => BuiltinGame::Minority3,
        "sdg" => BuiltinGame::SwitchDominance { n: n.ok_or_else(|| Error::param("sdg needs n"))? },
        "extended_majority" => BuiltinGame::ExtendedMajority {
            n: n.ok_or_else(|| Error::param("extended_majority needs n"))?,
            actions: actions.ok_or_else(|| Error::param("extended_majority needs actions"))?,
        },
        other => return Err(Error::param(format!("unknown game {other:?}"))),
    };
    SymmetricGame::builtin(kind)
}
