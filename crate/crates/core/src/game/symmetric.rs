use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::builtin::{self, BuiltinGame};
use crate::game::counts::{composition_count, ln_factorials, Compositions};
use crate::game::{ActionId, CountVector, MixedStrategy};

/// Default cap on the number of count vectors an enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 5_000_000;

/// Relative tolerance (times the payoff bound) for payoff identities.
pub const PAYOFF_TOL: f64 = 1e-9;

#[derive(Clone)]
enum PayoffRule {
    Builtin(BuiltinGame),
    Table(HashMap<(usize, Vec<u32>), f64>),
}

/// An n-player symmetric zero-sum game in opponent-count form.
///
/// `payoff(a, c)` is the payoff of a player using `a` while the other n-1
/// players' actions have per-action counts `c`. Every player's payoff is
/// obtained this way, which is what makes the game symmetric.
#[derive(Clone)]
pub struct SymmetricGame {
    name: String,
    players: usize,
    actions: usize,
    rule: PayoffRule,
    scale: f64,
    ln_fact: Vec<f64>,
}

impl fmt::Debug for SymmetricGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricGame")
            .field("name", &self.name)
            .field("players", &self.players)
            .field("actions", &self.actions)
            .field("scale", &self.scale)
            .finish()
    }
}

impl SymmetricGame {
    pub fn builtin(kind: BuiltinGame) -> Result<Self> {
        let (name, players, actions, scale) = match kind {
            BuiltinGame::Majority3 => ("majority3".to_string(), 3, 2, 1.0),
            BuiltinGame::Minority3 => ("minority3".to_string(), 3, 2, 1.0),
            BuiltinGame::SwitchDominance { n } => {
                if n < 2 {
                    return Err(Error::param(format!("sdg needs n >= 2, got {n}")));
                }
                // Worst case is the middle action alone against n-1 top players.
                (format!("sdg({n})"), n, 3, (n - 1) as f64)
            }
            BuiltinGame::ExtendedMajority { n, actions } => {
                if n < 3 || actions < 2 {
                    return Err(Error::param(format!(
                        "extended_majority needs n >= 3 and A >= 2, got n={n}, A={actions}"
                    )));
                }
                (format!("extended_majority({n},{actions})"), n, actions, 1.0)
            }
        };
        Ok(SymmetricGame {
            name,
            players,
            actions,
            rule: PayoffRule::Builtin(kind),
            scale,
            ln_fact: ln_factorials(players),
        })
    }

    /// A game given by an explicit table keyed by (own action, opponent counts).
    ///
    /// Every (action, count vector with total n-1) pair must be present. The
    /// payoff bound is the largest absolute table entry.
    pub fn from_table(
        name: impl Into<String>,
        players: usize,
        actions: usize,
        entries: HashMap<(usize, Vec<u32>), f64>,
    ) -> Result<Self> {
        if players < 2 || actions < 2 {
            return Err(Error::param(format!("need n >= 2 and A >= 2, got n={players}, A={actions}")));
        }
        let needed = composition_count(players - 1, actions) * actions as u128;
        if needed > DEFAULT_ENUMERATION_CAP {
            return Err(Error::SizeCap { what: "payoff table".into(), needed, cap: DEFAULT_ENUMERATION_CAP });
        }
        let mut scale: f64 = 0.0;
        for c in Compositions::new(players as u32 - 1, actions) {
            for a in 0..actions {
                let key = (a, c.clone());
                match entries.get(&key) {
                    Some(v) if v.is_finite() => scale = scale.max(v.abs()),
                    Some(v) => return Err(Error::param(format!("payoff {a}|{c:?} is {v}"))),
                    None => return Err(Error::param(format!("payoff table is missing {a}|{c:?}"))),
                }
            }
        }
        for (a, c) in entries.keys() {
            if *a >= actions || c.len() != actions || c.iter().sum::<u32>() as usize != players - 1 {
                return Err(Error::param(format!("payoff table has a stray key {a}|{c:?}")));
            }
        }
        Ok(SymmetricGame {
            name: name.into(),
            players,
            actions,
            rule: PayoffRule::Table(entries),
            scale: if scale > 0.0 { scale } else { 1.0 },
            ln_fact: ln_factorials(players),
        })
    }

    /// Materializes the payoff function as a table.
    pub fn tabulate(&self) -> Result<HashMap<(usize, Vec<u32>), f64>> {
        let needed = self.opponent_profile_count() * self.actions as u128;
        if needed > DEFAULT_ENUMERATION_CAP {
            return Err(Error::SizeCap { what: "payoff table".into(), needed, cap: DEFAULT_ENUMERATION_CAP });
        }
        let mut table = HashMap::new();
        for c in Compositions::new(self.players as u32 - 1, self.actions) {
            for a in 0..self.actions {
                table.insert((a, c.clone()), self.payoff_raw(a, &c));
            }
        }
        Ok(table)
    }

    /// The same game with action `a` renamed to `perm[a]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.actions {
            return Err(Error::Dimension { expected: self.actions, got: perm.len() });
        }
        let mut seen = vec![false; self.actions];
        for &p in perm {
            if p >= self.actions || std::mem::replace(&mut seen[p], true) {
                return Err(Error::param(format!("{perm:?} is not a permutation")));
            }
        }
        let table = self
            .tabulate()?
            .into_iter()
            .map(|((a, c), v)| {
                let mut moved = vec![0; self.actions];
                for (b, &cb) in c.iter().enumerate() {
                    moved[perm[b]] = cb;
                }
                ((perm[a], moved), v)
            })
            .collect();
        let mut game = Self::from_table(format!("{}∘σ", self.name), self.players, self.actions, table)?;
        game.scale = self.scale;
        Ok(game)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    /// Bound B with |payoff| <= B everywhere.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn builtin_kind(&self) -> Option<BuiltinGame> {
        match self.rule {
            PayoffRule::Builtin(kind) => Some(kind),
            PayoffRule::Table(_) => None,
        }
    }

    /// Number of opponent count vectors, C(n-2+A, A-1).
    pub fn opponent_profile_count(&self) -> u128 {
        composition_count(self.players - 1, self.actions)
    }

    /// Payoff for own action `a` against opponent counts `others`, unchecked.
    pub fn payoff_raw(&self, a: usize, others: &[u32]) -> f64 {
        match &self.rule {
            PayoffRule::Builtin(BuiltinGame::Majority3) => builtin::majority3(a, others),
            PayoffRule::Builtin(BuiltinGame::Minority3) => builtin::minority3(a, others),
            PayoffRule::Builtin(BuiltinGame::SwitchDominance { n }) => builtin::switch_dominance(*n, a, others),
            PayoffRule::Builtin(BuiltinGame::ExtendedMajority { n, .. }) => {
                builtin::extended_majority(*n, a, others)
            }
            PayoffRule::Table(t) => t[&(a, others.to_vec())],
        }
    }

    /// Payoff at a pure profile: own action `a`, opponents summarized by `others`.
    pub fn profile_payoff(&self, a: ActionId, others: &CountVector) -> Result<f64> {
        self.check_action(a)?;
        if others.len() != self.actions {
            return Err(Error::Dimension { expected: self.actions, got: others.len() });
        }
        if others.total() as usize != self.players - 1 {
            return Err(Error::param(format!(
                "opponent counts total {} but the game has {} opponents",
                others.total(),
                self.players - 1
            )));
        }
        Ok(self.payoff_raw(a.0, others.counts()))
    }

    /// Gains `a -> payoff(a, others) / B` for every action, used as learner feedback.
    pub fn normalized_gains(&self, others: &[u32]) -> Vec<f64> {
        (0..self.actions).map(|a| self.payoff_raw(a, others) / self.scale).collect()
    }

    /// Exact `U_1(a, y^{⊗ n-1})` by summing over all opponent count vectors
    /// with multinomial weights.
    pub fn expected_payoff_iid(&self, a: ActionId, y: &MixedStrategy) -> Result<f64> {
        self.check_action(a)?;
        y.ensure_len(self.actions)?;
        let mut total = 0.0;
        self.for_each_weighted_profile(y, |c, w| total += w * self.payoff_raw(a.0, c));
        Ok(total)
    }

    /// `a -> U_1(a, y^{⊗ n-1})` for every action.
    pub fn payoff_vector(&self, y: &MixedStrategy) -> Result<Vec<f64>> {
        y.ensure_len(self.actions)?;
        let mut out = vec![0.0; self.actions];
        self.for_each_weighted_profile(y, |c, w| {
            for (a, slot) in out.iter_mut().enumerate() {
                *slot += w * self.payoff_raw(a, c);
            }
        });
        Ok(out)
    }

    /// `U_1(x1, y^{⊗ n-1})`.
    pub fn expected_payoff_mixed(&self, x1: &MixedStrategy, y: &MixedStrategy) -> Result<f64> {
        x1.ensure_len(self.actions)?;
        Ok(x1.dot(&self.payoff_vector(y)?))
    }

    /// Payoff vector against independent, possibly different opponent strategies.
    pub fn payoff_vector_independent(&self, opponents: &[MixedStrategy]) -> Result<Vec<f64>> {
        if opponents.len() != self.players - 1 {
            return Err(Error::Dimension { expected: self.players - 1, got: opponents.len() });
        }
        for y in opponents {
            y.ensure_len(self.actions)?;
        }
        let mut out = vec![0.0; self.actions];
        for (c, w) in opponent_count_distribution(self.actions, opponents) {
            for (a, slot) in out.iter_mut().enumerate() {
                *slot += w * self.payoff_raw(a, &c);
            }
        }
        Ok(out)
    }

    fn check_action(&self, a: ActionId) -> Result<()> {
        if a.0 >= self.actions {
            return Err(Error::Dimension { expected: self.actions, got: a.0 + 1 });
        }
        Ok(())
    }

    /// Visits every opponent count vector with its Multinomial(n-1, y) weight.
    /// Weights are formed in log space; vectors that put mass on a zero-probability
    /// action are skipped.
    fn for_each_weighted_profile(&self, y: &MixedStrategy, mut visit: impl FnMut(&[u32], f64)) {
        let m = self.players - 1;
        let ln_y: Vec<f64> = y.probs().iter().map(|p| p.ln()).collect();
        let support: Vec<bool> = y.probs().iter().map(|p| *p > 0.0).collect();
        for c in Compositions::new(m as u32, self.actions) {
            let mut ln_w = self.ln_fact[m];
            let mut possible = true;
            for (i, &ci) in c.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                if !support[i] {
                    possible = false;
                    break;
                }
                ln_w += ci as f64 * ln_y[i] - self.ln_fact[ci as usize];
            }
            if possible {
                visit(&c, ln_w.exp());
            }
        }
    }
}

/// Distribution of opponent count vectors when opponent i plays `opponents[i]` independently.
pub fn opponent_count_distribution(actions: usize, opponents: &[MixedStrategy]) -> Vec<(Vec<u32>, f64)> {
    let mut dist: HashMap<Vec<u32>, f64> = HashMap::new();
    dist.insert(vec![0; actions], 1.0);
    for y in opponents {
        let mut next: HashMap<Vec<u32>, f64> = HashMap::with_capacity(dist.len() * actions);
        for (c, w) in &dist {
            for (b, &p) in y.probs().iter().enumerate() {
                if p > 0.0 {
                    let mut c2 = c.clone();
                    c2[b] += 1;
                    *next.entry(c2).or_insert(0.0) += w * p;
                }
            }
        }
        dist = next;
    }
    let mut out: Vec<_> = dist.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Outcome of the zero-sum and boundedness checks over all full profiles.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub game: String,
    pub profiles_checked: u128,
    pub passed: bool,
    /// Largest |Σ_a c[a] payoff(a, c - e_a)| over full profiles.
    pub worst_violation: f64,
    /// Sorted action tuple of the worst profile, when it exceeds the tolerance.
    pub violating_profile: Option<Vec<usize>>,
    /// Largest |payoff| seen, to compare with the declared bound.
    pub max_abs_payoff: f64,
    pub scale: f64,
    pub tolerance: f64,
}

impl ValidationReport {
    /// First failure as a one-line message.
    pub fn failure_message(&self) -> Option<String> {
        if self.passed {
            return None;
        }
        if let Some(profile) = &self.violating_profile {
            let tuple: Vec<String> = profile.iter().map(|a| a.to_string()).collect();
            return Some(format!(
                "zero-sum identity violated by {:.3e} at profile ({})",
                self.worst_violation,
                tuple.join(",")
            ));
        }
        Some(format!("payoff magnitude {} exceeds the declared bound {}", self.max_abs_payoff, self.scale))
    }
}

/// Checks `Σ_a c[a] payoff(a, c - e_a) = 0` on every full profile (total n)
/// and that no payoff exceeds the declared bound.
pub fn validate(game: &SymmetricGame, cap: u128) -> Result<ValidationReport> {
    let full_profiles = composition_count(game.players(), game.actions());
    if full_profiles > cap {
        return Err(Error::SizeCap { what: format!("validating {}", game.name()), needed: full_profiles, cap });
    }
    let tolerance = PAYOFF_TOL * game.scale();
    let mut worst = 0.0f64;
    let mut worst_profile: Option<Vec<u32>> = None;
    let mut max_abs: f64 = 0.0;
    let mut others = vec![0u32; game.actions()];
    for c in Compositions::new(game.players() as u32, game.actions()) {
        let mut sum = 0.0;
        for (a, &ca) in c.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            others.copy_from_slice(&c);
            others[a] -= 1;
            let v = game.payoff_raw(a, &others);
            max_abs = max_abs.max(v.abs());
            sum += ca as f64 * v;
        }
        if sum.abs() > worst {
            worst = sum.abs();
            worst_profile = Some(c);
        }
    }
    let zero_sum = worst <= tolerance;
    let bounded = max_abs <= game.scale() * (1.0 + PAYOFF_TOL);
    Ok(ValidationReport {
        game: game.name().to_string(),
        profiles_checked: full_profiles,
        passed: zero_sum && bounded,
        worst_violation: worst,
        violating_profile: if zero_sum {
            None
        } else {
            worst_profile.map(|c| CountVector::new(c).to_sorted_actions())
        },
        max_abs_payoff: max_abs,
        scale: game.scale(),
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mv() -> SymmetricGame {
        SymmetricGame::builtin(BuiltinGame::Majority3).unwrap()
    }

    #[test]
    fn majority_expected_payoffs() {
        let y = MixedStrategy::new(vec![0.49, 0.51]).unwrap();
        // Opponent outcomes by hand: P(both 0)=0.2401, P(split)=0.4998, P(both 1)=0.2601.
        let oracle_1 = -0.2401 + 0.5 * 0.4998 + 0.0 * 0.2601;
        let oracle_0 = 0.0 * 0.2401 + 0.5 * 0.4998 - 1.0 * 0.2601;
        assert_abs_diff_eq!(oracle_1, 0.0098, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle_0, -0.0102, epsilon = 1e-12);
        let g = mv();
        assert_abs_diff_eq!(g.expected_payoff_iid(ActionId(1), &y).unwrap(), oracle_1, epsilon = 1e-12);
        assert_abs_diff_eq!(g.expected_payoff_iid(ActionId(0), &y).unwrap(), oracle_0, epsilon = 1e-12);
        let v = g.payoff_vector(&y).unwrap();
        assert_abs_diff_eq!(v[0], -0.0102, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 0.0098, epsilon = 1e-12);
        let x1 = MixedStrategy::pure(2, ActionId(1));
        assert_abs_diff_eq!(g.expected_payoff_mixed(&x1, &y).unwrap(), 0.0098, epsilon = 1e-12);
    }

    #[test]
    fn point_mass_payoffs() {
        let g = mv();
        assert_eq!(g.expected_payoff_iid(ActionId(0), &MixedStrategy::pure(2, ActionId(0))).unwrap(), 0.0);
        assert_eq!(g.payoff_vector(&MixedStrategy::pure(2, ActionId(0))).unwrap(), vec![0.0, -1.0]);
        let minority = SymmetricGame::builtin(BuiltinGame::Minority3).unwrap();
        let v = minority
            .expected_payoff_mixed(&MixedStrategy::pure(2, ActionId(0)), &MixedStrategy::pure(2, ActionId(1)))
            .unwrap();
        assert_eq!(v, 1.0);
        let u = minority.payoff_vector(&MixedStrategy::uniform(2)).unwrap();
        assert_abs_diff_eq!(u[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dimension_errors() {
        let g = mv();
        let y3 = MixedStrategy::uniform(3);
        assert!(matches!(g.payoff_vector(&y3), Err(Error::Dimension { .. })));
        assert!(g.expected_payoff_iid(ActionId(2), &MixedStrategy::uniform(2)).is_err());
        assert!(g.profile_payoff(ActionId(0), &CountVector::new(vec![1, 2])).is_err());
    }

    #[test]
    fn profile_payoffs() {
        let g = mv();
        assert_eq!(g.profile_payoff(ActionId(0), &CountVector::new(vec![0, 2])).unwrap(), -1.0);
        let sdg = SymmetricGame::builtin(BuiltinGame::SwitchDominance { n: 30 }).unwrap();
        assert_eq!(sdg.profile_payoff(ActionId(1), &CountVector::new(vec![0, 0, 29])).unwrap(), -29.0);
        assert_eq!(sdg.profile_payoff(ActionId(1), &CountVector::new(vec![12, 17, 0])).unwrap(), 1.0);
        let r = sdg.profile_payoff(ActionId(0), &CountVector::new(vec![6, 23, 0])).unwrap();
        assert_abs_diff_eq!(r, -23.0 / 7.0, epsilon = 1e-12);
    }

    #[test]
    fn sdg_expected_payoffs_against_meta() {
        let sdg = SymmetricGame::builtin(BuiltinGame::SwitchDominance { n: 30 }).unwrap();
        assert_eq!(sdg.opponent_profile_count(), 465);
        let y = MixedStrategy::new(vec![0.399, 0.6, 0.001]).unwrap();
        let v = sdg.payoff_vector(&y).unwrap();
        // Frozen from an independent lgamma-based enumeration of the 465 terms.
        assert_abs_diff_eq!(v[0], -1.4719572925627344, epsilon = 1e-9);
        assert_abs_diff_eq!(v[1], 0.9999673643647335, epsilon = 1e-9);
        assert_abs_diff_eq!(v[2], -12.669458886309034, epsilon = 1e-9);
    }

    #[test]
    fn sdg_scale_matches_enumeration() {
        for n in 2..=12 {
            let g = SymmetricGame::builtin(BuiltinGame::SwitchDominance { n }).unwrap();
            let max = g.tabulate().unwrap().values().fold(0.0f64, |m, v| m.max(v.abs()));
            assert_eq!(max, g.scale(), "n = {n}");
        }
    }

    #[test]
    fn validation_of_builtins() {
        for kind in [
            BuiltinGame::Majority3,
            BuiltinGame::Minority3,
            BuiltinGame::SwitchDominance { n: 30 },
            BuiltinGame::ExtendedMajority { n: 5, actions: 4 },
        ] {
            let g = SymmetricGame::builtin(kind).unwrap();
            let report = validate(&g, DEFAULT_ENUMERATION_CAP).unwrap();
            assert!(report.passed, "{report:?}");
        }
        let g = mv();
        assert_eq!(validate(&g, DEFAULT_ENUMERATION_CAP).unwrap().worst_violation, 0.0);
    }

    #[test]
    fn validation_flags_tampered_table() {
        let mut table = mv().tabulate().unwrap();
        table.insert((0, vec![0, 2]), -0.9);
        let g = SymmetricGame::from_table("broken", 3, 2, table).unwrap();
        let report = validate(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(!report.passed);
        assert_abs_diff_eq!(report.worst_violation, 0.1, epsilon = 1e-12);
        assert_eq!(report.violating_profile, Some(vec![0, 1, 1]));
        assert!(report.failure_message().unwrap().contains("(0,1,1)"));
    }

    #[test]
    fn validation_refuses_above_cap() {
        let g = SymmetricGame::builtin(BuiltinGame::SwitchDominance { n: 30 }).unwrap();
        assert!(validate(&g, 10).unwrap_err().is_size_cap());
    }

    #[test]
    fn extended_majority_reduces_to_majority3() {
        let ext = SymmetricGame::builtin(BuiltinGame::ExtendedMajority { n: 3, actions: 2 }).unwrap();
        assert_eq!(ext.tabulate().unwrap(), mv().tabulate().unwrap());
    }

    #[test]
    fn table_requires_every_entry() {
        let mut table = mv().tabulate().unwrap();
        table.remove(&(1, vec![1, 1]));
        assert!(SymmetricGame::from_table("partial", 3, 2, table).is_err());
    }

    #[test]
    fn independent_opponents_match_iid_when_equal() {
        let g = SymmetricGame::builtin(BuiltinGame::SwitchDominance { n: 6 }).unwrap();
        let y = MixedStrategy::new(vec![0.2, 0.5, 0.3]).unwrap();
        let a = g.payoff_vector(&y).unwrap();
        let b = g.payoff_vector_independent(&vec![y.clone(); 5]).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-12);
        }
    }
}
