use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{composition_count, Compositions, MixedStrategy, SymmetricGame};

/// Largest number of grid points any scan will visit.
pub const GRID_POINT_CAP: u128 = 5_000_000;
/// Resolution multiplier of the single local refinement pass.
pub const REFINE_FACTOR: usize = 10;

/// All strategies `c / m` with `c` a composition of `m` into `A` parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexGrid {
    actions: usize,
    resolution: usize,
}

impl SimplexGrid {
    pub fn new(actions: usize, resolution: usize) -> Result<Self> {
        if actions == 0 || resolution == 0 {
            return Err(Error::param("a simplex grid needs at least one action and resolution >= 1"));
        }
        Ok(SimplexGrid { actions, resolution })
    }

    /// Default resolution: 200 for two actions, 60 for three, coarser beyond.
    pub fn default_for(actions: usize) -> Result<Self> {
        let m = match actions {
            0..=2 => 200,
            3 => 60,
            4 => 20,
            5 => 10,
            _ => 4,
        };
        Self::new(actions, m)
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> u128 {
        composition_count(self.resolution, self.actions)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Errors with a size-cap error if the grid has more than `cap` points.
    pub fn ensure_within(&self, cap: u128) -> Result<()> {
        let needed = self.len();
        if needed > cap {
            return Err(Error::SizeCap {
                what: format!("simplex grid with A={} m={}", self.actions, self.resolution),
                needed,
                cap,
            });
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = MixedStrategy> + '_ {
        let m = self.resolution as f64;
        Compositions::new(self.resolution as u32, self.actions).map(move |c| to_strategy(&c, m))
    }

    pub fn collect(&self) -> Result<Vec<MixedStrategy>> {
        self.ensure_within(GRID_POINT_CAP)?;
        Ok(self.points().collect())
    }

    /// Points of the grid refined `factor` times that lie within one coarse step
    /// of `center` in every coordinate. Empty when the neighborhood would be too large.
    pub fn neighborhood(&self, center: &MixedStrategy, factor: usize) -> Vec<MixedStrategy> {
        let fine = self.resolution * factor;
        let k = self.actions;
        let span = 2 * factor + 1;
        if k < 2 || (span as f64).powi(k as i32 - 1) > 2e5 {
            return Vec::new();
        }
        let base: Vec<i64> = center.probs().iter().map(|p| (p * fine as f64).round() as i64).collect();
        let mut out = Vec::new();
        let mut offset = vec![-(factor as i64); k - 1];
        loop {
            let mut c = Vec::with_capacity(k);
            let mut used = 0i64;
            let mut ok = true;
            for (i, o) in offset.iter().enumerate() {
                let v = base[i] + o;
                if v < 0 || v > fine as i64 {
                    ok = false;
                    break;
                }
                used += v;
                c.push(v as u32);
            }
            let last = fine as i64 - used;
            if ok && last >= 0 {
                c.push(last as u32);
                out.push(to_strategy(&c, fine as f64));
            }
            // Odometer over the offsets.
            let mut i = 0;
            loop {
                if i == k - 1 {
                    return out;
                }
                offset[i] += 1;
                if offset[i] <= factor as i64 {
                    break;
                }
                offset[i] = -(factor as i64);
                i += 1;
            }
        }
    }
}

fn to_strategy(c: &[u32], m: f64) -> MixedStrategy {
    MixedStrategy::from_weights(c.iter().map(|&v| v as f64 / m).collect()).expect("grid point")
}

/// Bound on the value error from gridding the opponents' strategy:
/// `2 B L / m` with Lipschitz constant `L = 2(n-1)` in total variation.
pub fn grid_gap(game: &SymmetricGame, resolution: usize) -> f64 {
    2.0 * game.scale() * 2.0 * (game.players() - 1) as f64 / resolution as f64
}

/// Index and value of the smallest (or largest) entry; ties go to the earliest index.
pub(crate) fn arg_extreme(values: &[f64], minimize: bool) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if (minimize && v < best.1) || (!minimize && v > best.1) {
            best = (i, v);
        }
    }
    best
}

/// Evaluates `f` on every point in parallel, keeping input order.
pub(crate) fn evaluate<T: Sync, F>(points: &[T], f: F) -> Result<Vec<f64>>
where
    F: Fn(&T) -> Result<f64> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_validity() {
        let g = SimplexGrid::new(3, 60).unwrap();
        let pts: Vec<_> = g.points().collect();
        assert_eq!(pts.len() as u128, g.len());
        assert_eq!(g.len(), 1891);
        assert!(pts.iter().all(|p| (p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn neighborhood_stays_on_simplex() {
        let g = SimplexGrid::new(3, 10).unwrap();
        let center = MixedStrategy::new(vec![0.0, 0.5, 0.5]).unwrap();
        let n = g.neighborhood(&center, 10);
        assert!(!n.is_empty());
        assert!(n.iter().all(|p| p.probs()[0] <= 0.1 + 1e-12));
        assert!(n.contains(&center));
        let two = SimplexGrid::new(2, 200).unwrap().neighborhood(&MixedStrategy::uniform(2), 10);
        assert_eq!(two.len(), 21);
    }

    #[test]
    fn size_cap() {
        let g = SimplexGrid::new(10, 200).unwrap();
        assert!(g.collect().unwrap_err().is_size_cap());
    }
}
