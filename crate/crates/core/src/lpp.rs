//! Passage times, geodesic sets, avoid-vertex passage times and threshold
//! weights.
//!
//! `Fwd(v)` is the best weight-sum over directed paths from the origin to `v`
//! and `Bwd(v)` the best from `v` to the target, both counting `ω_v`. The
//! geodesic set is the union of all maximizing paths, recovered as
//! `{v : Fwd(v) + Bwd(v) - ω_v = T}` up to the configured tie tolerance.

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::lattice::{Grid, Odometer};

/// Relative tie tolerance used for continuous laws.
pub const DEFAULT_RELATIVE_TIE: f64 = 1e-9;

/// How near-equal path sums are treated when building the geodesic set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TieRule {
    /// Only exact equality ties; used for integer weights.
    Exact,
    /// Path sums within `factor · T` of the maximum count as maximal.
    Relative(f64),
}

impl TieRule {
    pub fn for_distribution(dist: &WeightDistribution) -> Self {
        if dist.is_integer_valued() {
            TieRule::Exact
        } else {
            TieRule::Relative(DEFAULT_RELATIVE_TIE)
        }
    }

    pub fn tolerance(&self, time: f64) -> f64 {
        match *self {
            TieRule::Exact => 0.0,
            TieRule::Relative(r) => r * time.abs(),
        }
    }
}

/// A weight field `ω` over the cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration<'g> {
    grid: &'g Grid,
    weights: Vec<f64>,
    ties: TieRule,
}

impl<'g> Configuration<'g> {
    pub fn new(grid: &'g Grid, weights: Vec<f64>, ties: TieRule) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::Estimator(format!(
                "configuration has {} weights for {} vertices",
                weights.len(),
                grid.len()
            )));
        }
        if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Estimator(format!("weight {bad} is not a finite non-negative number")));
        }
        Ok(Self { grid, weights, ties })
    }

    /// Builds without validation; callers guarantee length and sign.
    pub(crate) fn from_parts(grid: &'g Grid, weights: Vec<f64>, ties: TieRule) -> Self {
        debug_assert_eq!(weights.len(), grid.len());
        Self { grid, weights, ties }
    }

    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ties(&self) -> TieRule {
        self.ties
    }

    /// The configuration `σ_v^x ω` with the weight at `v` replaced by `x`.
    pub fn with_weight(&self, v: usize, x: f64) -> Self {
        let mut weights = self.weights.clone();
        weights[v] = x;
        Self { grid: self.grid, weights, ties: self.ties }
    }

    /// Same vertices with every weight squared.
    pub fn squared(&self) -> Self {
        Self { grid: self.grid, weights: self.weights.iter().map(|w| w * w).collect(), ties: self.ties }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassageResult {
    pub time: f64,
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
    /// Membership mask of the geodesic set `π`.
    pub geodesic: Vec<bool>,
    pub tie_tolerance: f64,
}

impl PassageResult {
    pub fn contains(&self, v: usize) -> bool {
        self.geodesic[v]
    }

    pub fn geodesic_vertices(&self) -> Vec<usize> {
        self.geodesic.iter().enumerate().filter(|(_, &on)| on).map(|(v, _)| v).collect()
    }

    /// `|π|`.
    pub fn geodesic_len(&self) -> usize {
        self.geodesic.iter().filter(|&&on| on).count()
    }

    /// `|π ∩ other.π|`.
    pub fn overlap(&self, other: &PassageResult) -> usize {
        self.geodesic.iter().zip(&other.geodesic).filter(|(a, b)| **a && **b).count()
    }

    /// Best weight-sum over paths through `v`, `Fwd(v) + Bwd(v) - ω_v`.
    pub fn through(&self, config: &Configuration<'_>, v: usize) -> f64 {
        self.forward[v] + self.backward[v] - config.weights[v]
    }

    /// `S_v = Fwd(v) + Bwd(v) - 2ω_v`, the best sum of the other weights on a
    /// path through `v`. It does not depend on `ω_v`.
    pub fn others_through(&self, config: &Configuration<'_>, v: usize) -> f64 {
        self.forward[v] + self.backward[v] - 2.0 * config.weights[v]
    }

    /// Avoid-vertex passage times for every vertex at once.
    ///
    /// Each up-right path meets every layer `ℓ = const` exactly once, so the
    /// paths avoiding `v` are those crossing `v`'s layer elsewhere and the
    /// answer is the best `through(u)` over the rest of that layer.
    pub fn avoid_times(&self, config: &Configuration<'_>) -> Vec<Option<f64>> {
        let grid = config.grid;
        let layers = grid.layers();
        let count = grid.path_len();
        let mut best: Vec<Option<(f64, usize)>> = vec![None; count];
        let mut second: Vec<Option<f64>> = vec![None; count];
        for (v, &l) in layers.iter().enumerate() {
            let x = self.through(config, v);
            match best[l] {
                Some((b, _)) if x <= b => {
                    if second[l].is_none_or(|s| x > s) {
                        second[l] = Some(x);
                    }
                }
                prev => {
                    second[l] = prev.map(|(b, _)| b);
                    best[l] = Some((x, v));
                }
            }
        }
        (0..grid.len())
            .map(|v| {
                let l = layers[v];
                match best[l] {
                    Some((_, arg)) if arg == v => second[l],
                    other => other.map(|(b, _)| b),
                }
            })
            .collect()
    }

    /// Threshold weights `k_v` for every vertex.
    pub fn thresholds(&self, config: &Configuration<'_>) -> Vec<f64> {
        self.avoid_times(config)
            .into_iter()
            .enumerate()
            .map(|(v, avoid)| threshold_from(avoid, self.others_through(config, v)))
            .collect()
    }
}

fn threshold_from(avoid: Option<f64>, others: f64) -> f64 {
    avoid.map_or(0.0, |a| (a - others).max(0.0))
}

/// Forward and backward sweeps plus the geodesic set.
pub fn passage_time(config: &Configuration<'_>) -> PassageResult {
    let grid = config.grid;
    let w = &config.weights;
    let forward = forward_sweep(grid, w);
    let backward = backward_sweep(grid, w);
    let time = forward[grid.target()];
    let tie_tolerance = config.ties.tolerance(time);
    let cutoff = time - tie_tolerance;
    let geodesic = (0..grid.len()).map(|v| forward[v] + backward[v] - w[v] >= cutoff).collect();
    PassageResult { time, forward, backward, geodesic, tie_tolerance }
}

/// Only `T`, from a single forward sweep.
pub fn passage_time_value(grid: &Grid, weights: &[f64]) -> f64 {
    forward_sweep(grid, weights)[grid.target()]
}

/// `|π|`.
pub fn geodesic_membership_count(result: &PassageResult) -> usize {
    result.geodesic_len()
}

fn forward_sweep(grid: &Grid, w: &[f64]) -> Vec<f64> {
    let strides = grid.strides();
    let mut fwd = vec![0.0; grid.len()];
    let mut od = Odometer::at_origin(grid);
    fwd[0] = w[0];
    for v in 1..grid.len() {
        od.increment();
        let mut best = f64::NEG_INFINITY;
        for (i, &c) in od.coords.iter().enumerate() {
            if c > 0 {
                best = best.max(fwd[v - strides[i]]);
            }
        }
        fwd[v] = best + w[v];
    }
    fwd
}

fn backward_sweep(grid: &Grid, w: &[f64]) -> Vec<f64> {
    let strides = grid.strides();
    let n = grid.n();
    let last = grid.target();
    let mut bwd = vec![0.0; grid.len()];
    let mut od = Odometer::at_target(grid);
    bwd[last] = w[last];
    for v in (0..last).rev() {
        od.decrement();
        let mut best = f64::NEG_INFINITY;
        for (i, &c) in od.coords.iter().enumerate() {
            if c < n {
                best = best.max(bwd[v + strides[i]]);
            }
        }
        bwd[v] = best + w[v];
    }
    bwd
}

/// Best weight-sum over directed paths avoiding `v`, by a forward sweep in
/// which `v` is marked unreachable. `None` when every path passes `v`.
pub fn avoid_passage_time(config: &Configuration<'_>, v: usize) -> Option<f64> {
    let grid = config.grid;
    let w = &config.weights;
    let strides = grid.strides();
    if v == grid.origin() || v == grid.target() {
        return None;
    }
    let mut fwd = vec![0.0; grid.len()];
    let mut reach = vec![false; grid.len()];
    fwd[0] = w[0];
    reach[0] = true;
    let mut od = Odometer::at_origin(grid);
    for u in 1..grid.len() {
        od.increment();
        if u == v {
            continue;
        }
        let mut best: Option<f64> = None;
        for (i, &c) in od.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let p = u - strides[i];
            if reach[p] {
                best = Some(best.map_or(fwd[p], |b| b.max(fwd[p])));
            }
        }
        if let Some(b) = best {
            fwd[u] = b + w[u];
            reach[u] = true;
        }
    }
    let t = grid.target();
    reach[t].then_some(fwd[t])
}

/// Smallest non-negative weight at `v` that puts `v` on some geodesic.
///
/// Depends only on the weights at other vertices: any `x ≥ k_v` placed at
/// `v` makes it a geodesic vertex, any `x < k_v` excludes it.
pub fn threshold_weight(config: &Configuration<'_>, v: usize) -> f64 {
    let result = passage_time(config);
    threshold_from(avoid_passage_time(config, v), result.others_through(config, v))
}

/// `T^{v→x}`, the passage time after replacing `ω_v` by `x`.
pub fn resampled_passage_time(config: &Configuration<'_>, v: usize, x: f64) -> f64 {
    let result = passage_time(config);
    let through = result.others_through(config, v) + x;
    avoid_passage_time(config, v).map_or(through, |a| a.max(through))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_example(grid: &Grid) -> Configuration<'_> {
        // (0,0)=1, (0,1)=5, (1,0)=2, (1,1)=3 in row-major order
        let mut w = vec![0.0; 4];
        w[grid.index_of(&[0, 0]).unwrap()] = 1.0;
        w[grid.index_of(&[1, 0]).unwrap()] = 2.0;
        w[grid.index_of(&[0, 1]).unwrap()] = 5.0;
        w[grid.index_of(&[1, 1]).unwrap()] = 3.0;
        Configuration::new(grid, w, TieRule::Exact).unwrap()
    }

    #[test]
    fn two_path_example() {
        let g = Grid::new(1, 2).unwrap();
        let c = small_example(&g);
        let r = passage_time(&c);
        assert_eq!(r.time, 9.0);
        let mut pi: Vec<Vec<usize>> = r.geodesic_vertices().into_iter().map(|v| g.coords_of(v)).collect();
        pi.sort();
        assert_eq!(pi, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(geodesic_membership_count(&r), 3);

        let v = g.index_of(&[1, 0]).unwrap();
        assert_eq!(avoid_passage_time(&c, v), Some(9.0));
        assert_eq!(avoid_passage_time(&c, g.origin()), None);
        assert_eq!(avoid_passage_time(&c, g.target()), None);
        assert_eq!(r.others_through(&c, v), 4.0);
        assert_eq!(threshold_weight(&c, v), 5.0);
        assert_eq!(threshold_weight(&c, g.origin()), 0.0);
        assert_eq!(threshold_weight(&c, g.target()), 0.0);
        assert_eq!(resampled_passage_time(&c, v, 7.0), 11.0);
        assert_eq!(resampled_passage_time(&c, v, 2.0), 9.0);

        // at exactly k_v both paths tie and (1,0) joins the geodesic set
        let tied = passage_time(&c.with_weight(v, 5.0));
        assert!(tied.contains(v));
        assert_eq!(tied.geodesic_len(), 4);
        assert!(!passage_time(&c.with_weight(v, 4.0)).contains(v));
    }

    #[test]
    fn constant_weights_tie_everywhere() {
        for (n, d) in [(1, 2), (4, 2), (3, 3), (2, 4)] {
            let g = Grid::new(n, d).unwrap();
            let c = Configuration::new(&g, vec![1.0; g.len()], TieRule::Exact).unwrap();
            let r = passage_time(&c);
            assert_eq!(r.time, (d * n + 1) as f64);
            assert_eq!(r.geodesic_len(), g.len());
        }
    }

    #[test]
    fn configuration_validation() {
        let g = Grid::new(1, 2).unwrap();
        assert!(Configuration::new(&g, vec![1.0; 3], TieRule::Exact).is_err());
        assert!(Configuration::new(&g, vec![1.0, -1.0, 0.0, 0.0], TieRule::Exact).is_err());
        assert!(Configuration::new(&g, vec![1.0, f64::NAN, 0.0, 0.0], TieRule::Exact).is_err());
    }

    fn weights_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..10.0, len)
    }

    fn integer_weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0u32..4).prop_map(f64::from), len)
    }

    proptest! {
        #[test]
        fn passage_result_invariants(w in weights_strategy(36)) {
            let g = Grid::new(5, 2).unwrap();
            let c = Configuration::new(&g, w, TieRule::Relative(DEFAULT_RELATIVE_TIE)).unwrap();
            let r = passage_time(&c);
            prop_assert_eq!(r.forward[0], c.weights()[0]);
            prop_assert_eq!(r.backward[g.target()], c.weights()[g.target()]);
            prop_assert_eq!(r.forward[g.target()], r.time);
            prop_assert!((r.backward[0] - r.time).abs() <= 1e-12 * r.time);
            prop_assert!(r.contains(g.origin()) && r.contains(g.target()));
            for v in 0..g.len() {
                prop_assert!(r.through(&c, v) <= r.time + r.tie_tolerance + 1e-12 * r.time);
                if r.contains(v) {
                    if v != g.origin() {
                        prop_assert!(g.down_neighbor_indices(v).iter().any(|&u| r.contains(u)));
                    }
                    if v != g.target() {
                        prop_assert!(g.up_neighbor_indices(v).iter().any(|&u| r.contains(u)));
                    }
                }
            }
            // continuous weights: unique geodesic
            prop_assert_eq!(r.geodesic_len(), g.path_len());
        }

        #[test]
        fn geodesic_characterization_is_exact_for_integers(w in integer_weights(27)) {
            let g = Grid::new(2, 3).unwrap();
            let c = Configuration::new(&g, w, TieRule::Exact).unwrap();
            let r = passage_time(&c);
            prop_assert!(r.geodesic_len() >= g.path_len());
            for v in 0..g.len() {
                prop_assert_eq!(r.contains(v), r.through(&c, v) == r.time);
            }
        }

        #[test]
        fn passage_time_is_monotone(w in weights_strategy(25), v in 0usize..25, bump in 0.0f64..5.0) {
            let g = Grid::new(4, 2).unwrap();
            let c = Configuration::new(&g, w, TieRule::Relative(DEFAULT_RELATIVE_TIE)).unwrap();
            let before = passage_time(&c).time;
            let after = passage_time(&c.with_weight(v, c.weights()[v] + bump)).time;
            prop_assert!(after >= before);
            prop_assert_eq!(passage_time_value(&g, c.weights()), before);
        }

        #[test]
        fn layer_avoid_matches_masked_sweep(w in weights_strategy(27)) {
            let g = Grid::new(2, 3).unwrap();
            let c = Configuration::new(&g, w, TieRule::Relative(DEFAULT_RELATIVE_TIE)).unwrap();
            let r = passage_time(&c);
            let fast = r.avoid_times(&c);
            let ks = r.thresholds(&c);
            for v in 0..g.len() {
                match (fast[v], avoid_passage_time(&c, v)) {
                    (None, None) => {}
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0)),
                    other => prop_assert!(false, "mismatch at {}: {:?}", v, other),
                }
                prop_assert!((ks[v] - threshold_weight(&c, v)).abs() <= 1e-12 * r.time);
            }
        }

        #[test]
        fn threshold_ignores_own_weight(w in weights_strategy(25), v in 0usize..25, x in 0.0f64..20.0) {
            let g = Grid::new(4, 2).unwrap();
            let c = Configuration::new(&g, w, TieRule::Relative(DEFAULT_RELATIVE_TIE)).unwrap();
            let k = threshold_weight(&c, v);
            let k2 = threshold_weight(&c.with_weight(v, x), v);
            prop_assert!((k - k2).abs() <= 1e-12 * (1.0 + k.abs()) * 16.0);
        }

        #[test]
        fn threshold_contract(w in integer_weights(25), v in 0usize..25, x in 0u32..12) {
            let g = Grid::new(4, 2).unwrap();
            let c = Configuration::new(&g, w, TieRule::Exact).unwrap();
            let k = threshold_weight(&c, v);
            let x = f64::from(x);
            prop_assert_eq!(passage_time(&c.with_weight(v, x)).contains(v), x >= k);
        }

        #[test]
        fn resampled_identity(w in weights_strategy(25), v in 0usize..25, x in 0.0f64..15.0) {
            let g = Grid::new(4, 2).unwrap();
            let c = Configuration::new(&g, w, TieRule::Relative(DEFAULT_RELATIVE_TIE)).unwrap();
            let k = threshold_weight(&c, v);
            let lhs = resampled_passage_time(&c, v, x);
            let rhs = resampled_passage_time(&c, v, k) + (x - k).max(0.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
            let direct = passage_time(&c.with_weight(v, x)).time;
            prop_assert!((lhs - direct).abs() <= 1e-12 * lhs);
            prop_assert!((resampled_passage_time(&c, v, c.weights()[v]) - passage_time(&c).time).abs() <= 1e-12 * lhs);
        }
    }
}
