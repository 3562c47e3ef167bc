//! Brute-force path enumeration used to cross-check the dynamic program.

use serde::Serialize;

use crate::distributions::WeightDistribution;
use crate::error::Result;
use crate::lattice::Grid;
use crate::lpp::{self, Configuration, TieRule};
use crate::streams::{self, StreamKey, Tag};

/// Relative agreement required for continuous laws.
pub const CONTINUOUS_REL_TOL: f64 = 1e-12;

/// All origin-to-target paths of a small grid.
pub struct BruteForce {
    paths: Vec<Vec<usize>>,
}

impl BruteForce {
    pub fn new(grid: &Grid) -> Result<Self> {
        Ok(Self { paths: grid.enumerate_paths()?.collect() })
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    fn sum(path: &[usize], w: &[f64]) -> f64 {
        path.iter().fold(0.0, |s, &u| s + w[u])
    }

    pub fn passage_time(&self, w: &[f64]) -> f64 {
        self.paths.iter().map(|p| Self::sum(p, w)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Union of paths whose sum is within `tol` of the maximum.
    pub fn geodesic_set(&self, w: &[f64], tol: f64) -> Vec<bool> {
        let best = self.passage_time(w);
        let mut on = vec![false; w.len()];
        for p in &self.paths {
            if Self::sum(p, w) >= best - tol {
                for &u in p {
                    on[u] = true;
                }
            }
        }
        on
    }

    pub fn avoid(&self, w: &[f64], v: usize) -> Option<f64> {
        self.paths
            .iter()
            .filter(|p| !p.contains(&v))
            .map(|p| Self::sum(p, w))
            .reduce(f64::max)
    }

    /// `k_v` from the definition: the gap between the best avoiding path and
    /// the best path through `v` not counting `ω_v`.
    pub fn threshold(&self, w: &[f64], v: usize) -> f64 {
        let through = self
            .paths
            .iter()
            .filter(|p| p.contains(&v))
            .map(|p| p.iter().filter(|&&u| u != v).fold(0.0, |s, &u| s + w[u]))
            .fold(f64::NEG_INFINITY, f64::max);
        self.avoid(w, v).map_or(0.0, |a| (a - through).max(0.0))
    }

    pub fn resampled(&self, w: &[f64], v: usize, x: f64) -> f64 {
        let mut w = w.to_vec();
        w[v] = x;
        self.passage_time(&w)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCase {
    pub dist: String,
    pub n: usize,
    pub d: usize,
    pub configurations: usize,
    pub comparisons: u64,
    pub mismatches: u64,
    /// Largest relative discrepancy seen.
    pub max_rel_error: f64,
    pub exact: bool,
}

impl OracleCase {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

struct Tally {
    exact: bool,
    comparisons: u64,
    mismatches: u64,
    max_rel: f64,
}

impl Tally {
    fn check(&mut self, got: f64, want: f64) {
        self.check_scaled(got, want, want.abs());
    }

    /// Relative error measured against `scale`, for quantities that are
    /// differences of passage-time sized sums.
    fn check_scaled(&mut self, got: f64, want: f64, scale: f64) {
        self.comparisons += 1;
        let rel = if got == want { 0.0 } else { (got - want).abs() / scale.max(want.abs()).max(f64::MIN_POSITIVE) };
        self.max_rel = self.max_rel.max(rel);
        let ok = if self.exact { got == want } else { rel <= CONTINUOUS_REL_TOL };
        if !ok {
            self.mismatches += 1;
        }
    }

    fn check_opt(&mut self, got: Option<f64>, want: Option<f64>) {
        match (got, want) {
            (Some(a), Some(b)) => self.check(a, b),
            (None, None) => self.comparisons += 1,
            _ => {
                self.comparisons += 1;
                self.mismatches += 1;
            }
        }
    }

    fn check_flag(&mut self, got: bool, want: bool) {
        self.comparisons += 1;
        if got != want {
            self.mismatches += 1;
        }
    }
}

/// Compares passage times, geodesic sets, avoid-vertex passage times,
/// thresholds and resampled passage times against enumeration on
/// `configurations` random weight fields.
pub fn check_case(dist: &WeightDistribution, n: usize, d: usize, configurations: usize, seed: u64) -> Result<OracleCase> {
    let grid = Grid::new(n, d)?;
    let brute = BruteForce::new(&grid)?;
    let ties = TieRule::for_distribution(dist);
    let mut tally = Tally { exact: dist.is_integer_valued(), comparisons: 0, mismatches: 0, max_rel: 0.0 };
    for r in 0..configurations {
        let key = StreamKey::new(seed, r as u64);
        let w = streams::weight_field(dist, key, Tag::Oracle, grid.len());
        let config = Configuration::new(&grid, w, ties)?;
        let w = config.weights();
        let result = lpp::passage_time(&config);
        tally.check(result.time, brute.passage_time(w));
        let pi = brute.geodesic_set(w, result.tie_tolerance);
        for (v, &on) in pi.iter().enumerate() {
            tally.check_flag(result.contains(v), on);
        }
        let fast_avoid = result.avoid_times(&config);
        let fast_k = result.thresholds(&config);
        // probe values around and away from the threshold
        let extra = streams::weight_field(dist, key, Tag::Inner, grid.len());
        for v in 0..grid.len() {
            let want_avoid = brute.avoid(w, v);
            tally.check_opt(lpp::avoid_passage_time(&config, v), want_avoid);
            tally.check_opt(fast_avoid[v], want_avoid);
            let want_k = brute.threshold(w, v);
            tally.check_scaled(lpp::threshold_weight(&config, v), want_k, result.time);
            tally.check_scaled(fast_k[v], want_k, result.time);
            for x in [extra[v], want_k, want_k + 1.0] {
                tally.check(lpp::resampled_passage_time(&config, v, x), brute.resampled(w, v, x));
            }
        }
    }
    Ok(OracleCase {
        dist: dist.to_string(),
        n,
        d,
        configurations,
        comparisons: tally.comparisons,
        mismatches: tally.mismatches,
        max_rel_error: tally.max_rel,
        exact: tally.exact,
    })
}

/// The grids checked by the equivalence suite: `d = 2, n ≤ 4` and `d = 3, n ≤ 2`.
pub const SUITE_GRIDS: [(usize, usize); 6] = [(1, 2), (2, 2), (3, 2), (4, 2), (1, 3), (2, 3)];

/// Runs [`check_case`] over every law and every grid in [`SUITE_GRIDS`].
pub fn run_equivalence_suite(dists: &[WeightDistribution], configurations: usize, seed: u64) -> Result<Vec<OracleCase>> {
    let mut out = Vec::new();
    for (i, dist) in dists.iter().enumerate() {
        for (j, &(n, d)) in SUITE_GRIDS.iter().enumerate() {
            let case_seed = streams::derive_seed(seed, (i * SUITE_GRIDS.len() + j) as u64);
            out.push(check_case(dist, n, d, configurations, case_seed)?);
        }
    }
    Ok(out)
}
