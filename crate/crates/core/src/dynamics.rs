//! The resampling coupling `(ω, ω', U)`.
//!
//! `ω_v(t) = ω_v` while `U_v > t` and `ω'_v` once `U_v ≤ t`, so a single
//! coupling yields a consistent configuration for every `t ∈ [0, 1]`.

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::lpp::{Configuration, TieRule};
use crate::streams::{self, StreamKey, Tag};

#[derive(Debug, Clone)]
pub struct DynamicCoupling<'g> {
    grid: &'g Grid,
    dist: WeightDistribution,
    base: Vec<f64>,
    refresh: Vec<f64>,
    clocks: Vec<f64>,
    key: StreamKey,
}

fn check_time(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::TimeOutOfRange(t))
    }
}

impl<'g> DynamicCoupling<'g> {
    /// Draws `ω`, `ω'` and `U` from disjoint substreams of `key`.
    pub fn build(grid: &'g Grid, dist: &WeightDistribution, key: StreamKey) -> Self {
        let len = grid.len();
        Self {
            grid,
            dist: *dist,
            base: streams::weight_field(dist, key, Tag::Base, len),
            refresh: streams::weight_field(dist, key, Tag::Refresh, len),
            clocks: streams::uniform_field(key, Tag::Clock, len),
            key,
        }
    }

    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn distribution(&self) -> &WeightDistribution {
        &self.dist
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn refresh(&self) -> &[f64] {
        &self.refresh
    }

    pub fn clocks(&self) -> &[f64] {
        &self.clocks
    }

    /// `ω(t)`.
    pub fn configuration_at(&self, t: f64) -> Result<Configuration<'g>> {
        check_time(t)?;
        let weights = self
            .base
            .iter()
            .zip(&self.refresh)
            .zip(&self.clocks)
            .map(|((&w, &w2), &u)| if u > t { w } else { w2 })
            .collect();
        Ok(Configuration::from_parts(self.grid, weights, TieRule::for_distribution(&self.dist)))
    }

    /// `{v : U_v ≤ t}`.
    pub fn resampled_set(&self, t: f64) -> Result<Vec<usize>> {
        check_time(t)?;
        Ok(self.clocks.iter().enumerate().filter(|(_, &u)| u <= t).map(|(v, _)| v).collect())
    }
}

/// Free-function form of [`DynamicCoupling::build`].
pub fn build_coupling<'g>(grid: &'g Grid, dist: &WeightDistribution, key: StreamKey) -> DynamicCoupling<'g> {
    DynamicCoupling::build(grid, dist, key)
}
