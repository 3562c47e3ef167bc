//! Monte Carlo estimation over the resampling coupling.
//!
//! Each replicate `r` builds the coupling keyed by `(seed, r)` and evaluates
//! every requested time on it, so estimates at different times are paired.
//! Per-replicate records are collected in replicate order and reduced with
//! pairwise sums, which makes every report bit-identical at any thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::WeightDistribution;
use crate::dynamics::DynamicCoupling;
use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::lpp::{self, Configuration, PassageResult};
use crate::stats::{self, Linearized};
use crate::streams::{self, StreamKey, Tag};

pub const MIN_REPLICATES: usize = 100;

/// Default number of vertices per replicate in influence sums.
pub const DEFAULT_VERTEX_SAMPLE: usize = 64;

/// Relative slack added to every inequality check to absorb rounding when a
/// standard error is exactly zero.
pub const ROUNDING_SLACK: f64 = 1e-9;

/// Replicate index reserved for the fixed tracked-vertex sample.
const TRACKED_SAMPLE_REPLICATE: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `Q_t = E[T_0 T_t]`.
    CrossMoment,
    Correlation,
    /// `E[(T_0 − T_t)²]`.
    L2Distance,
    /// `E[|π_0 ∩ π_t|]`.
    Overlap,
    Variance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub quantity: Quantity,
    pub estimate: f64,
    pub standard_error: f64,
    pub replicates: usize,
    pub t: Option<f64>,
    pub n: usize,
    pub d: usize,
    pub distribution: String,
    pub seed: u64,
}

/// The five passage-time statistics at one time, from one pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassageStats {
    pub t: f64,
    pub cross_moment: EstimatorReport,
    pub correlation: EstimatorReport,
    pub l2_distance: EstimatorReport,
    pub overlap: EstimatorReport,
    pub variance: EstimatorReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceEstimate {
    /// `None` for a sum over vertices.
    pub vertex: Option<usize>,
    pub t: f64,
    pub estimate: f64,
    pub standard_error: f64,
    pub vertex_sample: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Equal,
}

/// A toleranced comparison `lhs (≤ | ≥ | =) rhs`. The allowance is
/// `sigmas · standard_error + extra + rounding slack`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    pub standard_error: f64,
    pub sigmas: f64,
    pub extra: f64,
    pub allowance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, relation: Relation, lhs: &Linearized, rhs: &Linearized, sigmas: f64, extra: f64) -> Self {
        let (difference, se) = rhs.paired_difference(lhs);
        Self::from_parts(name, relation, lhs.value, rhs.value, difference, se, sigmas, extra)
    }

    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        name: impl Into<String>,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        difference: f64,
        standard_error: f64,
        sigmas: f64,
        extra: f64,
    ) -> Self {
        let slack = ROUNDING_SLACK * 1f64.max(lhs.abs()).max(rhs.abs());
        let allowance = sigmas * standard_error + extra + slack;
        let passed = match relation {
            Relation::AtMost => difference <= allowance,
            Relation::AtLeast => difference >= -allowance,
            Relation::Equal => difference.abs() <= allowance,
        };
        Self { name: name.into(), relation, lhs, rhs, difference, standard_error, sigmas, extra, allowance, passed }
    }
}

/// Per-replicate, per-time observations.
#[derive(Debug, Clone)]
struct TimeRecord {
    passage: f64,
    overlap: f64,
    total_influence: f64,
    tracked_influence: Vec<f64>,
    tracked_joint: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Record {
    passage0: f64,
    geodesic_square_sum: f64,
    squared_passage: f64,
    tracked_square_on: Vec<f64>,
    times: Vec<TimeRecord>,
}

#[derive(Debug, Clone, Default)]
struct RunPlan<'a> {
    times: &'a [f64],
    /// Vertices per replicate in the influence sum; `None` skips influences.
    vertex_sample: Option<usize>,
    tracked: &'a [usize],
    squared: bool,
}

/// The replicate runs of one experiment, transposed on demand.
struct Runs {
    records: Vec<Record>,
}

impl Runs {
    fn column(&self, f: impl Fn(&Record) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    fn passage0(&self) -> Vec<f64> {
        self.column(|r| r.passage0)
    }

    fn passage(&self, j: usize) -> Vec<f64> {
        self.column(|r| r.times[j].passage)
    }

    fn overlap(&self, j: usize) -> Vec<f64> {
        self.column(|r| r.times[j].overlap)
    }

    fn total_influence(&self, j: usize) -> Vec<f64> {
        self.column(|r| r.times[j].total_influence)
    }
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates < MIN_REPLICATES {
        return Err(Error::Estimator(format!("need at least {MIN_REPLICATES} replicates, got {replicates}")));
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        Some(&t) => Err(Error::TimeOutOfRange(t)),
        None => Ok(()),
    }
}

fn check_vertex_sample(grid: &Grid, m: usize) -> Result<()> {
    if m == 0 || m > grid.len() {
        return Err(Error::Estimator(format!("vertex sample must lie in 1..={}, got {m}", grid.len())));
    }
    Ok(())
}

/// Uniform integer in `0..bound` by multiply-high.
fn below(rng: &mut impl rand_chacha::rand_core::RngCore, bound: usize) -> usize {
    ((rng.next_u64() as u128 * bound as u128) >> 64) as usize
}

/// `m` distinct vertices chosen uniformly (partial Fisher–Yates).
fn sample_without_replacement(len: usize, m: usize, key: StreamKey) -> Vec<usize> {
    let mut rng = streams::stream(key, Tag::VertexSample);
    let mut pool: Vec<usize> = (0..len).collect();
    for i in 0..m {
        let j = i + below(&mut rng, len - i);
        pool.swap(i, j);
    }
    pool.truncate(m);
    pool
}

/// A fixed vertex sample of size `min(count, N)` determined by `seed`,
/// in increasing order.
pub fn tracked_vertices(grid: &Grid, count: usize, seed: u64) -> Vec<usize> {
    if count >= grid.len() {
        return (0..grid.len()).collect();
    }
    let mut vs = sample_without_replacement(grid.len(), count, StreamKey::new(seed, TRACKED_SAMPLE_REPLICATE));
    vs.sort_unstable();
    vs
}

fn run_replicate(grid: &Grid, dist: &WeightDistribution, key: StreamKey, plan: &RunPlan<'_>) -> Record {
    let coupling = DynamicCoupling::build(grid, dist, key);
    let config0 = coupling.configuration_at(0.0).expect("t = 0 is valid");
    let result0 = lpp::passage_time(&config0);
    let w0 = config0.weights();
    let geodesic_square_sum = stats::pairwise_sum(
        &(0..grid.len()).filter(|&v| result0.contains(v)).map(|v| w0[v] * w0[v]).collect::<Vec<_>>(),
    );
    let squared_passage = if plan.squared { lpp::passage_time_value(grid, config0.squared().weights()) } else { f64::NAN };
    let tracked_square_on = plan
        .tracked
        .iter()
        .map(|&v| if result0.contains(v) { w0[v] * w0[v] } else { 0.0 })
        .collect();

    let influence_vertices = plan.vertex_sample.map(|m| {
        if m >= grid.len() {
            (0..grid.len()).collect()
        } else {
            sample_without_replacement(grid.len(), m, key)
        }
    });
    let k0 = plan.vertex_sample.map(|_| result0.thresholds(&config0));

    let times = plan
        .times
        .iter()
        .map(|&t| {
            let config = coupling.configuration_at(t).expect("times validated");
            let result = lpp::passage_time(&config);
            let (total_influence, tracked_influence) = match (&k0, &influence_vertices) {
                (Some(k0), Some(vs)) => {
                    let kt = result.thresholds(&config);
                    let per: Vec<f64> = vs.iter().map(|&v| dist.truncated_covariance(k0[v], kt[v])).collect();
                    let total = stats::pairwise_sum(&per) * grid.len() as f64 / vs.len() as f64;
                    let tracked = plan.tracked.iter().map(|&v| dist.truncated_covariance(k0[v], kt[v])).collect();
                    (total, tracked)
                }
                _ => (f64::NAN, Vec::new()),
            };
            TimeRecord {
                passage: result.time,
                overlap: result0.overlap(&result) as f64,
                total_influence,
                tracked_influence,
                tracked_joint: plan
                    .tracked
                    .iter()
                    .map(|&v| if result0.contains(v) && result.contains(v) { 1.0 } else { 0.0 })
                    .collect(),
            }
        })
        .collect();

    Record { passage0: result0.time, geodesic_square_sum, squared_passage, tracked_square_on, times }
}

fn collect_runs(grid: &Grid, dist: &WeightDistribution, replicates: usize, seed: u64, plan: &RunPlan<'_>) -> Runs {
    let records = (0..replicates as u64)
        .into_par_iter()
        .map(|r| run_replicate(grid, dist, StreamKey::new(seed, r), plan))
        .collect();
    Runs { records }
}

struct Meta<'a> {
    n: usize,
    d: usize,
    dist: &'a WeightDistribution,
    seed: u64,
}

impl Meta<'_> {
    fn report(&self, quantity: Quantity, t: Option<f64>, est: &Linearized) -> EstimatorReport {
        EstimatorReport {
            quantity,
            estimate: est.value,
            standard_error: est.standard_error(),
            replicates: est.replicates(),
            t,
            n: self.n,
            d: self.d,
            distribution: self.dist.to_string(),
            seed: self.seed,
        }
    }
}

/// Linearized passage statistics at time index `j`.
struct PassageLinear {
    cross: Linearized,
    corr: Linearized,
    l2: Linearized,
    overlap: Linearized,
    variance: Linearized,
}

fn passage_linear(runs: &Runs, j: usize) -> PassageLinear {
    let x = runs.passage0();
    let y = runs.passage(j);
    PassageLinear {
        cross: Linearized::mean_of(x.iter().zip(&y).map(|(a, b)| a * b).collect()),
        corr: Linearized::correlation_of(&x, &y),
        l2: Linearized::mean_of(x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).collect()),
        overlap: Linearized::mean_of(runs.overlap(j)),
        variance: Linearized::variance_of(&x),
    }
}

/// [`estimate_passage_stats`] over several times on shared couplings.
pub fn passage_stats_over_times(
    n: usize,
    d: usize,
    dist: &WeightDistribution,
    times: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<Vec<PassageStats>> {
    check_replicates(replicates)?;
    check_times(times)?;
    let grid = Grid::new(n, d)?;
    let runs = collect_runs(&grid, dist, replicates, seed, &RunPlan { times, ..Default::default() });
    let meta = Meta { n, d, dist, seed };
    Ok(times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let p = passage_linear(&runs, j);
            PassageStats {
                t,
                cross_moment: meta.report(Quantity::CrossMoment, Some(t), &p.cross),
                correlation: meta.report(Quantity::Correlation, Some(t), &p.corr),
                l2_distance: meta.report(Quantity::L2Distance, Some(t), &p.l2),
                overlap: meta.report(Quantity::Overlap, Some(t), &p.overlap),
                variance: meta.report(Quantity::Variance, None, &p.variance),
            }
        })
        .collect())
}

/// `Q_t`, `Corr(T_0, T_t)`, `E[(T_0 − T_t)²]`, `E[|π_0 ∩ π_t|]` and `Var(T_0)`.
pub fn estimate_passage_stats(
    n: usize,
    d: usize,
    dist: &WeightDistribution,
    t: f64,
    replicates: usize,
    seed: u64,
) -> Result<PassageStats> {
    Ok(passage_stats_over_times(n, d, dist, &[t], replicates, seed)?.remove(0))
}

/// Sample variance of `T` alone (forward sweeps on the base field only),
/// with its standard error.
pub fn estimate_variance(grid: &Grid, dist: &WeightDistribution, replicates: usize, seed: u64) -> Result<(f64, f64)> {
    if replicates < 2 {
        return Err(Error::Estimator(format!("need at least 2 replicates, got {replicates}")));
    }
    let times: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let w = streams::weight_field(dist, StreamKey::new(seed, r), Tag::Base, grid.len());
            lpp::passage_time_value(grid, &w)
        })
        .collect();
    let v = Linearized::variance_of(&times);
    Ok((v.value, v.standard_error()))
}

fn check_vertex(grid: &Grid, v: usize) -> Result<()> {
    if v >= grid.len() {
        return Err(Error::VertexOutOfRange(vec![v]));
    }
    Ok(())
}

/// One sample of `Inf_v(t)`: `Cov((ω̃ − k_v(0))_+, (ω̃ − k_v(t))_+ | F_v)`.
pub fn influence_of_vertex(coupling: &DynamicCoupling<'_>, v: usize, t: f64) -> Result<f64> {
    check_vertex(coupling.grid(), v)?;
    let k0 = lpp::threshold_weight(&coupling.configuration_at(0.0)?, v);
    let kt = lpp::threshold_weight(&coupling.configuration_at(t)?, v);
    Ok(coupling.distribution().truncated_covariance(k0, kt))
}

/// [`influence_of_vertex`] for every vertex, from two sweeps.
pub fn influences_all_vertices(coupling: &DynamicCoupling<'_>, t: f64) -> Result<Vec<f64>> {
    let thresholds = |config: &Configuration<'_>| lpp::passage_time(config).thresholds(config);
    let k0 = thresholds(&coupling.configuration_at(0.0)?);
    let kt = thresholds(&coupling.configuration_at(t)?);
    let dist = coupling.distribution();
    Ok(k0.iter().zip(&kt).map(|(&a, &b)| dist.truncated_covariance(a, b)).collect())
}

/// One sample of `Inf_v(t)` from the definition: `∫ D_v^x T_0 D_v^x T_t dF(x)`
/// with `D_v^x T = T^{v→x} − ∫ T^{v→y} dF(y)`, both integrals replaced by
/// `inner_draws` fresh draws and a full passage-time sweep per draw. Returns
/// the unbiased sample covariance of `T_0^{v→x}` and `T_t^{v→x}`.
pub fn influence_of_vertex_by_definition(
    coupling: &DynamicCoupling<'_>,
    v: usize,
    t: f64,
    inner_draws: usize,
) -> Result<f64> {
    check_vertex(coupling.grid(), v)?;
    if inner_draws < 2 {
        return Err(Error::Estimator("need at least 2 inner draws".into()));
    }
    let grid = coupling.grid();
    let mut w0 = coupling.configuration_at(0.0)?.weights().to_vec();
    let mut wt = coupling.configuration_at(t)?.weights().to_vec();
    let xs = streams::weight_field(coupling.distribution(), coupling.key(), Tag::Inner, inner_draws);
    let mut a = Vec::with_capacity(inner_draws);
    let mut b = Vec::with_capacity(inner_draws);
    for &x in &xs {
        w0[v] = x;
        wt[v] = x;
        a.push(lpp::passage_time_value(grid, &w0));
        b.push(lpp::passage_time_value(grid, &wt));
    }
    Ok(stats::sample_covariance(&a, &b))
}

/// `Σ_v Inf_v(t)`: every vertex when `vertex_sample = N`, otherwise `N` times
/// the mean over a fresh uniform subset per replicate.
pub fn total_influence(
    n: usize,
    d: usize,
    dist: &WeightDistribution,
    t: f64,
    replicates: usize,
    vertex_sample: usize,
    seed: u64,
) -> Result<InfluenceEstimate> {
    check_replicates(replicates)?;
    check_times(&[t])?;
    let grid = Grid::new(n, d)?;
    check_vertex_sample(&grid, vertex_sample)?;
    let plan = RunPlan { times: &[t], vertex_sample: Some(vertex_sample), ..Default::default() };
    let runs = collect_runs(&grid, dist, replicates, seed, &plan);
    let est = Linearized::mean_of(runs.total_influence(0));
    Ok(InfluenceEstimate {
        vertex: None,
        t,
        estimate: est.value,
        standard_error: est.standard_error(),
        vertex_sample,
        replicates,
    })
}

/// Default vertex sample `min(N, 64)`.
pub fn default_vertex_sample(grid: &Grid) -> usize {
    grid.len().min(DEFAULT_VERTEX_SAMPLE)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceReport {
    pub time_grid: Vec<f64>,
    pub total_influence: Vec<f64>,
    pub total_influence_se: Vec<f64>,
    /// Trapezoid `∫₀¹ Σ_v Inf_v(t) dt`.
    pub quadrature: f64,
    pub sample_variance: f64,
    /// Half the gap between the left and right Riemann sums; bounds the
    /// trapezoid error of a monotone integrand.
    pub bracket: f64,
    pub formula: Check,
    /// `Σ_v Inf_v(0) ≥ Var(T)`.
    pub upper_bound: Check,
    pub vertex_sample: usize,
    pub replicates: usize,
    pub passed: bool,
}

/// `Var(T) = ∫₀¹ Σ_v Inf_v(t) dt`, checked on paired per-replicate deltas.
pub fn verify_covariance_formula(
    n: usize,
    d: usize,
    dist: &WeightDistribution,
    time_grid: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<CovarianceReport> {
    check_replicates(replicates)?;
    check_times(time_grid)?;
    if time_grid.len() < 11
        || time_grid[0] != 0.0
        || time_grid[time_grid.len() - 1] != 1.0
        || time_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::Estimator(
            "time grid must be increasing, start at 0, end at 1 and have at least 11 points".into(),
        ));
    }
    let grid = Grid::new(n, d)?;
    let vertex_sample = default_vertex_sample(&grid);
    let plan = RunPlan { times: time_grid, vertex_sample: Some(vertex_sample), ..Default::default() };
    let runs = collect_runs(&grid, dist, replicates, seed, &plan);

    let per_time: Vec<Linearized> = (0..time_grid.len()).map(|j| Linearized::mean_of(runs.total_influence(j))).collect();
    let trapezoid: Vec<f64> = runs
        .records
        .iter()
        .map(|r| {
            let f: Vec<f64> = r.times.iter().map(|x| x.total_influence).collect();
            trapezoid(time_grid, &f)
        })
        .collect();
    let quadrature = Linearized::mean_of(trapezoid);
    let variance = Linearized::variance_of(&runs.passage0());
    let means: Vec<f64> = per_time.iter().map(|e| e.value).collect();
    let bracket = time_grid.windows(2).zip(means.windows(2)).map(|(t, f)| (t[1] - t[0]) * (f[0] - f[1]).abs() / 2.0).sum();

    let formula = Check::new("covariance formula", Relation::Equal, &quadrature, &variance, 3.0, bracket);
    let upper_bound = Check::new("total influence at 0 bounds the variance", Relation::AtLeast, &per_time[0], &variance, 3.0, 0.0);
    let passed = formula.passed && upper_bound.passed;
    Ok(CovarianceReport {
        time_grid: time_grid.to_vec(),
        total_influence: means,
        total_influence_se: per_time.iter().map(Linearized::standard_error).collect(),
        quadrature: quadrature.value,
        sample_variance: variance.value,
        bracket,
        formula,
        upper_bound,
        vertex_sample,
        replicates,
        passed,
    })
}

fn trapezoid(ts: &[f64], fs: &[f64]) -> f64 {
    ts.windows(2).zip(fs.windows(2)).map(|(t, f)| (t[1] - t[0]) * (f[0] + f[1]) / 2.0).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub t: f64,
    pub h: f64,
    /// `−(Q_{t+h} − Q_{t−h}) / (2h)`.
    pub finite_difference: f64,
    pub finite_difference_se: f64,
    pub total_influence: f64,
    pub total_influence_se: f64,
    pub check: Check,
    pub passed: bool,
}

/// `−dQ_t/dt = Σ_v Inf_v(t)` by a centered difference on the same couplings.
///
/// The difference uses `(T_0 − T̄_0)(T_{t+h} − T_{t−h})`, which has the same
/// expectation as `T_0 (T_{t+h} − T_{t−h})` because `T_{t±h}` share a law.
pub fn verify_derivative_identity(
    n: usize,
    d: usize,
    dist: &WeightDistribution,
    t: f64,
    h: f64,
    replicates: usize,
    seed: u64,
) -> Result<DerivativeReport> {
    check_replicates(replicates)?;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Estimator(format!("step must be positive, got {h}")));
    }
    let times = [t, t - h, t + h];
    check_times(&times)?;
    let grid = Grid::new(n, d)?;
    let plan = RunPlan { times: &times, vertex_sample: Some(default_vertex_sample(&grid)), ..Default::default() };
    let runs = collect_runs(&grid, dist, replicates, seed, &plan);
    let x = runs.passage0();
    let m = stats::mean(&x);
    let (lo, hi) = (runs.passage(1), runs.passage(2));
    let fd = Linearized::mean_of(x.iter().zip(lo.iter().zip(&hi)).map(|(a, (l, u))| -(a - m) * (u - l) / (2.0 * h)).collect());
    let inf = Linearized::mean_of(runs.total_influence(0));
    let check = Check::new("derivative identity", Relation::Equal, &fd, &inf, 3.0, 0.0);
    Ok(DerivativeReport {
        t,
        h,
        finite_difference: fd.value,
        finite_difference_se: fd.standard_error(),
        total_influence: inf.value,
        total_influence_se: inf.standard_error(),
        passed: check.passed,
        check,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexBounds {
    pub vertex: usize,
    pub coords: Vec<usize>,
    /// `Inf_v(0) ≤ E[ω_v(0)² 1{v ∈ π_0}]`.
    pub upper: Check,
    /// `Inf_v(t) ≥ ĉ P(v ∈ π_0 ∩ π_t)`.
    pub lower: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub t: f64,
    pub floor: f64,
    pub vertices: Vec<VertexBounds>,
    pub replicates: usize,
    pub passed: bool,
}

/// Per-vertex upper bound at time 0 and lower bound at time `t` for the
/// co-influence, with `ĉ` the law's conditional-variance floor. Vertices are
/// all of them when `N ≤ 64`, else a fixed sample of 64.
pub fn verify_lemma_bounds(
    n: usize,
    d: usize,
    dist: &WeightDistribution,
    t: f64,
    replicates: usize,
    seed: u64,
) -> Result<LemmaReport> {
    check_replicates(replicates)?;
    check_times(&[t])?;
    let floor = dist.variance_floor();
    if !floor.satisfied {
        return Err(Error::VarianceFloorFails { dist: dist.to_string() });
    }
    let grid = Grid::new(n, d)?;
    let tracked = tracked_vertices(&grid, DEFAULT_VERTEX_SAMPLE, seed);
    let times = [0.0, t];
    let plan = RunPlan { times: &times, vertex_sample: Some(1), tracked: &tracked, squared: false };
    let runs = collect_runs(&grid, dist, replicates, seed, &plan);
    let c = floor.floor;
    let vertices: Vec<VertexBounds> = tracked
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let inf0 = Linearized::mean_of(runs.column(|r| r.times[0].tracked_influence[i]));
            let sq = Linearized::mean_of(runs.column(|r| r.tracked_square_on[i]));
            let inft = Linearized::mean_of(runs.column(|r| r.times[1].tracked_influence[i]));
            let joint = Linearized::mean_of(runs.column(|r| c * r.times[1].tracked_joint[i]));
            VertexBounds {
                vertex: v,
                coords: grid.coords_of(v),
                upper: Check::new(format!("upper bound at vertex {v}"), Relation::AtMost, &inf0, &sq, 3.0, 0.0),
                lower: Check::new(format!("lower bound at vertex {v}"), Relation::AtLeast, &inft, &joint, 3.0, 0.0),
            }
        })
        .collect();
    let passed = vertices.iter().all(|b| b.upper.passed && b.lower.passed);
    Ok(LemmaReport { t, floor: c, vertices, replicates, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub t: f64,
    pub l2_distance: f64,
    /// `E[Σ_{v∈π_0} ω_v(0)²]`.
    pub geodesic_square_sum: f64,
    /// `E[max_γ Σ_{v∈γ} ω_v²]`, the linear-growth majorant.
    pub squared_passage: f64,
    pub covariance: f64,
    pub variance: f64,
    /// `E[(T_0 − T_t)²] ≤ 2t E[Σ_{v∈π_0} ω_v(0)²]`.
    pub linear_bound: Check,
    /// `E[Σ_{v∈π_0} ω_v²] ≤ E[T(ω²)]`; only for laws without atoms, where
    /// `π_0` is a single path.
    pub majorant: Option<Check>,
    /// `Cov(T_0, T_t) = Var(T) − ½ E[(T_0 − T_t)²]`.
    pub covariance_identity: Check,
    pub replicates: usize,
    pub passed: bool,
}

pub fn verify_stability_bound(
    n: usize,
    d: usize,
    dist: &WeightDistribution,
    t: f64,
    replicates: usize,
    seed: u64,
) -> Result<StabilityReport> {
    check_replicates(replicates)?;
    check_times(&[t])?;
    let grid = Grid::new(n, d)?;
    let plan = RunPlan { times: &[t], squared: true, ..Default::default() };
    let runs = collect_runs(&grid, dist, replicates, seed, &plan);
    let p = passage_linear(&runs, 0);
    let sq = Linearized::mean_of(runs.column(|r| r.geodesic_square_sum));
    let majorant_mean = Linearized::mean_of(runs.column(|r| r.squared_passage));
    let bound = Linearized { value: 2.0 * t * sq.value, psi: sq.psi.iter().map(|x| 2.0 * t * x).collect() };
    let covariance = Linearized::covariance_of(&runs.passage0(), &runs.passage(0));
    let rhs = p.variance.combine(1.0, &p.l2, -0.5);
    let linear_bound = Check::new("L2 distance linear bound", Relation::AtMost, &p.l2, &bound, 3.0, 0.0);
    let majorant = dist
        .is_continuous()
        .then(|| Check::new("geodesic square sum majorant", Relation::AtMost, &sq, &majorant_mean, 3.0, 0.0));
    let covariance_identity = Check::new("covariance rearrangement", Relation::Equal, &covariance, &rhs, 4.0, 0.0);
    let passed = linear_bound.passed && majorant.as_ref().is_none_or(|c| c.passed) && covariance_identity.passed;
    Ok(StabilityReport {
        t,
        l2_distance: p.l2.value,
        geodesic_square_sum: sq.value,
        squared_passage: majorant_mean.value,
        covariance: covariance.value,
        variance: p.variance.value,
        linear_bound,
        majorant,
        covariance_identity,
        replicates,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneSuite {
    pub quantity: String,
    pub vertex: Option<usize>,
    pub values: Vec<f64>,
    /// `value(t_{i+1}) ≤ value(t_i) + 2σ` for consecutive grid points.
    pub steps: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub time_grid: Vec<f64>,
    pub suites: Vec<MonotoneSuite>,
    /// `ĉ t E[|π_0 ∩ π_t|] ≤ Var(T)`; `None` when the law has no positive
    /// conditional-variance floor.
    pub chaos_integral: Option<Vec<Check>>,
    pub skipped: Vec<String>,
    pub replicates: usize,
    pub passed: bool,
}

fn monotone_suite(name: &str, vertex: Option<usize>, times: &[f64], series: &[Linearized]) -> MonotoneSuite {
    let steps: Vec<Check> = series
        .windows(2)
        .zip(times.windows(2))
        .map(|(s, t)| Check::new(format!("{name} at t={} vs t={}", t[1], t[0]), Relation::AtMost, &s[1], &s[0], 2.0, 0.0))
        .collect();
    MonotoneSuite {
        quantity: name.to_string(),
        vertex,
        values: series.iter().map(|s| s.value).collect(),
        passed: steps.iter().all(|c| c.passed),
        steps,
    }
}

/// Non-increase in `t` of `Q_t`, `Corr(T_0, T_t)`, `E[|π_0 ∩ π_t|]` and of
/// `Inf_v(t)` for `tracked` sampled vertices, plus the chaos-integral chain.
pub fn verify_monotonicity(
    n: usize,
    d: usize,
    dist: &WeightDistribution,
    time_grid: &[f64],
    replicates: usize,
    tracked: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    check_replicates(replicates)?;
    check_times(time_grid)?;
    if time_grid.len() < 2 || time_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Estimator("time grid must be increasing with at least 2 points".into()));
    }
    let grid = Grid::new(n, d)?;
    let tracked = tracked_vertices(&grid, tracked, seed);
    let plan = RunPlan {
        times: time_grid,
        vertex_sample: if tracked.is_empty() { None } else { Some(1) },
        tracked: &tracked,
        squared: false,
    };
    let runs = collect_runs(&grid, dist, replicates, seed, &plan);
    let linear: Vec<PassageLinear> = (0..time_grid.len()).map(|j| passage_linear(&runs, j)).collect();

    let mut suites = vec![
        monotone_suite("Q_t", None, time_grid, &linear.iter().map(|p| p.cross.clone()).collect::<Vec<_>>()),
        monotone_suite("overlap", None, time_grid, &linear.iter().map(|p| p.overlap.clone()).collect::<Vec<_>>()),
    ];
    let mut skipped = Vec::new();
    let variance = &linear[0].variance;
    if variance.value > 0.0 {
        suites.insert(
            1,
            monotone_suite("corr", None, time_grid, &linear.iter().map(|p| p.corr.clone()).collect::<Vec<_>>()),
        );
    } else {
        skipped.push("corr: passage time has zero sample variance".to_string());
    }
    for (i, &v) in tracked.iter().enumerate() {
        let series: Vec<Linearized> = (0..time_grid.len())
            .map(|j| Linearized::mean_of(runs.column(|r| r.times[j].tracked_influence[i])))
            .collect();
        suites.push(monotone_suite("influence", Some(v), time_grid, &series));
    }

    let floor = dist.variance_floor();
    let chaos_integral = if floor.satisfied {
        Some(
            time_grid
                .iter()
                .zip(&linear)
                .map(|(&t, p)| {
                    let scaled = Linearized {
                        value: floor.floor * t * p.overlap.value,
                        psi: p.overlap.psi.iter().map(|o| floor.floor * t * o).collect(),
                    };
                    Check::new(format!("chaos integral at t={t}"), Relation::AtMost, &scaled, variance, 3.0, 0.0)
                })
                .collect::<Vec<_>>(),
        )
    } else {
        skipped.push("chaos integral: law fails the conditional-variance floor".to_string());
        None
    };
    let passed =
        suites.iter().all(|s| s.passed) && chaos_integral.as_ref().is_none_or(|cs| cs.iter().all(|c| c.passed));
    Ok(MonotonicityReport {
        time_grid: time_grid.to_vec(),
        suites,
        chaos_integral,
        skipped,
        replicates,
        passed,
    })
}

/// `points` equally spaced times from 0 to 1 inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

/// Geodesic set of the time-`t` configuration of a coupling.
pub fn geodesic_at(coupling: &DynamicCoupling<'_>, t: f64) -> Result<PassageResult> {
    Ok(lpp::passage_time(&coupling.configuration_at(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> WeightDistribution {
        WeightDistribution::exponential(1.0).unwrap()
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(estimate_passage_stats(2, 2, &exp1(), 0.5, 99, 1).is_err());
        assert!(matches!(estimate_passage_stats(2, 2, &exp1(), 1.5, 100, 1), Err(Error::TimeOutOfRange(_))));
        assert!(total_influence(2, 2, &exp1(), 0.5, 100, 10, 1).is_err());
        assert!(verify_covariance_formula(2, 2, &exp1(), &[0.0, 0.5, 1.0], 100, 1).is_err());
        let u = WeightDistribution::uniform01();
        assert!(matches!(verify_lemma_bounds(2, 2, &u, 0.5, 100, 1), Err(Error::VarianceFloorFails { .. })));
    }

    #[test]
    fn time_zero_is_exact() {
        let s = estimate_passage_stats(3, 2, &exp1(), 0.0, 200, 4).unwrap();
        assert_eq!(s.correlation.estimate, 1.0);
        assert_eq!(s.correlation.standard_error, 0.0);
        assert_eq!(s.l2_distance.estimate, 0.0);
        let lens = (0..200u64).map(|r| {
            let g = Grid::new(3, 2).unwrap();
            let c = DynamicCoupling::build(&g, &exp1(), StreamKey::new(4, r));
            geodesic_at(&c, 0.0).unwrap().geodesic_len() as f64
        });
        let mean_len = lens.sum::<f64>() / 200.0;
        assert!((s.overlap.estimate - mean_len).abs() < 1e-12);
        assert_eq!(s.overlap.estimate, 7.0); // continuous law: unique geodesic of d·n+1 vertices
    }

    #[test]
    fn time_one_decorrelates() {
        let s = estimate_passage_stats(3, 2, &exp1(), 1.0, 4000, 9).unwrap();
        assert!(s.correlation.estimate.abs() <= 3.0 * s.correlation.standard_error);
        assert!(s.variance.estimate > 0.0 && s.variance.standard_error > 0.0);
    }

    #[test]
    fn origin_influence_is_the_variance() {
        let g = Grid::new(3, 2).unwrap();
        for r in 0..5 {
            let c = DynamicCoupling::build(&g, &exp1(), StreamKey::new(1, r));
            assert_eq!(influence_of_vertex(&c, g.origin(), 0.4).unwrap(), 1.0);
            assert_eq!(influence_of_vertex(&c, g.target(), 0.4).unwrap(), 1.0);
        }
        let geo = WeightDistribution::geometric(0.5).unwrap();
        let c = DynamicCoupling::build(&g, &geo, StreamKey::new(1, 0));
        assert!((influence_of_vertex(&c, 0, 0.7).unwrap() - geo.variance()).abs() < 1e-12);
    }

    #[test]
    fn bulk_and_single_vertex_influences_agree() {
        let g = Grid::new(4, 2).unwrap();
        for r in 0..10 {
            let c = DynamicCoupling::build(&g, &exp1(), StreamKey::new(6, r));
            let all = influences_all_vertices(&c, 0.35).unwrap();
            for (v, &a) in all.iter().enumerate() {
                let one = influence_of_vertex(&c, v, 0.35).unwrap();
                assert!((a - one).abs() <= 1e-9, "v={v}: {a} vs {one}");
            }
        }
    }

    #[test]
    fn time_zero_influence_is_a_conditional_variance() {
        let g = Grid::new(3, 2).unwrap();
        let dist = exp1();
        let c = DynamicCoupling::build(&g, &dist, StreamKey::new(2, 2));
        let config = c.configuration_at(0.0).unwrap();
        for v in 0..g.len() {
            let k = lpp::threshold_weight(&config, v);
            let var = dist.truncated_second_moment(k) - dist.truncated_mean(k).powi(2);
            assert!((influence_of_vertex(&c, v, 0.0).unwrap() - var).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_law_has_no_influence() {
        let dist = WeightDistribution::constant(2.0).unwrap();
        let inf = total_influence(3, 2, &dist, 0.3, 100, 16, 1).unwrap();
        assert_eq!(inf.estimate, 0.0);
        assert_eq!(inf.standard_error, 0.0);
        let report = verify_covariance_formula(3, 2, &dist, &uniform_grid(11), 100, 1).unwrap();
        assert_eq!(report.quadrature, 0.0);
        assert_eq!(report.sample_variance, 0.0);
        assert!(report.passed);
    }

    #[test]
    fn subsampled_sum_is_unbiased() {
        let dist = exp1();
        let full = total_influence(4, 2, &dist, 0.3, 4000, 25, 12).unwrap();
        let sub = total_influence(4, 2, &dist, 0.3, 4000, 6, 13).unwrap();
        let combined = (full.standard_error.powi(2) + sub.standard_error.powi(2)).sqrt();
        assert!((full.estimate - sub.estimate).abs() <= 3.0 * combined, "{full:?} {sub:?}");
        assert!(sub.standard_error > full.standard_error);
    }

    #[test]
    fn tracked_sample_is_fixed_and_sorted() {
        let g = Grid::new(10, 2).unwrap();
        let a = tracked_vertices(&g, 8, 3);
        assert_eq!(a, tracked_vertices(&g, 8, 3));
        assert_eq!(a.len(), 8);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(tracked_vertices(&g, 500, 3).len(), g.len());
    }

    #[test]
    fn reports_are_thread_count_independent() {
        let dist = exp1();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| passage_stats_over_times(3, 2, &dist, &[0.0, 0.3, 1.0], 300, 5).unwrap())
        };
        assert_eq!(run(1), run(3));
    }
}
