//! Vertex weight laws: sampling, distribution functions, truncated moments
//! and tail-conditional statistics.
//!
//! Every law is sampled by inversion from a single open-interval uniform, so
//! a draw consumes exactly one 64-bit word of its random stream.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::quad::{self, TailIntegral};

/// Tail probability below which the quadrature route refuses to condition.
pub const DEGENERATE_TAIL: f64 = 1e-12;

/// Truncation error allowed in the moment-condition integral.
pub const MOMENT_TAIL_TOL: f64 = 1e-8;

/// Conditional variances at or below this value count as a failed floor.
pub const MIN_VARIANCE_FLOOR: f64 = 1e-6;

/// Thresholds probed by the conditional variance floor check.
pub const FLOOR_K_GRID: [f64; 6] = [0.0, 1.0, 2.0, 5.0, 10.0, 50.0];

const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    Exponential { rate: f64 },
    /// Support {1, 2, ...} with P(X = j) = (1-p)^(j-1) p.
    Geometric { p: f64 },
    /// Support [1, ∞) with P(X > x) = x^(-exponent).
    Pareto { exponent: f64 },
    /// Support [0, ∞) with P(X > x) = exp(-scale · x^shape).
    StretchedExponential { shape: f64, scale: f64 },
    Uniform01,
    /// Point mass; the zero-variance law.
    Constant { value: f64 },
}

/// A validated weight law `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightDistribution {
    law: Law,
}

/// Value of `∫₀^∞ (1 - F(√x))^{1/d} dx` and whether it converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCondition {
    pub value: f64,
    pub satisfied: bool,
    /// Largest cutoff (in `x`) reached by the doubling test.
    pub cutoff: f64,
}

/// `E[X | X > k]` and `Var(X | X > k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailStats {
    pub mean: f64,
    pub variance: f64,
}

/// Outcome of the uniform lower bound check on `Var(X | X > k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceFloor {
    /// Smallest conditional variance found; the reported constant `c`.
    pub floor: f64,
    pub satisfied: bool,
    /// Every `(k, Var(X | X > k))` that was evaluated.
    pub points: Vec<(f64, f64)>,
    /// The `k` attaining the floor.
    pub argmin: f64,
}

impl WeightDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidDistribution(format!("exponential rate {rate} must be positive")));
        }
        Ok(Self { law: Law::Exponential { rate } })
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidDistribution(format!("geometric p = {p} must lie in (0, 1)")));
        }
        Ok(Self { law: Law::Geometric { p } })
    }

    pub fn pareto(exponent: f64) -> Result<Self> {
        if !(exponent > 2.0 && exponent.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "pareto exponent {exponent} must exceed 2 for finite variance"
            )));
        }
        Ok(Self { law: Law::Pareto { exponent } })
    }

    pub fn stretched_exponential(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape <= 1.0) {
            return Err(Error::InvalidDistribution(format!("stretched shape {shape} must lie in (0, 1]")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidDistribution(format!("stretched scale {scale} must be positive")));
        }
        Ok(Self { law: Law::StretchedExponential { shape, scale } })
    }

    pub fn uniform01() -> Self {
        Self { law: Law::Uniform01 }
    }

    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidDistribution(format!("constant weight {value} must be non-negative")));
        }
        Ok(Self { law: Law::Constant { value } })
    }

    pub fn law(&self) -> Law {
        self.law
    }

    /// True when every draw is a non-negative integer, so sums are exact in `f64`.
    pub fn is_integer_valued(&self) -> bool {
        match self.law {
            Law::Geometric { .. } => true,
            Law::Constant { value } => value.fract() == 0.0,
            _ => false,
        }
    }

    /// True when the law has no atoms, so geodesics are almost surely unique.
    pub fn is_continuous(&self) -> bool {
        !matches!(self.law, Law::Geometric { .. } | Law::Constant { .. })
    }

    /// Supremum of the support, or `None` when unbounded.
    pub fn support_max(&self) -> Option<f64> {
        match self.law {
            Law::Uniform01 => Some(1.0),
            Law::Constant { value } => Some(value),
            _ => None,
        }
    }

    /// Inverse distribution function applied to `u ∈ (0, 1)`.
    pub fn quantile_open(&self, u: f64) -> f64 {
        match self.law {
            Law::Exponential { rate } => -u.ln() / rate,
            Law::Geometric { p } => 1.0 + (u.ln() / (-p).ln_1p()).floor(),
            Law::Pareto { exponent } => u.powf(-1.0 / exponent),
            Law::StretchedExponential { shape, scale } => (-u.ln() / scale).powf(1.0 / shape),
            Law::Uniform01 => u,
            Law::Constant { value } => value,
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile_open(open_unit(rng.next_u64()))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    /// `P(X > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        match self.law {
            Law::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Law::Geometric { p } => {
                if x < 1.0 {
                    1.0
                } else {
                    (1.0 - p).powf(x.floor())
                }
            }
            Law::Pareto { exponent } => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(-exponent)
                }
            }
            Law::StretchedExponential { shape, scale } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-scale * x.powf(shape)).exp()
                }
            }
            Law::Uniform01 => (1.0 - x).clamp(0.0, 1.0),
            Law::Constant { value } => {
                if x < value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self.law {
            Law::Exponential { rate } => 1.0 / rate,
            Law::Geometric { p } => 1.0 / p,
            Law::Pareto { exponent: g } => g / (g - 1.0),
            Law::Uniform01 => 0.5,
            Law::Constant { value } => value,
            Law::StretchedExponential { .. } => self.truncated_mean(0.0),
        }
    }

    pub fn variance(&self) -> f64 {
        match self.law {
            Law::Exponential { rate } => 1.0 / (rate * rate),
            Law::Geometric { p } => (1.0 - p) / (p * p),
            Law::Pareto { exponent: g } => g / ((g - 1.0) * (g - 1.0) * (g - 2.0)),
            Law::Uniform01 => 1.0 / 12.0,
            Law::Constant { .. } => 0.0,
            Law::StretchedExponential { .. } => {
                let m = self.truncated_mean(0.0);
                self.truncated_second_moment(0.0) - m * m
            }
        }
    }

    /// Points where the survival function is not smooth, inside `(a, b)`.
    fn breaks(&self, a: f64, b: f64) -> Vec<f64> {
        let inside = |x: f64| x > a && x < b;
        match self.law {
            Law::Geometric { .. } => {
                let mut v = Vec::new();
                let mut j = a.floor() + 1.0;
                while j < b {
                    v.push(j);
                    j += 1.0;
                }
                v
            }
            Law::Pareto { .. } | Law::Uniform01 => [1.0].into_iter().filter(|&x| inside(x)).collect(),
            Law::Constant { value } => [value].into_iter().filter(|&x| inside(x)).collect(),
            _ => Vec::new(),
        }
    }

    /// A natural length scale for the law, used to size quadrature pieces.
    fn length_scale(&self) -> f64 {
        match self.law {
            Law::Exponential { rate } => 1.0 / rate,
            Law::Geometric { p } => 1.0 / p,
            Law::StretchedExponential { shape, scale } => (1.0 / scale).powf(1.0 / shape),
            Law::Constant { value } => value.max(1.0),
            Law::Pareto { .. } | Law::Uniform01 => 1.0,
        }
    }

    /// Evaluates `∫₀^∞ (1 - F(√x))^{1/d} dx` with a cutoff-doubling test.
    ///
    /// The integral is taken in the variable `u = √x`, i.e. as
    /// `∫₀^∞ 2u (1 - F(u))^{1/d} du`, so that the pieces line up with the
    /// breakpoints of `F`.
    pub fn check_moment_condition(&self, d: usize) -> Result<MomentCondition> {
        if d < 2 {
            return Err(Error::Dimension(d));
        }
        let inv_d = 1.0 / d as f64;
        let f = |u: f64| 2.0 * u * self.survival(u).powf(inv_d);
        let width = self.length_scale().min(1.0);
        let outcome = quad::integrate_tail(&f, 0.0, width, |a, b| self.breaks(a, b), MOMENT_TAIL_TOL)?;
        Ok(match outcome {
            TailIntegral::Converged { value, cutoff } => MomentCondition { value, satisfied: true, cutoff: cutoff * cutoff },
            TailIntegral::Diverged { partial, cutoff } => {
                MomentCondition { value: partial, satisfied: false, cutoff: cutoff * cutoff }
            }
        })
    }

    /// `E[(X - k)_+]`.
    pub fn truncated_mean(&self, k: f64) -> f64 {
        let k = k.max(0.0);
        match self.law {
            Law::Exponential { rate } => (-rate * k).exp() / rate,
            Law::Geometric { p } => {
                let m = k.floor();
                (1.0 - p).powf(m) * (1.0 / p + m - k)
            }
            Law::Pareto { exponent: g } => {
                if k <= 1.0 {
                    g / (g - 1.0) - k
                } else {
                    k.powf(1.0 - g) / (g - 1.0)
                }
            }
            Law::Uniform01 => {
                let r = (1.0 - k).max(0.0);
                0.5 * r * r
            }
            Law::Constant { value } => (value - k).max(0.0),
            Law::StretchedExponential { .. } => {
                let s = self.survival(k);
                if s == 0.0 {
                    0.0
                } else {
                    s * self.stretched_scaled(k).expect("stretched tail quadrature").0
                }
            }
        }
    }

    /// `E[(X - k)_+²]`.
    pub fn truncated_second_moment(&self, k: f64) -> f64 {
        let k = k.max(0.0);
        match self.law {
            Law::Exponential { rate } => 2.0 * (-rate * k).exp() / (rate * rate),
            Law::Geometric { p } => {
                let m = k.floor();
                let shift = m - k;
                let second = (2.0 - p) / (p * p);
                (1.0 - p).powf(m) * (second + 2.0 * shift / p + shift * shift)
            }
            Law::Pareto { exponent: g } => {
                if k <= 1.0 {
                    let m1 = g / (g - 1.0);
                    let m2 = g / (g - 2.0);
                    m2 - 2.0 * k * m1 + k * k
                } else {
                    2.0 * k.powf(2.0 - g) / ((g - 1.0) * (g - 2.0))
                }
            }
            Law::Uniform01 => {
                let r = (1.0 - k).max(0.0);
                r * r * r / 3.0
            }
            Law::Constant { value } => {
                let r = (value - k).max(0.0);
                r * r
            }
            Law::StretchedExponential { .. } => {
                let s = self.survival(k);
                if s == 0.0 {
                    0.0
                } else {
                    s * self.stretched_scaled(k).expect("stretched tail quadrature").1
                }
            }
        }
    }

    /// `E[(X - a)_+ (X - b)_+]`.
    ///
    /// With `h = max(a, b)` this is `E[(X - h)_+²] + |a - b| E[(X - h)_+]`.
    pub fn truncated_cross_moment(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(0.0), b.max(0.0));
        let h = a.max(b);
        match self.law {
            Law::Exponential { rate } => (-rate * h).exp() * (2.0 / (rate * rate) + (a - b).abs() / rate),
            _ => self.truncated_second_moment(h) + (a - b).abs() * self.truncated_mean(h),
        }
    }

    /// `Cov((X - a)_+, (X - b)_+)`.
    pub fn truncated_covariance(&self, a: f64, b: f64) -> f64 {
        self.truncated_cross_moment(a, b) - self.truncated_mean(a) * self.truncated_mean(b)
    }

    /// `E[(X - k)_+]` by quadrature of the survival function.
    pub fn truncated_mean_quadrature(&self, k: f64) -> Result<f64> {
        let k = k.max(0.0);
        let f = |x: f64| self.survival(x);
        quad::integrate_tail_value(&f, k, self.piece_width(k), |a, b| self.breaks(a, b), QUAD_TOL)
    }

    /// `E[(X - k)_+²]` by quadrature of `2 (x - k) P(X > x)`.
    pub fn truncated_second_moment_quadrature(&self, k: f64) -> Result<f64> {
        let k = k.max(0.0);
        let f = |x: f64| 2.0 * (x - k) * self.survival(x);
        quad::integrate_tail_value(&f, k, self.piece_width(k), |a, b| self.breaks(a, b), QUAD_TOL)
    }

    fn piece_width(&self, k: f64) -> f64 {
        match self.law {
            Law::Pareto { .. } => k.max(1.0),
            _ => self.length_scale(),
        }
    }

    /// For the stretched exponential: `(E[X - k | X > k], E[(X - k)² | X > k])`,
    /// integrating the survival ratio `P(X > x) / P(X > k)` so that tiny tails
    /// stay representable.
    fn stretched_scaled(&self, k: f64) -> Result<(f64, f64)> {
        let Law::StretchedExponential { shape, scale } = self.law else {
            unreachable!("stretched_scaled on another law")
        };
        let kb = k.powf(shape);
        let w = if k > 0.0 {
            (k.powf(1.0 - shape) / (scale * shape)).max(self.length_scale())
        } else {
            self.length_scale()
        };
        let ratio = |s: f64| (scale * (kb - (k + w * s).powf(shape))).exp();
        let none = |_: f64, _: f64| Vec::new();
        let first = quad::integrate_tail_value(&ratio, 0.0, 1.0, none, QUAD_TOL)?;
        let weighted = |s: f64| 2.0 * s * ratio(s);
        let second = quad::integrate_tail_value(&weighted, 0.0, 1.0, none, QUAD_TOL)?;
        Ok((w * first, w * w * second))
    }

    /// `E[X | X > k]` and `Var(X | X > k)`.
    ///
    /// Closed forms except for the stretched exponential, where quadrature is
    /// used and tails lighter than [`DEGENERATE_TAIL`] are refused.
    pub fn conditional_tail_stats(&self, k: f64) -> Result<TailStats> {
        let k = k.max(0.0);
        let tail = self.survival(k);
        if tail <= 0.0 {
            return Err(Error::DegenerateTail { k, prob: tail });
        }
        Ok(match self.law {
            Law::Exponential { rate } => TailStats { mean: k + 1.0 / rate, variance: 1.0 / (rate * rate) },
            Law::Geometric { p } => TailStats { mean: k.floor() + 1.0 / p, variance: (1.0 - p) / (p * p) },
            Law::Pareto { .. } => {
                let base = self.variance();
                if k <= 1.0 {
                    TailStats { mean: self.mean(), variance: base }
                } else {
                    TailStats { mean: k * self.mean(), variance: k * k * base }
                }
            }
            Law::Uniform01 => {
                let r = 1.0 - k;
                TailStats { mean: k + 0.5 * r, variance: r * r / 12.0 }
            }
            Law::Constant { value } => TailStats { mean: value, variance: 0.0 },
            Law::StretchedExponential { .. } => {
                if tail < DEGENERATE_TAIL {
                    return Err(Error::DegenerateTail { k, prob: tail });
                }
                let (b, m2) = self.stretched_scaled(k)?;
                TailStats { mean: k + b, variance: m2 - b * b }
            }
        })
    }

    /// Mean residual life `b_k = E[X | X > k] - k`.
    ///
    /// Unlike [`conditional_tail_stats`](Self::conditional_tail_stats) this
    /// does not refuse light tails; it only needs `P(X > k) > 0`.
    pub fn mean_residual_life(&self, k: f64) -> Result<f64> {
        let k = k.max(0.0);
        match self.law {
            Law::StretchedExponential { .. } => Ok(self.stretched_scaled(k)?.0),
            _ => self.conditional_tail_stats(k).map(|s| s.mean - k),
        }
    }

    /// Checks `Var(X | X > k) ≥ c > 0` over [`FLOOR_K_GRID`], plus points
    /// approaching the top of the support when it is bounded.
    ///
    /// Thresholds whose tail is empty or too light to condition on are skipped.
    pub fn variance_floor(&self) -> VarianceFloor {
        let mut ks: Vec<f64> = FLOOR_K_GRID.to_vec();
        if let Some(top) = self.support_max() {
            ks.extend((1..=6).map(|j| top - 10f64.powi(-j)).filter(|&k| k >= 0.0));
        }
        if let Law::Geometric { .. } = self.law {
            ks.extend([0.5, 1.5, 2.5]);
        }
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        let points: Vec<(f64, f64)> = ks
            .into_iter()
            .filter_map(|k| self.conditional_tail_stats(k).ok().map(|s| (k, s.variance)))
            .collect();
        let (argmin, floor) = points
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0.0, 0.0));
        VarianceFloor { floor, satisfied: floor > MIN_VARIANCE_FLOOR, points, argmin }
    }
}

/// Maps a 64-bit word to a uniform in the open interval (0, 1).
pub fn open_unit(word: u64) -> f64 {
    ((word >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.law {
            Law::Exponential { rate } => write!(f, "exp:{rate}"),
            Law::Geometric { p } => write!(f, "geom:{p}"),
            Law::Pareto { exponent } => write!(f, "pareto:{exponent}"),
            Law::StretchedExponential { shape, scale } => write!(f, "stretched:{shape}:{scale}"),
            Law::Uniform01 => write!(f, "unif01"),
            Law::Constant { value } => write!(f, "const:{value}"),
        }
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::DistributionSpec(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> { parts.get(i).ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad()) };
        match (parts[0], parts.len()) {
            ("exp", 2) => Self::exponential(num(1)?),
            ("geom", 2) => Self::geometric(num(1)?),
            ("pareto", 2) => Self::pareto(num(1)?),
            ("stretched", 3) => Self::stretched_exponential(num(1)?, num(2)?),
            ("unif01", 1) => Ok(Self::uniform01()),
            ("const", 2) => Self::constant(num(1)?),
            _ => Err(bad()),
        }
    }
}
