//! Deterministic reductions and linearized standard errors.
//!
//! Every estimate carries its per-replicate influence values `ψ_i`, so the
//! standard error of the estimate, and of the difference of two estimates
//! computed on the same replicates, is `sd(ψ) / √R`.

use serde::{Deserialize, Serialize};

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation; the result depends only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (xs.len() - 1) as f64
}

/// Unbiased sample covariance.
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return f64::NAN;
    }
    let (mx, my) = (mean(xs), mean(ys));
    let prod: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    pairwise_sum(&prod) / (xs.len() - 1) as f64
}

/// Sample standard deviation over `√R`.
pub fn standard_error(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Mergeable running moments; merging is addition, so any merge order gives
/// the same result up to floating-point summation order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    /// Builds the accumulator with pairwise sums, the deterministic mode.
    pub fn from_slice(xs: &[f64]) -> Self {
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        Self { count: xs.len() as u64, sum: pairwise_sum(xs), sum_sq: pairwise_sum(&sq) }
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// A point estimate together with its per-replicate linearization.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearized {
    pub value: f64,
    pub psi: Vec<f64>,
}

impl Linearized {
    /// The sample mean; `ψ_i = x_i`.
    pub fn mean_of(xs: Vec<f64>) -> Self {
        Self { value: mean(&xs), psi: xs }
    }

    /// The unbiased sample variance; `ψ_i = (x_i − x̄)²`.
    pub fn variance_of(xs: &[f64]) -> Self {
        let m = mean(xs);
        Self { value: sample_variance(xs), psi: xs.iter().map(|x| (x - m) * (x - m)).collect() }
    }

    /// The unbiased sample covariance; `ψ_i = (x_i − x̄)(y_i − ȳ)`.
    pub fn covariance_of(xs: &[f64], ys: &[f64]) -> Self {
        let (mx, my) = (mean(xs), mean(ys));
        Self {
            value: sample_covariance(xs, ys),
            psi: xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect(),
        }
    }

    /// Pearson correlation `cov / √(var_x var_y)`, which is exactly 1 when
    /// `xs == ys`. Undefined (NaN) when either sample is constant.
    pub fn correlation_of(xs: &[f64], ys: &[f64]) -> Self {
        let (vx, vy) = (sample_variance(xs), sample_variance(ys));
        if !(vx > 0.0 && vy > 0.0) {
            return Self { value: f64::NAN, psi: vec![f64::NAN; xs.len()] };
        }
        let r = sample_covariance(xs, ys) / (vx * vy).sqrt();
        let (mx, my) = (mean(xs), mean(ys));
        let (sx, sy) = (vx.sqrt(), vy.sqrt());
        let psi = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let (a, b) = ((x - mx) / sx, (y - my) / sy);
                a * b - r * (a * a + b * b) / 2.0
            })
            .collect();
        Self { value: r, psi }
    }

    pub fn replicates(&self) -> usize {
        self.psi.len()
    }

    pub fn standard_error(&self) -> f64 {
        standard_error(&self.psi)
    }

    /// `a·self + b·other` on the same replicates.
    pub fn combine(&self, a: f64, other: &Linearized, b: f64) -> Linearized {
        assert_eq!(self.psi.len(), other.psi.len());
        Linearized {
            value: a * self.value + b * other.value,
            psi: self.psi.iter().zip(&other.psi).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    /// `other − self` with its paired standard error.
    pub fn paired_difference(&self, other: &Linearized) -> (f64, f64) {
        let d = self.combine(-1.0, other, 1.0);
        (d.value, d.standard_error())
    }
}

/// OLS fit `y = intercept + slope·x`, with the slope's standard error
/// propagated from independent per-point errors `se_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64], se_y: &[f64]) -> LineFit {
    assert!(xs.len() == ys.len() && xs.len() == se_y.len() && xs.len() >= 2);
    let mx = mean(xs);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let c: Vec<f64> = xs.iter().map(|x| (x - mx) / sxx).collect();
    let slope: f64 = c.iter().zip(ys).map(|(c, y)| c * y).sum();
    let intercept = mean(ys) - slope * mx;
    let slope_stderr = c.iter().zip(se_y).map(|(c, s)| c * c * s * s).sum::<f64>().sqrt();
    LineFit { slope, intercept, slope_stderr }
}
