//! Adaptive quadrature on finite intervals and on half-lines.
//!
//! Finite pieces are handled by the double-exponential rule from the
//! `quadrature` crate, bisected until the reported error estimate is below
//! the requested tolerance. Half-lines are covered by pieces of doubling
//! width until the remaining tail is negligible.

use crate::error::{Error, Result};

const MAX_BISECTION_DEPTH: u32 = 40;
const MAX_DOUBLINGS: usize = 1100;

/// Integrates `f` over `[a, b]` to the given absolute tolerance.
pub(crate) fn integrate<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a.is_nan() || b.is_nan() || b <= a {
        return Ok(0.0);
    }
    bisect(f, a, b, tol, 0)
}

fn bisect<F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let out = quadrature::integrate(f, a, b, tol);
    if out.error_estimate <= tol || out.error_estimate <= 64.0 * f64::EPSILON * out.integral.abs() {
        return Ok(out.integral);
    }
    if depth >= MAX_BISECTION_DEPTH {
        return Err(Error::Quadrature(format!(
            "error estimate {:e} above {:e} on [{a}, {b}]",
            out.error_estimate, tol
        )));
    }
    let mid = 0.5 * (a + b);
    Ok(bisect(f, a, mid, 0.5 * tol, depth + 1)? + bisect(f, mid, b, 0.5 * tol, depth + 1)?)
}

/// Integrates `f` over `[a, b]`, splitting at the interior `breaks` first.
pub(crate) fn integrate_with_breaks<F>(f: &F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut points = Vec::with_capacity(breaks.len() + 2);
    points.push(a);
    points.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    points.push(b);
    let share = tol / (points.len() - 1) as f64;
    let mut total = 0.0;
    for w in points.windows(2) {
        total += integrate(f, w[0], w[1], share)?;
    }
    Ok(total)
}

/// Result of integrating over `[start, ∞)` by cutoff doubling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum TailIntegral {
    Converged { value: f64, cutoff: f64 },
    /// The increments did not shrink fast enough; `partial` is the integral up to `cutoff`.
    Diverged { partial: f64, cutoff: f64 },
}

/// Integrates a non-negative `f` over `[start, ∞)` using pieces
/// `[start + w(2^i - 1), start + w(2^(i+1) - 1)]`. Stops once the geometric
/// extrapolation of the remaining increments is below `tol`.
pub(crate) fn integrate_tail<F, B>(f: &F, start: f64, width: f64, breaks: B, tol: f64) -> Result<TailIntegral>
where
    F: Fn(f64) -> f64,
    B: Fn(f64, f64) -> Vec<f64>,
{
    let piece_tol = tol * 1e-3;
    let mut lo = start;
    let mut w = width;
    let mut total = 0.0;
    let mut prev_inc = f64::INFINITY;
    let mut growing = 0usize;
    for i in 0..MAX_DOUBLINGS {
        let hi = lo + w;
        let inc = integrate_with_breaks(f, lo, hi, &breaks(lo, hi), piece_tol)?;
        total += inc;
        if i >= 2 {
            if inc == 0.0 && prev_inc <= tol {
                return Ok(TailIntegral::Converged { value: total, cutoff: hi });
            }
            let ratio = inc / prev_inc;
            if ratio < 1.0 && inc * ratio / (1.0 - ratio) <= tol && inc <= tol {
                return Ok(TailIntegral::Converged { value: total, cutoff: hi });
            }
            if ratio >= 1.0 && inc > tol {
                growing += 1;
                if growing >= 6 {
                    return Ok(TailIntegral::Diverged { partial: total, cutoff: hi });
                }
            } else {
                growing = 0;
            }
        }
        prev_inc = inc;
        lo = hi;
        w *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Ok(TailIntegral::Diverged { partial: total, cutoff: lo })
}

/// Like [`integrate_tail`] but treats divergence as an error.
pub(crate) fn integrate_tail_value<F, B>(f: &F, start: f64, width: f64, breaks: B, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    B: Fn(f64, f64) -> Vec<f64>,
{
    match integrate_tail(f, start, width, breaks, tol)? {
        TailIntegral::Converged { value, .. } => Ok(value),
        TailIntegral::Diverged { cutoff, .. } => Err(Error::Quadrature(format!(
            "tail integral from {start} not converged at cutoff {cutoff:e}"
        ))),
    }
}
