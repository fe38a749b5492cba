use std::sync::Arc;

use super::{FracIntegralOperator, Grid, SampledFunction};
use crate::error::OperatorError;

/// Integer `n` with `n - 1 < α <= n`.
pub fn ceil_order(alpha: f64) -> usize {
    alpha.ceil() as usize
}

/// Samples of `Σ_{k<n} b_k t^k / k!`.
pub(crate) fn taylor_values(b: &[f64], nodes: &[f64]) -> Vec<f64> {
    nodes.iter().map(|&t| taylor_at(b, t)).collect()
}

pub(crate) fn taylor_at(b: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    let mut basis = 1.0;
    for (k, &bk) in b.iter().enumerate() {
        if k > 0 {
            basis *= t / k as f64;
        }
        acc += bk * basis;
    }
    acc
}

/// First derivative by three-point Lagrange differencing: centred in the
/// interior, one-sided (still second order) at both ends.
pub fn differentiate(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let t = grid.nodes();
    let last = t.len() - 1;
    (0..=last)
        .map(|i| {
            let (k, h1, h2) = match i {
                0 => (1, t[1] - t[0], t[2] - t[1]),
                i if i == last => (last - 1, t[last - 1] - t[last - 2], t[last] - t[last - 1]),
                i => (i, t[i] - t[i - 1], t[i + 1] - t[i]),
            };
            let (fa, fb, fc) = (values[k - 1], values[k], values[k + 1]);
            let s = h1 + h2;
            if i == 0 {
                -(2.0 * h1 + h2) / (h1 * s) * fa + s / (h1 * h2) * fb - h1 / (h2 * s) * fc
            } else if i == last {
                h2 / (h1 * s) * fa - s / (h1 * h2) * fb + (h1 + 2.0 * h2) / (h2 * s) * fc
            } else {
                -h2 / (h1 * s) * fa + (h2 - h1) / (h1 * h2) * fb + h1 / (h2 * s) * fc
            }
        })
        .collect()
}

/// Numerical Caputo derivative `ᶜD^α y = D^n I^{n-α} (y - Σ b_k t^k/k!)`.
///
/// Intended for residual checks only: the n-fold differencing loses accuracy
/// near both ends of the grid.
pub fn caputo_derivative(
    y: &SampledFunction,
    alpha: f64,
    initial_derivs: &[f64],
) -> Result<SampledFunction, OperatorError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(OperatorError::BadOrder(alpha));
    }
    if y.is_singular() {
        return Err(OperatorError::SingularInput(y.singular_exponent()));
    }
    let n = ceil_order(alpha);
    if initial_derivs.len() != n {
        return Err(OperatorError::InitialDerivativeCount {
            expected: n,
            found: initial_derivs.len(),
        });
    }
    let grid = Arc::clone(y.grid());
    if grid.intervals() < 2 * n {
        return Err(OperatorError::GridTooCoarse {
            intervals: grid.intervals(),
            order: n,
        });
    }
    let taylor = taylor_values(initial_derivs, grid.nodes());
    let remainder: Vec<f64> = y.values().iter().zip(&taylor).map(|(a, b)| a - b).collect();
    let remainder = SampledFunction::new(Arc::clone(&grid), remainder)?;
    let smoothed = if (n as f64) > alpha {
        FracIntegralOperator::new(n as f64 - alpha, Arc::clone(&grid))?.apply(&remainder)?
    } else {
        remainder
    };
    let mut values = smoothed.into_values();
    for _ in 0..n {
        values = differentiate(&grid, &values);
    }
    SampledFunction::new(grid, values)
}
