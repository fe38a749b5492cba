//! Discrete fractional calculus on a time mesh: the Riemann-Liouville
//! integral, the Caputo derivative, and the weighted `C_γ` norm.

mod caputo;
mod grid;
mod integral;
mod sampled;

use std::sync::Arc;

pub use caputo::{caputo_derivative, ceil_order, differentiate};
pub(crate) use caputo::{taylor_at, taylor_values};
pub use grid::Grid;
pub use integral::FracIntegralOperator;
pub use sampled::SampledFunction;

use crate::error::OperatorError;

pub fn build_integral_operator(
    beta: f64,
    grid: Arc<Grid>,
) -> Result<FracIntegralOperator, OperatorError> {
    FracIntegralOperator::new(beta, grid)
}

pub fn apply_integral(
    op: &FracIntegralOperator,
    f: &SampledFunction,
) -> Result<SampledFunction, OperatorError> {
    op.apply(f)
}

/// `‖t^γ f(t)‖_C` over the grid nodes.
///
/// The origin only contributes for regular `f` with `γ = 0`; for `γ > 0` the
/// weighted value there is zero in the limit. Returns infinity when
/// `γ` is smaller than the singular exponent of `f`, since the weighted
/// function is unbounded.
pub fn weighted_norm(f: &SampledFunction, gamma: f64) -> f64 {
    if gamma < f.singular_exponent() {
        return f64::INFINITY;
    }
    f.samples()
        .map(|(t, v)| {
            if gamma == 0.0 {
                v.abs()
            } else {
                (t.powf(gamma) * v).abs()
            }
        })
        .fold(0.0, f64::max)
}
