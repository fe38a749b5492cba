//! Picard iteration on the unknown `φ = ᶜD^α y`.
//!
//! Writing the Volterra form as `y = Σ b_j t^j/j! + I^α φ`, every inner
//! derivative is available without numerical differentiation:
//!
//! ```text
//! ᶜD^{α_h} y = I^{α-α_h} φ + Σ_{j=n_h}^{n-1} b_j t^{j-α_h} / Γ(j+1-α_h)
//! ```
//!
//! and the fixed-point map is `φ ↦ f(t, ᶜD^{α_1} y, …, ᶜD^{α_m} y)`. The
//! integer case `α = n` runs through the same code with `I^n`.

use std::sync::Arc;

use log::warn;
use thiserror::Error;

use crate::error::{GridError, OperatorError};
use crate::fractional::{
    ceil_order, taylor_values, weighted_norm, FracIntegralOperator, Grid, SampledFunction,
};
use crate::problem::{estimate_lipschitz, EvalError, ValidatedProblem};
use crate::special::gamma_unchecked;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("right-hand side failed at t = {t}: {source}")]
    Rhs { t: f64, source: EvalError },
    #[error("non-finite right-hand side value at t = {t} in iteration {iteration}")]
    NonFinite { t: f64, iteration: usize },
    #[error("grid horizon {grid} does not match problem horizon {problem}")]
    HorizonMismatch { grid: f64, problem: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Lipschitz constant for the contraction diagnostic; estimated from the
    /// solution's range when absent.
    pub lipschitz: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            lipschitz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardState {
    pub iteration: usize,
    /// Current iterate of `ᶜD^α y`.
    pub phi: SampledFunction,
    /// `ᶜD^{α_h} y` for each inner order, computed from the previous `φ`.
    pub z: Vec<SampledFunction>,
    /// Weighted distance to the previous `φ`; infinite at iteration 0.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub deltas: Vec<f64>,
    /// Sup-norm contraction factor `ω` of the `φ`-map on `[0, T]`.
    pub contraction_estimate: f64,
    pub lipschitz: f64,
    pub converged: bool,
    pub iterations_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTrajectory {
    pub grid: Arc<Grid>,
    pub y: SampledFunction,
    pub derivatives: Vec<SampledFunction>,
    pub phi: SampledFunction,
    pub report: ConvergenceReport,
}

/// `Σ b_j t^j / j!` on the grid.
pub fn taylor_part(b: &[f64], grid: &Arc<Grid>) -> SampledFunction {
    SampledFunction::new(Arc::clone(grid), taylor_values(b, grid.nodes()))
        .expect("one value per node")
}

/// `ᶜD^{α_h}` of the Taylor part: `Σ_{j>=n_h} b_j t^{j-α_h} / Γ(j+1-α_h)`.
pub fn derivative_taylor_part(b: &[f64], alpha_h: f64, grid: &Arc<Grid>) -> SampledFunction {
    if alpha_h == 0.0 {
        return taylor_part(b, grid);
    }
    let n_h = ceil_order(alpha_h);
    let terms: Vec<(f64, f64, f64)> = b
        .iter()
        .enumerate()
        .skip(n_h)
        .map(|(j, &bj)| {
            let p = j as f64 - alpha_h;
            (bj, p, 1.0 / gamma_unchecked(p + 1.0))
        })
        .collect();
    SampledFunction::from_fn(Arc::clone(grid), |t| {
        terms.iter().map(|&(bj, p, c)| bj * c * t.powf(p)).sum()
    })
}

/// Operators and Taylor data shared by every Picard step on one grid.
#[derive(Debug, Clone)]
pub struct PicardOperators {
    grid: Arc<Grid>,
    operators: Vec<FracIntegralOperator>,
    main: usize,
    inner: Vec<usize>,
    taylor: SampledFunction,
    inner_taylor: Vec<SampledFunction>,
}

impl PicardOperators {
    pub fn new(problem: &ValidatedProblem, grid: Arc<Grid>) -> Result<Self, OperatorError> {
        let alpha = problem.alpha();
        let mut operators: Vec<FracIntegralOperator> = Vec::new();
        let mut index_of = |order: f64| -> Result<usize, OperatorError> {
            if let Some(i) = operators.iter().position(|op| op.order() == order) {
                return Ok(i);
            }
            operators.push(FracIntegralOperator::new(order, Arc::clone(&grid))?);
            Ok(operators.len() - 1)
        };
        let main = index_of(alpha)?;
        let inner = problem
            .orders()
            .iter()
            .map(|&a| index_of(alpha - a))
            .collect::<Result<Vec<_>, _>>()?;
        let b = problem.initial_values();
        let taylor = taylor_part(b, &grid);
        let inner_taylor = problem
            .orders()
            .iter()
            .map(|&a| derivative_taylor_part(b, a, &grid))
            .collect();
        Ok(Self {
            grid,
            operators,
            main,
            inner,
            taylor,
            inner_taylor,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn main(&self) -> &FracIntegralOperator {
        &self.operators[self.main]
    }

    pub fn inner(&self, h: usize) -> &FracIntegralOperator {
        &self.operators[self.inner[h]]
    }

    /// `ᶜD^{α_h} y` for every inner order, given `φ`.
    pub fn inner_derivatives(
        &self,
        phi: &SampledFunction,
    ) -> Result<Vec<SampledFunction>, OperatorError> {
        self.inner_taylor
            .iter()
            .enumerate()
            .map(|(h, taylor)| self.inner(h).apply(phi)?.add(taylor))
            .collect()
    }

    /// `y = Σ b_j t^j/j! + I^α φ`.
    pub fn reconstruct(&self, phi: &SampledFunction) -> Result<SampledFunction, OperatorError> {
        self.main().apply(phi)?.add(&self.taylor)
    }
}

fn evaluate_rhs(
    problem: &ValidatedProblem,
    grid: &Arc<Grid>,
    z: &[SampledFunction],
    iteration: usize,
) -> Result<SampledFunction, SolveError> {
    let gamma = problem.gamma();
    let first = usize::from(gamma > 0.0);
    let rhs = problem.rhs();
    let mut args = vec![0.0; z.len()];
    let mut values = Vec::with_capacity(grid.len() - first);
    for (i, &t) in grid.nodes().iter().enumerate().skip(first) {
        for (a, zh) in args.iter_mut().zip(z) {
            *a = zh.values()[i];
        }
        let v = rhs
            .eval(t, &args)
            .map_err(|source| SolveError::Rhs { t, source })?;
        if !v.is_finite() {
            return Err(SolveError::NonFinite { t, iteration });
        }
        values.push(v);
    }
    Ok(SampledFunction::with_singularity(
        Arc::clone(grid),
        values,
        gamma,
    )?)
}

/// Iteration 0: `φ⁰ = f(t, ᶜD^{α_h} of the Taylor part)`.
pub fn initial_state(
    problem: &ValidatedProblem,
    ops: &PicardOperators,
) -> Result<PicardState, SolveError> {
    let z = ops.inner_taylor.clone();
    let phi = evaluate_rhs(problem, ops.grid(), &z, 0)?;
    Ok(PicardState {
        iteration: 0,
        phi,
        z,
        delta: f64::INFINITY,
    })
}

/// One application of the fixed-point map.
pub fn picard_step(
    state: &PicardState,
    problem: &ValidatedProblem,
    ops: &PicardOperators,
) -> Result<PicardState, SolveError> {
    let iteration = state.iteration + 1;
    let z = ops.inner_derivatives(&state.phi)?;
    let phi = evaluate_rhs(problem, ops.grid(), &z, iteration)?;
    let delta = weighted_norm(&phi.sub(&state.phi)?, problem.gamma());
    Ok(PicardState {
        iteration,
        phi,
        z,
        delta,
    })
}

/// `ω = L Σ_h T^{α-α_h} / Γ(α-α_h+1)`.
pub fn estimate_contraction(lipschitz: f64, problem: &ValidatedProblem, t_eff: f64) -> f64 {
    let alpha = problem.alpha();
    lipschitz
        * problem
            .orders()
            .iter()
            .map(|&a| t_eff.powf(alpha - a) / gamma_unchecked(alpha - a + 1.0))
            .sum::<f64>()
}

fn lipschitz_on_range(problem: &ValidatedProblem, grid: &Grid, z: &[SampledFunction]) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    let z_box: Vec<(f64, f64)> = z
        .iter()
        .map(|zh| {
            let lo = zh.values().iter().copied().fold(f64::INFINITY, f64::min);
            let hi = zh
                .values()
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let pad = 0.05 * (hi - lo) + 1e-3;
            (lo - pad, hi + pad)
        })
        .collect();
    let t = grid.nodes();
    estimate_lipschitz(problem.rhs(), (t[1], grid.horizon()), &z_box, 4000).unwrap_or(f64::NAN)
}

/// Solves the problem on `grid` by Picard iteration.
///
/// Stops once the weighted distance between successive `φ` drops to `tol`
/// or after `max_iter` steps; in the latter case the last iterate is still
/// returned, flagged as not converged.
pub fn solve(
    problem: &ValidatedProblem,
    grid: Arc<Grid>,
    options: &SolveOptions,
) -> Result<SolutionTrajectory, SolveError> {
    if !(options.tol > 0.0) {
        return Err(SolveError::BadTolerance(options.tol));
    }
    let horizon = problem.horizon();
    if (grid.horizon() - horizon).abs() > 1e-12 * horizon {
        return Err(SolveError::HorizonMismatch {
            grid: grid.horizon(),
            problem: horizon,
        });
    }
    let ops = PicardOperators::new(problem, Arc::clone(&grid))?;
    let mut state = initial_state(problem, &ops)?;
    let mut deltas = Vec::new();
    let mut converged = false;
    for _ in 0..options.max_iter {
        state = picard_step(&state, problem, &ops)?;
        deltas.push(state.delta);
        if state.delta <= options.tol {
            converged = true;
            break;
        }
    }
    let phi = state.phi;
    let derivatives = ops.inner_derivatives(&phi)?;
    let y = ops.reconstruct(&phi)?;

    let lipschitz = options
        .lipschitz
        .unwrap_or_else(|| lipschitz_on_range(problem, &grid, &derivatives));
    let contraction_estimate = estimate_contraction(lipschitz, problem, horizon);
    if contraction_estimate >= 1.0 {
        warn!(
            "contraction estimate {contraction_estimate:.4} >= 1 on [0, {horizon}]; \
             geometric decay of the Picard deltas is not guaranteed"
        );
    }
    if !converged {
        warn!(
            "Picard iteration stopped after {} steps with delta {:e}",
            deltas.len(),
            deltas.last().copied().unwrap_or(f64::NAN)
        );
    }
    Ok(SolutionTrajectory {
        grid,
        y,
        derivatives,
        phi,
        report: ConvergenceReport {
            iterations_used: deltas.len(),
            deltas,
            contraction_estimate,
            lipschitz,
            converged,
        },
    })
}

/// [`solve`] on a uniform grid with `intervals` subintervals.
pub fn solve_uniform(
    problem: &ValidatedProblem,
    intervals: usize,
    options: &SolveOptions,
) -> Result<SolutionTrajectory, SolveError> {
    let grid = Arc::new(Grid::uniform(problem.horizon(), intervals)?);
    solve(problem, grid, options)
}
