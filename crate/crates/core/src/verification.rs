//! Numerical checks of the equivalence between the differential problem and
//! its Volterra form, of the vanishing of fractional integrals at `t → +0`,
//! and of the composition `I^α ᶜD^α y = y - (Taylor part of y)`.

use std::sync::Arc;

use thiserror::Error;

use crate::error::OperatorError;
use crate::fractional::{
    caputo_derivative, ceil_order, taylor_at, taylor_values, weighted_norm, FracIntegralOperator,
    Grid, SampledFunction,
};
use crate::problem::{ProblemConfig, ValidatedProblem};
use crate::solver::SolutionTrajectory;
use crate::special::{gamma_unchecked, mittag_leffler, MLParams};

/// Nodes used to extrapolate `D^k y(+0)`.
pub const IC_FIT_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `sup |ᶜD^α y - f(t, z)|` over interior nodes.
    pub ode_residual: f64,
    /// `sup |y - Σ b_j t^j/j! - I^α f(t, z)|` over all nodes.
    pub volterra_residual: f64,
    /// `|D^k y(+0) - b_k|` for `k = 0, …, n-1`.
    pub ic_errors: Vec<f64>,
    /// Nodes excluded from the ODE residual at both ends together.
    pub nodes_skipped: usize,
}

/// Boundary nodes excluded on each side of the ODE residual.
pub fn boundary_skip(intervals: usize) -> usize {
    intervals.div_ceil(32)
}

fn rhs_samples(problem: &ValidatedProblem, sol: &SolutionTrajectory) -> Option<SampledFunction> {
    let gamma = problem.gamma();
    let first = usize::from(gamma > 0.0);
    let mut args = vec![0.0; sol.derivatives.len()];
    let mut values = Vec::with_capacity(sol.grid.len());
    for (i, &t) in sol.grid.nodes().iter().enumerate().skip(first) {
        for (a, z) in args.iter_mut().zip(&sol.derivatives) {
            *a = z.values()[i];
        }
        let v = problem.rhs().eval(t, &args).ok()?;
        if !v.is_finite() {
            return None;
        }
        values.push(v);
    }
    SampledFunction::with_singularity(Arc::clone(&sol.grid), values, gamma).ok()
}

fn sup_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(
        0.0,
        |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) },
    )
}

/// Residuals of a computed trajectory in both formulations. Never fails:
/// a residual that cannot be evaluated is reported as infinite.
pub fn check_equivalence(sol: &SolutionTrajectory, problem: &ValidatedProblem) -> ResidualReport {
    let b = problem.initial_values();
    let grid = &sol.grid;
    let skip = boundary_skip(grid.intervals());
    let f = rhs_samples(problem, sol);

    let volterra_residual = f
        .as_ref()
        .and_then(|f| {
            let op = FracIntegralOperator::new(problem.alpha(), Arc::clone(grid)).ok()?;
            let integral = op.apply(f).ok()?;
            let taylor = taylor_values(b, grid.nodes());
            Some(sup_abs(
                sol.y
                    .values()
                    .iter()
                    .zip(&taylor)
                    .zip(integral.values())
                    .map(|((y, p), i)| y - p - i),
            ))
        })
        .unwrap_or(f64::INFINITY);

    let ode_residual = f
        .as_ref()
        .and_then(|f| {
            let d = caputo_derivative(&sol.y, problem.alpha(), b).ok()?;
            let last = grid.intervals() - skip;
            Some(sup_abs(
                (skip..=last).map(|i| d.values()[i] - f.at(i).unwrap_or(f64::NAN)),
            ))
        })
        .unwrap_or(f64::INFINITY);

    ResidualReport {
        ode_residual,
        volterra_residual,
        ic_errors: initial_condition_errors(&sol.y, b),
        nodes_skipped: 2 * skip,
    }
}

/// Extrapolates `D^k y(+0)` from the first [`IC_FIT_NODES`] nodes: the k-th
/// forward divided differences are fitted by a straight line in their
/// abscissae (the mean of the nodes they span) and the line is evaluated at
/// `t = 0`.
pub fn extrapolated_derivative(y: &SampledFunction, k: usize) -> f64 {
    let t = y.grid().nodes();
    let count = IC_FIT_NODES.min(t.len());
    if k >= count {
        return f64::NAN;
    }
    let mut dd: Vec<f64> = (0..count).map(|i| y.at(i).unwrap_or(f64::NAN)).collect();
    for level in 1..=k {
        dd = (0..dd.len() - 1)
            .map(|i| (dd[i + 1] - dd[i]) / (t[i + level] - t[i]))
            .collect();
    }
    // level-k difference i spans nodes i..=i+k; k! scales it to the derivative
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let points: Vec<(f64, f64)> = dd
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let xi = t[i..=i + k].iter().sum::<f64>() / (k + 1) as f64;
            (xi, d * factorial)
        })
        .collect();
    if points.len() == 1 {
        return points[0].1;
    }
    let (intercept, _) = linear_fit(&points);
    intercept
}

/// Least-squares line `v = a + s x`; returns `(a, s)`.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

pub fn initial_condition_errors(y: &SampledFunction, b: &[f64]) -> Vec<f64> {
    b.iter()
        .enumerate()
        .map(|(k, &bk)| (extrapolated_derivative(y, k) - bk).abs())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Lemma2Error {
    #[error("hypothesis violated: integral order {alpha} must exceed singular exponent {gamma}")]
    Hypothesis { alpha: f64, gamma: f64 },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// Log-log slope of `I^α f` over the first decade of nodes.
    pub slope: f64,
    pub expected_slope: f64,
    /// `I^α f(t_0)`, the discrete limit at the origin.
    pub origin_value: f64,
    pub first_node_value: f64,
}

/// Nodes `t_1, …, t_10` used for the decay fit.
pub const DECAY_FIT_NODES: usize = 10;

/// Decay of `I^α (c t^{-γ})` at the origin.
pub fn lemma2_decay(
    gamma: f64,
    coefficient: f64,
    alpha: f64,
    grid: &Arc<Grid>,
) -> Result<DecayReport, Lemma2Error> {
    if !(alpha > gamma) || !(0.0..1.0).contains(&gamma) {
        return Err(Lemma2Error::Hypothesis { alpha, gamma });
    }
    let f = SampledFunction::from_fn_singular(Arc::clone(grid), gamma, |t| {
        coefficient * t.powf(-gamma)
    })?;
    let r = FracIntegralOperator::new(alpha, Arc::clone(grid))?.apply(&f)?;
    let last = DECAY_FIT_NODES.min(grid.intervals());
    let points: Vec<(f64, f64)> = (1..=last)
        .map(|i| (grid.nodes()[i].ln(), r.values()[i].abs().ln()))
        .collect();
    let (_, slope) = linear_fit(&points);
    Ok(DecayReport {
        slope,
        expected_slope: alpha - gamma,
        origin_value: r.values()[0],
        first_node_value: r.values()[1],
    })
}

/// `sup |I^α(ᶜD^α y) - (y - Σ_{j<n} y^{(j)}(0) t^j/j!)|` for the polynomial
/// `y = Σ c_k t^k`, with both operators applied numerically.
pub fn composition_identity(
    coeffs: &[f64],
    alpha: f64,
    grid: &Arc<Grid>,
) -> Result<f64, OperatorError> {
    let n = ceil_order(alpha);
    let b: Vec<f64> = (0..n)
        .map(|j| coeffs.get(j).copied().unwrap_or(0.0) * gamma_unchecked(j as f64 + 1.0))
        .collect();
    let high = |t: f64| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .skip(n)
            .map(|(k, &c)| c * t.powi(k as i32))
            .sum()
    };
    // low-order part evaluated exactly as the Taylor part so it cancels bit for bit
    let y = SampledFunction::from_fn(Arc::clone(grid), |t| taylor_at(&b, t) + high(t));
    let d = caputo_derivative(&y, alpha, &b)?;
    let back = FracIntegralOperator::new(alpha, Arc::clone(grid))?.apply(&d)?;
    let taylor = taylor_values(&b, grid.nodes());
    Ok(sup_abs(
        y.values()
            .iter()
            .zip(&taylor)
            .zip(back.values())
            .map(|((yv, p), bv)| bv - (yv - p)),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialLimit {
    pub k: usize,
    /// `|I^{α-k} φ(t_1)|`.
    pub value: f64,
    /// `‖φ‖_{C_γ} Γ(1-γ)/Γ(1-γ+α-k) t_1^{α-k-γ}`, which vanishes as `t_1 → 0`.
    pub bound: f64,
}

/// `I^{α-k} φ` at the first node after the origin, for `k = 0, …, n-1`.
pub fn initial_limit_checks(
    problem: &ValidatedProblem,
    sol: &SolutionTrajectory,
) -> Result<Vec<InitialLimit>, OperatorError> {
    let gamma = problem.gamma();
    let norm = weighted_norm(&sol.phi, gamma);
    let t1 = sol.grid.nodes()[1];
    (0..problem.n())
        .map(|k| {
            let order = problem.alpha() - k as f64;
            let r = FracIntegralOperator::new(order, Arc::clone(&sol.grid))?.apply(&sol.phi)?;
            let bound = norm * gamma_unchecked(1.0 - gamma) / gamma_unchecked(1.0 - gamma + order)
                * t1.powf(order - gamma);
            Ok(InitialLimit {
                k,
                value: r.values()[1].abs(),
                bound,
            })
        })
        .collect()
}

/// A problem with a known exact solution.
#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub name: &'static str,
    pub config: ProblemConfig,
    pub exact: fn(f64) -> f64,
}

fn config(
    alpha: f64,
    orders: &[f64],
    b: &[f64],
    horizon: f64,
    gamma: f64,
    rhs: &str,
) -> ProblemConfig {
    ProblemConfig {
        alpha,
        derivative_orders: orders.to_vec(),
        initial_values: b.to_vec(),
        horizon,
        gamma,
        rhs: rhs.to_string(),
    }
}

/// Problems with closed-form solutions, used by the tests and the CLI.
pub fn builtin_suite() -> Vec<SuiteCase> {
    vec![
        SuiteCase {
            name: "mittag-leffler-half",
            config: config(0.5, &[0.0], &[1.0], 1.0, 0.0, "-z1"),
            exact: |t| {
                let p = MLParams::new(0.5, 1.0).expect("valid parameters");
                mittag_leffler(&p, -t.sqrt()).expect("series converges")
            },
        },
        SuiteCase {
            name: "manufactured-square",
            config: config(
                1.5,
                &[0.5],
                &[0.0, 0.0],
                1.0,
                0.0,
                "2*t^0.5/0.886226925452758 + 0*z1",
            ),
            exact: |t| t * t,
        },
        SuiteCase {
            name: "cosine",
            config: config(2.0, &[0.0], &[1.0, 0.0], std::f64::consts::TAU, 0.0, "-z1"),
            exact: f64::cos,
        },
        SuiteCase {
            name: "exponential",
            config: config(1.0, &[0.0], &[1.0], 1.0, 0.0, "z1"),
            exact: f64::exp,
        },
        SuiteCase {
            name: "zero-rhs",
            config: config(0.7, &[], &[3.0], 1.0, 0.0, "0"),
            exact: |_| 3.0,
        },
        SuiteCase {
            name: "weighted-forcing",
            config: config(1.5, &[0.5], &[0.0, 0.0], 1.0, 0.4, "t^-0.4 + 0*z1"),
            exact: |t| gamma_unchecked(0.6) / gamma_unchecked(2.1) * t.powf(1.1),
        },
    ]
}

/// Maximum of `|y(t_i) - exact(t_i)|` over the grid.
pub fn sup_error(y: &SampledFunction, exact: impl Fn(f64) -> f64) -> f64 {
    sup_abs(y.samples().map(|(t, v)| v - exact(t)))
}
