//! Problem definition for
//!
//! ```text
//! ᶜD^α y(t) = f(t, ᶜD^{α_1} y(t), …, ᶜD^{α_m} y(t)),   D^j y(0) = b_j,  j < n
//! ```
//!
//! with `α > α_1 > … > α_m >= 0` and `n - 1 < α <= n`.

mod expr;
mod lipschitz;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expr::{eval_rhs, parse_rhs, EvalError, Func, ParseError, RhsExpr, Var};
pub use lipschitz::estimate_lipschitz;

use crate::fractional::ceil_order;

/// On-disk problem description (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub derivative_orders: Vec<f64>,
    pub initial_values: Vec<f64>,
    pub horizon: f64,
    #[serde(default)]
    pub gamma: f64,
    pub rhs: String,
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid problem: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses the right-hand side and validates every condition, collecting
    /// all violations rather than stopping at the first.
    pub fn build(&self) -> Result<ValidatedProblem, ProblemError> {
        let m = self.derivative_orders.len();
        let rhs = match parse_rhs(&self.rhs, m) {
            Ok(rhs) => rhs,
            Err(e) => {
                let mut issues = vec![Violation::Rhs(e)];
                // still report the numeric conditions
                let probe = MultiTermProblem {
                    alpha: self.alpha,
                    derivative_orders: self.derivative_orders.clone(),
                    initial_values: self.initial_values.clone(),
                    horizon: self.horizon,
                    gamma: self.gamma,
                    rhs: RhsExpr::Num(0.0),
                };
                issues.extend(numeric_violations(&probe));
                return Err(ProblemError::Invalid(issues));
            }
        };
        MultiTermProblem {
            alpha: self.alpha,
            derivative_orders: self.derivative_orders.clone(),
            initial_values: self.initial_values.clone(),
            horizon: self.horizon,
            gamma: self.gamma,
            rhs,
        }
        .validate()
        .map_err(ProblemError::Invalid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiTermProblem {
    pub alpha: f64,
    pub derivative_orders: Vec<f64>,
    pub initial_values: Vec<f64>,
    pub horizon: f64,
    pub gamma: f64,
    pub rhs: RhsExpr,
}

/// One failed condition of the problem statement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("principal order alpha must be positive and finite, got {0}")]
    NonPositiveOrder(f64),
    #[error("order chain violated: alpha = {alpha} must exceed alpha_1 = {first}")]
    PrincipalNotAbove { alpha: f64, first: f64 },
    #[error("order chain violated: alpha_{index} = {prev} must exceed alpha_{} = {next}", .index + 1)]
    NotDecreasing { index: usize, prev: f64, next: f64 },
    #[error("order chain violated: alpha_{index} = {value} must be finite and >= 0")]
    NegativeInnerOrder { index: usize, value: f64 },
    #[error("initial-value count: expected n = {expected} values b_0..b_(n-1), got {found}")]
    InitialValueCount { expected: usize, found: usize },
    #[error("initial value b_{index} is not finite")]
    NonFiniteInitialValue { index: usize },
    #[error("horizon T must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("weight exponent gamma must be finite and >= 0, got {0}")]
    NegativeGamma(f64),
    #[error("weight exponent gamma = {gamma} must satisfy gamma < alpha - n + 1 = {bound}")]
    GammaTooLarge { gamma: f64, bound: f64 },
    #[error("integer order alpha = {alpha} requires a continuous right-hand side (gamma = 0), got gamma = {gamma}")]
    GammaForIntegerOrder { alpha: f64, gamma: f64 },
    #[error("inner order too high: n = {n} must exceed n_1 = {n1}")]
    InnerOrderTooHigh { n: usize, n1: usize },
    #[error("'y' may only be used when the last inner order is 0")]
    YAliasWithoutZeroOrder,
    #[error("right-hand side: {0}")]
    Rhs(ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    /// `α = n ∈ ℕ`: the equation reduces to `y^(n) = f(…)`.
    Integer,
    /// `n - 1 < α < n`.
    Fractional,
}

/// A problem that passed [`MultiTermProblem::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedProblem {
    problem: MultiTermProblem,
    n: usize,
    inner_ceilings: Vec<usize>,
    kind: OrderKind,
}

impl ValidatedProblem {
    pub fn problem(&self) -> &MultiTermProblem {
        &self.problem
    }

    pub fn into_problem(self) -> MultiTermProblem {
        self.problem
    }

    /// `n` with `n - 1 < α <= n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `n_h = ⌈α_h⌉` for each inner order.
    pub fn inner_ceilings(&self) -> &[usize] {
        &self.inner_ceilings
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.problem.alpha
    }

    pub fn orders(&self) -> &[f64] {
        &self.problem.derivative_orders
    }

    pub fn m(&self) -> usize {
        self.problem.derivative_orders.len()
    }

    pub fn initial_values(&self) -> &[f64] {
        &self.problem.initial_values
    }

    pub fn horizon(&self) -> f64 {
        self.problem.horizon
    }

    pub fn gamma(&self) -> f64 {
        self.problem.gamma
    }

    pub fn rhs(&self) -> &RhsExpr {
        &self.problem.rhs
    }
}

fn numeric_violations(p: &MultiTermProblem) -> Vec<Violation> {
    let mut out = Vec::new();
    let alpha_ok = p.alpha > 0.0 && p.alpha.is_finite();
    if !alpha_ok {
        out.push(Violation::NonPositiveOrder(p.alpha));
    }
    let orders = &p.derivative_orders;
    for (i, &a) in orders.iter().enumerate() {
        if !(a >= 0.0) || !a.is_finite() {
            out.push(Violation::NegativeInnerOrder {
                index: i + 1,
                value: a,
            });
        }
    }
    if let Some(&first) = orders.first() {
        if alpha_ok && !(p.alpha > first) {
            out.push(Violation::PrincipalNotAbove {
                alpha: p.alpha,
                first,
            });
        }
    }
    for (i, w) in orders.windows(2).enumerate() {
        if !(w[0] > w[1]) {
            out.push(Violation::NotDecreasing {
                index: i + 1,
                prev: w[0],
                next: w[1],
            });
        }
    }
    if !(p.horizon > 0.0) || !p.horizon.is_finite() {
        out.push(Violation::BadHorizon(p.horizon));
    }
    if !(p.gamma >= 0.0) || !p.gamma.is_finite() {
        out.push(Violation::NegativeGamma(p.gamma));
    }
    for (index, b) in p.initial_values.iter().enumerate() {
        if !b.is_finite() {
            out.push(Violation::NonFiniteInitialValue { index });
        }
    }
    if !alpha_ok {
        return out;
    }

    let n = ceil_order(p.alpha);
    if p.initial_values.len() != n {
        out.push(Violation::InitialValueCount {
            expected: n,
            found: p.initial_values.len(),
        });
    }
    let integer = p.alpha.fract() == 0.0;
    if integer {
        if p.gamma != 0.0 && p.gamma.is_finite() && p.gamma > 0.0 {
            out.push(Violation::GammaForIntegerOrder {
                alpha: p.alpha,
                gamma: p.gamma,
            });
        }
    } else {
        let bound = p.alpha - n as f64 + 1.0;
        if p.gamma >= 0.0 && !(p.gamma < bound) {
            out.push(Violation::GammaTooLarge {
                gamma: p.gamma,
                bound,
            });
        }
        if let Some(&first) = orders.first() {
            if first >= 0.0 && first.is_finite() {
                let n1 = ceil_order(first);
                if !(n > n1) {
                    out.push(Violation::InnerOrderTooHigh { n, n1 });
                }
            }
        }
    }
    out
}

impl MultiTermProblem {
    /// Checks the order chain, the initial-value count and the weighted-space
    /// conditions, and classifies the problem as integer or fractional order.
    ///
    /// Only `n > n_1` is enforced for the inner orders; nothing is required
    /// of `n_2, …, n_m` beyond the decreasing chain.
    pub fn validate(self) -> Result<ValidatedProblem, Vec<Violation>> {
        let mut issues = numeric_violations(&self);
        if self.rhs.uses_y() && self.derivative_orders.last() != Some(&0.0) {
            issues.push(Violation::YAliasWithoutZeroOrder);
        }
        if !issues.is_empty() {
            return Err(issues);
        }
        let n = ceil_order(self.alpha);
        let inner_ceilings = self
            .derivative_orders
            .iter()
            .map(|&a| ceil_order(a))
            .collect();
        let kind = if self.alpha.fract() == 0.0 {
            OrderKind::Integer
        } else {
            OrderKind::Fractional
        };
        Ok(ValidatedProblem {
            problem: self,
            n,
            inner_ceilings,
            kind,
        })
    }
}

pub fn validate_problem(p: MultiTermProblem) -> Result<ValidatedProblem, Vec<Violation>> {
    p.validate()
}
