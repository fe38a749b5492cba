//! Closed-form solutions used as error oracles.

use crate::error::SpecialFnError;
use crate::problem::{RhsExpr, ValidatedProblem, Var};
use crate::special::{mittag_leffler, MLParams};

/// Exact solution of the linear problem `ᶜD^α y = λ y`, `y^{(j)}(0) = b_j`:
///
/// ```text
/// y(t) = Σ_j b_j t^j E_{α, j+1}(λ t^α)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOracle {
    pub alpha: f64,
    pub lambda: f64,
    pub initial_values: Vec<f64>,
}

impl LinearOracle {
    /// Recognises right-hand sides of the form `c*zk`, `zk*c`, `zk/c`, `-zk`
    /// (or `y` in place of `zk`) whose inner order is zero.
    pub fn detect(problem: &ValidatedProblem) -> Option<Self> {
        let lambda = linear_coefficient(problem.rhs(), problem.orders())?;
        Some(Self {
            alpha: problem.alpha(),
            lambda,
            initial_values: problem.initial_values().to_vec(),
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64, SpecialFnError> {
        let arg = self.lambda * t.powf(self.alpha);
        let mut y = 0.0;
        let mut tj = 1.0;
        for (j, &bj) in self.initial_values.iter().enumerate() {
            if j > 0 {
                tj *= t;
            }
            if bj != 0.0 {
                let p = MLParams::new(self.alpha, j as f64 + 1.0)?;
                y += bj * tj * mittag_leffler(&p, arg)?;
            }
        }
        Ok(y)
    }
}

fn zero_order_var(e: &RhsExpr, orders: &[f64]) -> bool {
    match e {
        RhsExpr::Var(Var::Y) => orders.last() == Some(&0.0),
        RhsExpr::Var(Var::Z(k)) => orders.get(k - 1) == Some(&0.0),
        _ => false,
    }
}

fn linear_coefficient(e: &RhsExpr, orders: &[f64]) -> Option<f64> {
    match e {
        v @ RhsExpr::Var(_) if zero_order_var(v, orders) => Some(1.0),
        RhsExpr::Neg(a) => linear_coefficient(a, orders).map(|c| -c),
        RhsExpr::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
            (RhsExpr::Num(c), v) | (v, RhsExpr::Num(c)) if zero_order_var(v, orders) => Some(*c),
            _ => None,
        },
        RhsExpr::Div(a, b) => match (a.as_ref(), b.as_ref()) {
            (v, RhsExpr::Num(c)) if zero_order_var(v, orders) && *c != 0.0 => Some(1.0 / c),
            _ => None,
        },
        _ => None,
    }
}
