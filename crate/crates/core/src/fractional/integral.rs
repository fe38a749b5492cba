//! Product-trapezoidal discretisation of the Riemann-Liouville integral
//!
//! ```text
//! I^β f(t) = 1/Γ(β) ∫_0^t (t - τ)^(β-1) f(τ) dτ
//! ```
//!
//! On every subinterval `f` is replaced by its linear interpolant and the
//! kernel moments are integrated in closed form, so the rule is exact on
//! functions that are piecewise linear over the grid.

use std::sync::Arc;

use rayon::prelude::*;

use super::{Grid, SampledFunction};
use crate::error::OperatorError;
use crate::special::gamma_unchecked;

/// Below this ratio `a/h` the moments are evaluated directly; above it the
/// direct formula cancels and the binomial series is used instead.
const SERIES_THRESHOLD: f64 = 4.0;
const SERIES_MAX_TERMS: usize = 100_000;

/// Unscaled kernel moments on one subinterval.
///
/// With `s = t_n - τ` running over `[a, a + h]`, returns
/// `((1/h) ∫ s^(β-1) (s - a) ds, (1/h) ∫ s^(β-1) (a + h - s) ds)`:
/// the weights of the left and right endpoint values.
pub(crate) fn interval_moments(beta: f64, a: f64, h: f64) -> (f64, f64) {
    if a >= SERIES_THRESHOLD * h {
        let x = h / a;
        let (mut sl, mut sr) = (0.0, 0.0);
        let mut coeff = 1.0;
        let mut xm = 1.0;
        for m in 0..SERIES_MAX_TERMS {
            let mf = m as f64;
            let tl = coeff * xm / (mf + 2.0);
            let tr = tl / (mf + 1.0);
            sl += tl;
            sr += tr;
            if tl.abs() <= 1e-18 * sl.abs() {
                break;
            }
            coeff *= (beta - 1.0 - mf) / (mf + 1.0);
            if coeff == 0.0 {
                break;
            }
            xm *= x;
        }
        let pre = a.powf(beta - 1.0) * h;
        (pre * sl, pre * sr)
    } else {
        let b = a + h;
        let p = (b.powf(beta + 1.0) - a.powf(beta + 1.0)) / (beta + 1.0);
        let q = (b.powf(beta) - a.powf(beta)) / beta;
        ((p - a * q) / h, (b * q - p) / h)
    }
}

/// `∫_0^{t_1} (t_n - τ)^(β-1) τ^μ dτ` for `μ > -1`, `t_n >= t_1`.
pub(crate) fn singular_moment(beta: f64, mu: f64, t_n: f64, t_1: f64) -> f64 {
    if t_n == t_1 {
        return t_1.powf(beta + mu) * gamma_unchecked(beta) * gamma_unchecked(mu + 1.0)
            / gamma_unchecked(beta + mu + 1.0);
    }
    let r = t_1 / t_n;
    let mut sum = 0.0;
    let mut coeff = 1.0;
    let mut rk = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        let term = coeff * rk / (mu + kf + 1.0);
        sum += term;
        if k > 0 && term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        coeff *= (beta - 1.0 - kf) / (kf + 1.0);
        if coeff == 0.0 {
            break;
        }
        rk *= -r;
    }
    t_n.powf(beta - 1.0) * t_1.powf(mu + 1.0) * sum
}

#[derive(Debug, Clone)]
enum WeightTable {
    /// Uniform grids: weights depend only on the offset `m = n - j - 1`.
    Convolution { left: Vec<f64>, right: Vec<f64> },
    /// Row `n` (intervals `0..n`) starts at offset `n(n-1)/2`.
    Dense { left: Vec<f64>, right: Vec<f64> },
}

/// Discrete `I^β` on a fixed grid.
#[derive(Debug, Clone)]
pub struct FracIntegralOperator {
    order: f64,
    grid: Arc<Grid>,
    table: WeightTable,
}

fn row_offset(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl FracIntegralOperator {
    pub fn new(order: f64, grid: Arc<Grid>) -> Result<Self, OperatorError> {
        if !(order > 0.0) || !order.is_finite() {
            return Err(OperatorError::BadOrder(order));
        }
        let inv_gamma = 1.0 / gamma_unchecked(order);
        let intervals = grid.intervals();
        let table = match grid.step() {
            Some(h) => {
                let scale = h.powf(order) * inv_gamma;
                let (left, right): (Vec<f64>, Vec<f64>) = (0..intervals)
                    .into_par_iter()
                    .map(|m| {
                        let (l, r) = interval_moments(order, m as f64, 1.0);
                        (l * scale, r * scale)
                    })
                    .unzip();
                WeightTable::Convolution { left, right }
            }
            None => {
                let t = grid.nodes();
                let rows: Vec<(Vec<f64>, Vec<f64>)> = (1..=intervals)
                    .into_par_iter()
                    .map(|n| {
                        (0..n)
                            .map(|j| {
                                let (l, r) =
                                    interval_moments(order, t[n] - t[j + 1], t[j + 1] - t[j]);
                                (l * inv_gamma, r * inv_gamma)
                            })
                            .unzip()
                    })
                    .collect();
                let mut left = Vec::with_capacity(row_offset(intervals + 1));
                let mut right = Vec::with_capacity(row_offset(intervals + 1));
                for (l, r) in rows {
                    left.extend(l);
                    right.extend(r);
                }
                WeightTable::Dense { left, right }
            }
        };
        Ok(Self { order, grid, table })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Left/right endpoint weights of interval `j` for output node `n > j`.
    #[inline]
    fn interval_weights(&self, n: usize, j: usize) -> (f64, f64) {
        match &self.table {
            WeightTable::Convolution { left, right } => {
                let m = n - j - 1;
                (left[m], right[m])
            }
            WeightTable::Dense { left, right } => {
                let k = row_offset(n) + j;
                (left[k], right[k])
            }
        }
    }

    /// Node weight `w_{n,j}`: `I^β f(t_n) ≈ Σ_j w_{n,j} f(t_j)` for regular `f`.
    pub fn weight(&self, n: usize, j: usize) -> f64 {
        if j > n || n == 0 || n > self.grid.intervals() {
            return 0.0;
        }
        let mut w = 0.0;
        if j < n {
            w += self.interval_weights(n, j).0;
        }
        if j >= 1 {
            w += self.interval_weights(n, j - 1).1;
        }
        w
    }

    fn regular_sum(&self, n: usize, f: &[f64]) -> f64 {
        match &self.table {
            WeightTable::Convolution { left, right } => {
                let mut acc = 0.0;
                for j in 0..n {
                    let m = n - j - 1;
                    acc += left[m] * f[j] + right[m] * f[j + 1];
                }
                acc
            }
            WeightTable::Dense { left, right } => {
                let row = row_offset(n);
                let (l, r) = (&left[row..row + n], &right[row..row + n]);
                let mut acc = 0.0;
                for j in 0..n {
                    acc += l[j] * f[j] + r[j] * f[j + 1];
                }
                acc
            }
        }
    }

    /// Samples of `I^β f`.
    ///
    /// For `f ∈ C_γ` with `γ > 0` the first subinterval is integrated against
    /// the exact weight `τ^{-γ}`: `t^γ f(t)` is interpolated linearly on
    /// `[0, t_1]` (extrapolating its value at 0 from `t_1, t_2`) and the
    /// moments of `(t_n - τ)^(β-1) τ^{-γ}` are evaluated in closed form.
    /// The result is regular and vanishes at `t_0` when `β > γ`.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction, OperatorError> {
        if !f.same_grid(&self.grid) {
            return Err(OperatorError::GridMismatch);
        }
        let n_nodes = self.grid.len();
        let values = if f.is_singular() {
            let gamma = f.singular_exponent();
            if !(self.order > gamma) {
                return Err(OperatorError::DiscontinuousResult {
                    beta: self.order,
                    gamma,
                });
            }
            self.apply_singular(f.values(), gamma)
        } else {
            let fv = f.values();
            (0..n_nodes)
                .into_par_iter()
                .with_min_len(64)
                .map(|n| self.regular_sum(n, fv))
                .collect()
        };
        SampledFunction::new(Arc::clone(&self.grid), values)
    }

    fn apply_singular(&self, stored: &[f64], gamma: f64) -> Vec<f64> {
        let t = self.grid.nodes();
        let beta = self.order;
        let inv_gamma_beta = 1.0 / gamma_unchecked(beta);
        let (t1, t2) = (t[1], t[2]);
        let g1 = t1.powf(gamma) * stored[0];
        let g2 = t2.powf(gamma) * stored[1];
        let g0 = g1 - t1 * (g2 - g1) / (t2 - t1);
        // node k lives at stored[k - 1]
        let fval = |k: usize| stored[k - 1];
        (0..t.len())
            .into_par_iter()
            .with_min_len(64)
            .map(|n| {
                if n == 0 {
                    return 0.0;
                }
                let m0 = singular_moment(beta, -gamma, t[n], t1);
                let m1 = singular_moment(beta, 1.0 - gamma, t[n], t1);
                let mut acc = inv_gamma_beta * (g0 * (m0 - m1 / t1) + g1 * m1 / t1);
                for j in 1..n {
                    let (wl, wr) = self.interval_weights(n, j);
                    acc += wl * fval(j) + wr * fval(j + 1);
                }
                acc
            })
            .collect()
    }
}
