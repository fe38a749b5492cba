use std::sync::Arc;

use super::Grid;
use crate::error::OperatorError;

/// Real values attached to the nodes of a [`Grid`].
///
/// A function in the weighted space `C_γ` (`γ > 0`) behaves like `t^{-γ}`
/// near the origin, so its value at `t_0` is not stored: `values[i]` then
/// belongs to node `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
    singular_exponent: f64,
}

impl SampledFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self, OperatorError> {
        Self::with_singularity(grid, values, 0.0)
    }

    pub fn with_singularity(
        grid: Arc<Grid>,
        values: Vec<f64>,
        singular_exponent: f64,
    ) -> Result<Self, OperatorError> {
        if !(0.0..1.0).contains(&singular_exponent) {
            return Err(OperatorError::NonIntegrable(singular_exponent));
        }
        let expected = if singular_exponent > 0.0 {
            grid.len() - 1
        } else {
            grid.len()
        };
        if values.len() != expected {
            return Err(OperatorError::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(Self {
            grid,
            values,
            singular_exponent,
        })
    }

    /// Samples a regular function at every node.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self {
            grid,
            values,
            singular_exponent: 0.0,
        }
    }

    /// Samples a `C_γ` function on `(0, T]`; `f` is never called at `t = 0`.
    pub fn from_fn_singular(
        grid: Arc<Grid>,
        singular_exponent: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, OperatorError> {
        if singular_exponent == 0.0 {
            return Ok(Self::from_fn(grid, f));
        }
        let values = grid.nodes()[1..].iter().map(|&t| f(t)).collect();
        Self::with_singularity(grid, values, singular_exponent)
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self {
            grid,
            values,
            singular_exponent: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn singular_exponent(&self) -> f64 {
        self.singular_exponent
    }

    pub fn is_singular(&self) -> bool {
        self.singular_exponent > 0.0
    }

    /// Index into `values` of the first stored node.
    pub fn first_node(&self) -> usize {
        usize::from(self.is_singular())
    }

    /// Value at node `i`, or `None` at the origin of a singular function.
    pub fn at(&self, i: usize) -> Option<f64> {
        if self.is_singular() {
            i.checked_sub(1).and_then(|k| self.values.get(k).copied())
        } else {
            self.values.get(i).copied()
        }
    }

    /// `(t_i, f(t_i))` for every stored node.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.nodes()[self.first_node()..]
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn same_grid(&self, other: &Grid) -> bool {
        std::ptr::eq(Arc::as_ptr(&self.grid), other) || *self.grid == *other
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
            singular_exponent: self.singular_exponent,
        }
    }

    /// Pointwise `self - other` on the nodes both functions store.
    pub fn sub(&self, other: &Self) -> Result<Self, OperatorError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self, OperatorError> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self, OperatorError> {
        if !self.same_grid(&other.grid) {
            return Err(OperatorError::GridMismatch);
        }
        let exponent = self.singular_exponent.max(other.singular_exponent);
        let skip_a = usize::from(exponent > 0.0 && !self.is_singular());
        let skip_b = usize::from(exponent > 0.0 && !other.is_singular());
        let values = self.values[skip_a..]
            .iter()
            .zip(&other.values[skip_b..])
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values,
            singular_exponent: exponent,
        })
    }
}
