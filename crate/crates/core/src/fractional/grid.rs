use crate::error::GridError;

/// Monotone time mesh `0 = t_0 < t_1 < … < t_N = T`.
///
/// Graded meshes place `t_i = T (i/N)^r`; `r = 1` is the uniform mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    grading: f64,
    uniform: bool,
}

impl Grid {
    pub fn uniform(horizon: f64, intervals: usize) -> Result<Self, GridError> {
        Self::graded(horizon, intervals, 1.0)
    }

    pub fn graded(horizon: f64, intervals: usize, grading: f64) -> Result<Self, GridError> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(GridError::BadHorizon(horizon));
        }
        if intervals < 2 {
            return Err(GridError::TooFewIntervals(intervals));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(GridError::BadGrading(grading));
        }
        let n = intervals as f64;
        let nodes: Vec<f64> = (0..=intervals)
            .map(|i| {
                if i == intervals {
                    horizon
                } else if grading == 1.0 {
                    horizon * (i as f64 / n)
                } else {
                    horizon * (i as f64 / n).powf(grading)
                }
            })
            .collect();
        // Strong grading can collapse the first nodes in floating point.
        if let Some(index) = (1..nodes.len()).find(|&i| nodes[i] <= nodes[i - 1]) {
            return Err(GridError::NotIncreasing { index });
        }
        Ok(Self {
            nodes,
            grading,
            uniform: grading == 1.0,
        })
    }

    /// Arbitrary mesh. It is treated as non-uniform even if equispaced.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, GridError> {
        if nodes.len() < 3 {
            return Err(GridError::TooFewIntervals(nodes.len().saturating_sub(1)));
        }
        if nodes[0] != 0.0 {
            return Err(GridError::BadOrigin(nodes[0]));
        }
        let last = nodes[nodes.len() - 1];
        if !(last > 0.0) || !last.is_finite() {
            return Err(GridError::BadHorizon(last));
        }
        if let Some(index) = (1..nodes.len()).find(|&i| !(nodes[i] > nodes[i - 1])) {
            return Err(GridError::NotIncreasing { index });
        }
        Ok(Self {
            nodes,
            grading: f64::NAN,
            uniform: false,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of subintervals `N`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Mesh exponent `r`; NaN for meshes built from explicit nodes.
    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Constant step size of a uniform mesh.
    pub fn step(&self) -> Option<f64> {
        self.uniform
            .then(|| self.horizon() / self.intervals() as f64)
    }
}
