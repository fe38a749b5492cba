use std::path::PathBuf;

use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Solve and write the trajectory and the Picard deltas.
    Solve,
    /// Solve, then check residuals, initial values and limits at the origin.
    Verify,
    /// Dyadic refinement study against an exact solution.
    Study,
    /// Numerical solution next to the exact one on the same grid.
    Oracle,
}

/// Picard solver for multi-term Caputo fractional differential equations.
#[derive(Debug, Clone, Parser)]
#[command(name = "fracpicard", version)]
pub struct RunConfig {
    /// Problem file (JSON).
    #[arg(long)]
    pub config: PathBuf,

    #[arg(long, value_enum, default_value_t = Mode::Solve)]
    pub mode: Mode,

    /// Number of grid intervals N; the first level in study mode.
    #[arg(long, default_value_t = 1024)]
    pub n_points: usize,

    /// Grading exponent r of the nodes t_j = T (j/N)^r; 1 is uniform.
    #[arg(long, default_value_t = 1.0)]
    pub grading: f64,

    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,

    /// CSV output path.
    #[arg(long)]
    pub output: PathBuf,

    /// Lipschitz constant for the contraction diagnostic; estimated if absent.
    #[arg(long)]
    pub lipschitz: Option<f64>,

    /// Exact solution y(t) for study and oracle modes, e.g. "t^2".
    #[arg(long)]
    pub exact: Option<String>,

    /// Refinement levels in study mode.
    #[arg(long, default_value_t = 4)]
    pub levels: u32,

    /// Verify threshold for the ODE residual.
    #[arg(long, default_value_t = 1e-3)]
    pub ode_tol: f64,

    /// Verify threshold for the Volterra residual.
    #[arg(long, default_value_t = 1e-3)]
    pub volterra_tol: f64,

    /// Verify threshold for |D^k y(+0) - b_k|, scaled by 1 + |b_k|.
    #[arg(long, default_value_t = 5e-2)]
    pub ic_tol: f64,

    /// Verify threshold for the decay slope of I^α t^-γ near the origin.
    #[arg(long, default_value_t = 5e-2)]
    pub decay_tol: f64,

    /// Verify threshold for I^α t^-γ at the origin.
    #[arg(long, default_value_t = 1e-3)]
    pub limit_tol: f64,

    /// Scale y by 1.1 before verification (negative control).
    #[arg(long)]
    pub corrupt: bool,
}

impl RunConfig {
    pub fn check(&self) -> Result<(), String> {
        if self.n_points < 16 {
            return Err(format!(
                "--n-points must be at least 16, got {}",
                self.n_points
            ));
        }
        if !(self.grading >= 1.0) || !self.grading.is_finite() {
            return Err(format!(
                "--grading must be finite and >= 1, got {}",
                self.grading
            ));
        }
        if !(self.tol > 0.0) {
            return Err(format!("--tol must be positive, got {}", self.tol));
        }
        if self.mode == Mode::Study {
            if !self.n_points.is_power_of_two() {
                return Err(format!(
                    "--n-points must be a power of two in study mode, got {}",
                    self.n_points
                ));
            }
            if self.levels < 2 {
                return Err("--levels must be at least 2".into());
            }
        }
        Ok(())
    }
}
