//! Picard iteration for multi-term fractional differential equations
//!
//! ```text
//! ᶜD^α y(t) = f(t, ᶜD^{α_1} y(t), …, ᶜD^{α_m} y(t)),   y^{(j)}(0) = b_j,  j < ⌈α⌉
//! ```
//!
//! with Caputo derivatives and `α > α_1 > … > α_m ≥ 0`. The unknown iterated
//! on is `φ = ᶜD^α y`, which may carry a weak singularity `t^{-γ}` at the
//! origin. Fractional integrals are discretised by product-trapezoidal
//! quadrature on uniform or graded grids.
//!
//! ```
//! use fracpicard::{solve_uniform, ProblemConfig, SolveOptions};
//!
//! let problem = ProblemConfig {
//!     alpha: 1.0,
//!     derivative_orders: vec![0.0],
//!     initial_values: vec![1.0],
//!     horizon: 1.0,
//!     gamma: 0.0,
//!     rhs: "z1".into(),
//! }
//! .build()
//! .unwrap();
//! let sol = solve_uniform(&problem, 256, &SolveOptions::default()).unwrap();
//! let y1 = *sol.y.values().last().unwrap();
//! assert!((y1 - 1f64.exp()).abs() < 1e-4);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fractional;
pub mod oracle;
pub mod problem;
pub mod solver;
pub mod special;
pub mod verification;

pub use error::{GridError, OperatorError, SpecialFnError};
pub use fractional::{
    apply_integral, build_integral_operator, caputo_derivative, weighted_norm,
    FracIntegralOperator, Grid, SampledFunction,
};
pub use oracle::LinearOracle;
pub use problem::{
    estimate_lipschitz, parse_rhs, validate_problem, EvalError, MultiTermProblem, OrderKind,
    ParseError, ProblemConfig, ProblemError, RhsExpr, ValidatedProblem, Violation,
};
pub use solver::{
    estimate_contraction, solve, solve_uniform, ConvergenceReport, PicardState, SolutionTrajectory,
    SolveError, SolveOptions,
};
pub use special::{gamma, ln_gamma, mittag_leffler, power_kernel, reciprocal_gamma, MLParams};
pub use verification::{
    builtin_suite, check_equivalence, composition_identity, initial_limit_checks, lemma2_decay,
    DecayReport, InitialLimit, ResidualReport, SuiteCase,
};
