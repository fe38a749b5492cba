//! Front end of the `fracpicard` binary: reads a problem file, runs one of the
//! modes and writes CSV tables with a one-line header and 17 significant
//! digits per number.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when the numerical result
//! is not acceptable (Picard iteration did not converge, the iterates blew up,
//! or a verification check failed).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fracpicard::{
    check_equivalence, initial_limit_checks, lemma2_decay, parse_rhs, solve, Grid, GridError,
    LinearOracle, ProblemConfig, ProblemError, SolutionTrajectory, SolveError, SolveOptions,
    ValidatedProblem,
};
use rayon::prelude::*;
use thiserror::Error;

pub use args::{Mode, RunConfig};

/// Caps the worker threads used by study mode.
pub const THREADS_ENV: &str = "FRACPICARD_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("solve failed: {0}")]
    Solve(#[from] SolveError),
    #[error(
        "no exact solution: pass --exact or use a right-hand side c*zk whose inner order is 0"
    )]
    NoOracle,
    #[error("exact solution: {0}")]
    Exact(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solve(SolveError::NonFinite { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Not converged, or a verification check failed.
    Rejected,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Rejected => 2,
        }
    }
}

/// Relative slack on the continuous bound for `|I^{α-k} φ(t_1)|`: the
/// discrete operator extrapolates `t^γ φ` to the origin, which may overshoot.
const BOUND_SLACK: f64 = 1e-2;

type Exact = Box<dyn Fn(f64) -> Result<f64, String> + Send + Sync>;

pub fn run(cfg: &RunConfig) -> Result<Status, CliError> {
    cfg.check().map_err(CliError::Usage)?;
    let text = fs::read_to_string(&cfg.config).map_err(|source| CliError::Read {
        path: cfg.config.clone(),
        source,
    })?;
    let problem = ProblemConfig::from_json(&text)?.build()?;
    match cfg.mode {
        Mode::Solve => run_solve(cfg, &problem),
        Mode::Verify => run_verify(cfg, &problem),
        Mode::Study => run_study(cfg, &problem),
        Mode::Oracle => run_oracle(cfg, &problem),
    }
}

fn make_grid(horizon: f64, intervals: usize, grading: f64) -> Result<Arc<Grid>, GridError> {
    let g = if grading == 1.0 {
        Grid::uniform(horizon, intervals)?
    } else {
        Grid::graded(horizon, intervals, grading)?
    };
    Ok(Arc::new(g))
}

fn options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        lipschitz: cfg.lipschitz,
    }
}

fn solve_at(
    cfg: &RunConfig,
    problem: &ValidatedProblem,
    intervals: usize,
) -> Result<SolutionTrajectory, CliError> {
    let grid = make_grid(problem.horizon(), intervals, cfg.grading)?;
    Ok(solve(problem, grid, &options(cfg))?)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let wrap = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(r).map_err(wrap)?;
    }
    w.flush().map_err(|e| wrap(e.into()))
}

/// `<stem>.convergence.csv` next to the trajectory file.
pub fn convergence_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    output.with_file_name(format!("{stem}.convergence.csv"))
}

fn report_solve(sol: &SolutionTrajectory) {
    let r = &sol.report;
    println!(
        "converged: {}, iterations: {}, last delta: {:e}, contraction estimate: {:.4} (L = {:.4})",
        r.converged,
        r.iterations_used,
        r.deltas.last().copied().unwrap_or(0.0),
        r.contraction_estimate,
        r.lipschitz
    );
}

fn status_of(sol: &SolutionTrajectory) -> Status {
    if sol.report.converged {
        Status::Success
    } else {
        Status::Rejected
    }
}

fn run_solve(cfg: &RunConfig, problem: &ValidatedProblem) -> Result<Status, CliError> {
    let sol = solve_at(cfg, problem, cfg.n_points)?;
    let m = problem.m();
    let mut header = vec!["t".to_string(), "y".to_string()];
    header.extend((1..=m).map(|k| format!("z{k}")));
    header.push("phi".into());
    let rows: Vec<Vec<String>> = sol
        .grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = vec![num(t), num(sol.y.values()[i])];
            row.extend(sol.derivatives.iter().map(|z| num(z.values()[i])));
            row.push(num(sol.phi.at(i).unwrap_or(f64::NAN)));
            row
        })
        .collect();
    write_csv(&cfg.output, &header, &rows)?;

    let deltas: Vec<Vec<String>> = sol
        .report
        .deltas
        .iter()
        .enumerate()
        .map(|(k, &d)| vec![(k + 1).to_string(), num(d)])
        .collect();
    write_csv(
        &convergence_path(&cfg.output),
        &["iter".into(), "delta".into()],
        &deltas,
    )?;
    report_solve(&sol);
    Ok(status_of(&sol))
}

struct Check {
    name: String,
    value: f64,
    threshold: f64,
    pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

fn run_verify(cfg: &RunConfig, problem: &ValidatedProblem) -> Result<Status, CliError> {
    let mut sol = solve_at(cfg, problem, cfg.n_points)?;
    if cfg.corrupt {
        sol.y = sol.y.map(|v| 1.1 * v);
    }
    let residuals = check_equivalence(&sol, problem);
    let mut checks = vec![
        Check::at_most(
            "picard_delta",
            sol.report.deltas.last().copied().unwrap_or(f64::INFINITY),
            cfg.tol,
        ),
        Check::at_most("ode_residual", residuals.ode_residual, cfg.ode_tol),
        Check::at_most(
            "volterra_residual",
            residuals.volterra_residual,
            cfg.volterra_tol,
        ),
    ];
    for (k, (&e, &b)) in residuals
        .ic_errors
        .iter()
        .zip(problem.initial_values())
        .enumerate()
    {
        checks.push(Check::at_most(
            format!("ic_error_{k}"),
            e,
            cfg.ic_tol * (1.0 + b.abs()),
        ));
    }
    let decay = lemma2_decay(problem.gamma(), 1.0, problem.alpha(), &sol.grid)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    checks.push(Check::at_most(
        "decay_slope_error",
        (decay.slope - decay.expected_slope).abs(),
        cfg.decay_tol,
    ));
    checks.push(Check::at_most(
        "decay_origin_value",
        decay.origin_value.abs(),
        cfg.limit_tol,
    ));
    let limits = initial_limit_checks(problem, &sol).map_err(SolveError::from)?;
    for l in limits {
        let mut c = Check::at_most(format!("initial_limit_{}", l.k), l.value, l.bound);
        c.pass = l.value <= l.bound * (1.0 + BOUND_SLACK) + f64::EPSILON * l.bound.max(1.0);
        checks.push(c);
    }

    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                num(c.value),
                num(c.threshold),
                c.pass.to_string(),
            ]
        })
        .collect();
    let header = ["check", "value", "threshold", "pass"].map(String::from);
    write_csv(&cfg.output, &header, &rows)?;

    report_solve(&sol);
    println!(
        "boundary nodes skipped in the ODE residual: {}",
        residuals.nodes_skipped
    );
    for c in &checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} {:<20} {:.3e} (threshold {:.3e})",
            c.name, c.value, c.threshold
        );
    }
    let all = checks.iter().all(|c| c.pass);
    println!(
        "{}",
        if all {
            "all checks passed"
        } else {
            "verification failed"
        }
    );
    Ok(if all {
        Status::Success
    } else {
        Status::Rejected
    })
}

fn exact_solution(cfg: &RunConfig, problem: &ValidatedProblem) -> Result<Exact, CliError> {
    if let Some(text) = &cfg.exact {
        let e = parse_rhs(text, 0).map_err(|e| CliError::Exact(e.to_string()))?;
        return Ok(Box::new(move |t| e.eval(t, &[]).map_err(|e| e.to_string())));
    }
    let oracle = LinearOracle::detect(problem).ok_or(CliError::NoOracle)?;
    Ok(Box::new(move |t| oracle.eval(t).map_err(|e| e.to_string())))
}

fn sup_error(sol: &SolutionTrajectory, exact: &Exact) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for (t, v) in sol.y.samples() {
        let e = exact(t).map_err(CliError::Exact)?;
        worst = worst.max((v - e).abs());
    }
    Ok(worst)
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Observed orders `log2(err(N)/err(2N))`; the last level has none.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    out.push(f64::NAN);
    out
}

fn run_study(cfg: &RunConfig, problem: &ValidatedProblem) -> Result<Status, CliError> {
    let exact = exact_solution(cfg, problem)?;
    let levels: Vec<usize> = (0..cfg.levels).map(|k| cfg.n_points << k).collect();
    let sweep = || -> Vec<Result<(f64, usize, bool), CliError>> {
        levels
            .par_iter()
            .map(|&n| {
                let sol = solve_at(cfg, problem, n)?;
                let err = sup_error(&sol, &exact)?;
                Ok((err, sol.report.iterations_used, sol.report.converged))
            })
            .collect()
    };
    let results = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(sweep),
        None => sweep(),
    };
    let results: Vec<(f64, usize, bool)> = results.into_iter().collect::<Result<_, _>>()?;
    let errors: Vec<f64> = results.iter().map(|r| r.0).collect();
    let orders = observed_orders(&errors);

    let header = ["N", "sup_error", "observed_order", "iterations"].map(String::from);
    let rows: Vec<Vec<String>> = levels
        .iter()
        .zip(&results)
        .zip(&orders)
        .map(|((n, r), o)| vec![n.to_string(), num(r.0), num(*o), r.1.to_string()])
        .collect();
    write_csv(&cfg.output, &header, &rows)?;
    println!(
        "{:>8} {:>12} {:>8} {:>6}",
        "N", "sup_error", "order", "iters"
    );
    for ((n, r), o) in levels.iter().zip(&results).zip(&orders) {
        println!("{n:>8} {:>12.4e} {o:>8.3} {:>6}", r.0, r.1);
    }
    let converged = results.iter().all(|r| r.2);
    Ok(if converged {
        Status::Success
    } else {
        Status::Rejected
    })
}

fn run_oracle(cfg: &RunConfig, problem: &ValidatedProblem) -> Result<Status, CliError> {
    let exact = exact_solution(cfg, problem)?;
    let sol = solve_at(cfg, problem, cfg.n_points)?;
    let mut rows = Vec::with_capacity(sol.grid.len());
    let mut worst: f64 = 0.0;
    for (t, v) in sol.y.samples() {
        let e = exact(t).map_err(CliError::Exact)?;
        worst = worst.max((v - e).abs());
        rows.push(vec![num(t), num(v), num(e), num((v - e).abs())]);
    }
    let header = ["t", "y", "y_exact", "abs_error"].map(String::from);
    write_csv(&cfg.output, &header, &rows)?;
    report_solve(&sol);
    println!("sup error against the exact solution: {worst:e}");
    Ok(status_of(&sol))
}
