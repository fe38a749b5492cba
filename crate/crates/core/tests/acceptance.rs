//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use fracpicard::verification::{initial_condition_errors, sup_error};
use fracpicard::{
    check_equivalence, composition_identity, lemma2_decay, parse_rhs, solve_uniform,
    FracIntegralOperator, Grid, ProblemConfig, SampledFunction, SolveOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ml_config() -> ProblemConfig {
    ProblemConfig {
        alpha: 0.5,
        derivative_orders: vec![0.0],
        initial_values: vec![1.0],
        horizon: 1.0,
        gamma: 0.0,
        rhs: "-z1".into(),
    }
}

fn square_config() -> ProblemConfig {
    ProblemConfig {
        alpha: 1.5,
        derivative_orders: vec![0.5],
        initial_values: vec![0.0, 0.0],
        horizon: 1.0,
        gamma: 0.0,
        rhs: "2*t^0.5/0.88622692545 + 0*z1".into(),
    }
}

/// `E_{1/2}(-√t) = e^t erfc(√t)`.
fn ml_exact(t: f64) -> f64 {
    t.exp() * erfc(t.sqrt())
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn mittag_leffler_oracle() -> Outcome {
    let p = ml_config().build().map_err(|e| e.to_string())?;
    let opts = SolveOptions::default();
    let start = Instant::now();
    let sol = solve_uniform(&p, 1024, &opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let err = sup_error(&sol.y, ml_exact);
    let y1 = *sol.y.values().last().unwrap();
    let mut errors = Vec::new();
    for n in [128, 256, 512, 1024, 2048] {
        let s = solve_uniform(&p, n, &opts).map_err(|e| e.to_string())?;
        errors.push(sup_error(&s.y, ml_exact));
    }
    let ord = orders(&errors);
    let min_order = ord.iter().copied().fold(f64::INFINITY, f64::min);
    check(
        err <= 1e-2 && min_order >= 0.9 && (y1 - 0.4276).abs() <= 5e-3 && elapsed < 5.0,
        format!("sup error {err:.3e}, orders {ord:.3?}, y(1) = {y1:.6}, solve time {elapsed:.3} s"),
    )
}

fn manufactured_square() -> Outcome {
    let p = square_config().build().map_err(|e| e.to_string())?;
    let sol = solve_uniform(&p, 1024, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let err = sup_error(&sol.y, |t| t * t);
    let r = check_equivalence(&sol, &p);
    check(
        err <= 1e-4 && r.ode_residual <= 1e-3 && r.volterra_residual <= 1e-3,
        format!(
            "sup error {err:.3e}, ode residual {:.3e}, volterra residual {:.3e}",
            r.ode_residual, r.volterra_residual
        ),
    )
}

fn integer_order_reduction() -> Outcome {
    let cos = ProblemConfig {
        alpha: 2.0,
        derivative_orders: vec![0.0],
        initial_values: vec![1.0, 0.0],
        horizon: std::f64::consts::TAU,
        gamma: 0.0,
        rhs: "-z1".into(),
    }
    .build()
    .map_err(|e| e.to_string())?;
    let exp = ProblemConfig {
        alpha: 1.0,
        derivative_orders: vec![0.0],
        initial_values: vec![1.0],
        horizon: 1.0,
        gamma: 0.0,
        rhs: "z1".into(),
    }
    .build()
    .map_err(|e| e.to_string())?;
    let opts = SolveOptions::default();
    let s_cos = solve_uniform(&cos, 2048, &opts).map_err(|e| e.to_string())?;
    let s_exp = solve_uniform(&exp, 1024, &opts).map_err(|e| e.to_string())?;
    let e_cos = sup_error(&s_cos.y, f64::cos);
    let e_exp = sup_error(&s_exp.y, f64::exp);
    check(
        s_cos.report.converged && s_exp.report.converged && e_cos <= 1e-3 && e_exp <= 1e-4,
        format!("cos error {e_cos:.3e} (N = 2048), exp error {e_exp:.3e} (N = 1024)"),
    )
}

/// Grading that puts the first node at `t_1 = target` on `intervals` intervals.
fn grading_for_first_node(target: f64, intervals: usize) -> f64 {
    (target.ln() / (1.0 / intervals as f64).ln()).max(1.0)
}

fn decay_sweep() -> Outcome {
    let uniform = Arc::new(Grid::uniform(1.0, 1024).map_err(|e| e.to_string())?);
    let mut worst_slope: f64 = 0.0;
    let mut worst_limit: f64 = 0.0;
    let mut cases = 0;
    let mut failures = Vec::new();
    for alpha in [0.3, 0.5, 0.9, 1.5, 2.5] {
        for g in [0.0, 0.25, 0.5] {
            if !(g < alpha) {
                continue;
            }
            cases += 1;
            let r = lemma2_decay(g, 1.0, alpha, &uniform).map_err(|e| e.to_string())?;
            // first node pushed towards the origin until t_1^{α-γ} is 1e-4
            let target = 1e-4f64.powf(1.0 / (alpha - g));
            let graded = Arc::new(
                Grid::graded(1.0, 64, grading_for_first_node(target, 64))
                    .map_err(|e| e.to_string())?,
            );
            let near = lemma2_decay(g, 1.0, alpha, &graded).map_err(|e| e.to_string())?;
            let slope_err = (r.slope - r.expected_slope).abs();
            let limit = r.origin_value.abs().max(near.first_node_value.abs());
            worst_slope = worst_slope.max(slope_err);
            worst_limit = worst_limit.max(limit);
            if slope_err > 0.05 || limit > 1e-3 {
                failures.push(format!(
                    "(α={alpha}, γ={g}): slope {:.4}, limit {limit:.2e}",
                    r.slope
                ));
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{cases} pairs, max |slope - (α-γ)| = {worst_slope:.4}, max value near 0 = {worst_limit:.2e}{}",
            if failures.is_empty() { String::new() } else { format!("; failing {failures:?}") }
        ),
    )
}

fn composition() -> Outcome {
    let grid = Arc::new(Grid::uniform(1.0, 1024).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let polys: Vec<Vec<f64>> = (0..5)
        .map(|i| {
            let degree = if i == 0 { 5 } else { rng.random_range(2..=5) };
            (0..=degree).map(|_| rng.random_range(-2.0..2.0)).collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut worst_low: f64 = 0.0;
    for alpha in [1.25, 1.5, 1.75] {
        for c in &polys {
            worst = worst.max(composition_identity(c, alpha, &grid).map_err(|e| e.to_string())?);
            let low = &c[..2];
            worst_low =
                worst_low.max(composition_identity(low, alpha, &grid).map_err(|e| e.to_string())?);
        }
    }
    check(
        worst <= 1e-3 && worst_low <= 1e-12,
        format!("max defect {worst:.3e}, max defect for degree < n {worst_low:.1e}"),
    )
}

fn contraction_ratio() -> Outcome {
    let p = ProblemConfig {
        alpha: 0.5,
        derivative_orders: vec![0.0],
        initial_values: vec![1.0],
        horizon: 0.25,
        gamma: 0.0,
        rhs: "-z1".into(),
    }
    .build()
    .map_err(|e| e.to_string())?;
    let opts = SolveOptions {
        lipschitz: Some(1.0),
        ..SolveOptions::default()
    };
    let sol = solve_uniform(&p, 1024, &opts).map_err(|e| e.to_string())?;
    let d = &sol.report.deltas;
    let ratios: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let omega = sol.report.contraction_estimate;
    check(
        sol.report.converged && max_ratio <= 0.67 && (omega - 0.5642).abs() < 1e-4,
        format!(
            "omega {omega:.4}, {} iterations, max delta ratio {max_ratio:.4}",
            d.len()
        ),
    )
}

fn initial_conditions() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for cfg in [ml_config(), square_config()] {
        let p = cfg.build().map_err(|e| e.to_string())?;
        let sol = solve_uniform(&p, 1024, &SolveOptions::default()).map_err(|e| e.to_string())?;
        let errs = initial_condition_errors(&sol.y, p.initial_values());
        for (k, (&e, &b)) in errs.iter().zip(p.initial_values()).enumerate() {
            ok &= e <= 5e-2 * (1.0 + b.abs());
            lines.push(format!("k={k}: {e:.2e}"));
        }
    }
    check(ok, lines.join(", "))
}

fn quadrature_exactness() -> Outcome {
    let grids = [
        Arc::new(Grid::uniform(1.0, 1024).map_err(|e| e.to_string())?),
        Arc::new(Grid::graded(2.0, 256, 2.0).map_err(|e| e.to_string())?),
    ];
    let mut worst: f64 = 0.0;
    for beta in [0.3, 0.5, 1.0, 1.7, 2.5] {
        for g in &grids {
            let op = FracIntegralOperator::new(beta, Arc::clone(g)).map_err(|e| e.to_string())?;
            let r = op
                .apply(&SampledFunction::from_fn(Arc::clone(g), |_| 1.0))
                .map_err(|e| e.to_string())?;
            for (t, v) in r.samples().skip(1) {
                let exact = t.powf(beta) / gamma(beta + 1.0);
                worst = worst.max((v - exact).abs() / exact);
            }
        }
    }
    check(worst <= 1e-13, format!("max relative error {worst:.2e}"))
}

fn parser_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut mismatches = Vec::new();
    for _ in 0..1000 {
        let m = rng.random_range(0..=3);
        let text = common::random_expression(&mut rng, m, 4);
        let t = rng.random_range(0.0..2.0);
        let z: Vec<f64> = (0..m).map(|_| rng.random_range(-3.0..3.0)).collect();
        let ours = parse_rhs(&text, m)
            .map_err(|e| e.to_string())
            .and_then(|e| e.eval(t, &z).map_err(|e| e.to_string()));
        let theirs = common::shunting_yard_eval(&text, t, &z);
        match (ours, theirs) {
            (Ok(a), Ok(b)) if a == b || (a - b).abs() <= 1e-12 * b.abs().max(1.0) => {
                worst = worst.max((a - b).abs() / b.abs().max(1.0));
            }
            (a, b) => mismatches.push(format!("{text}: {a:?} vs {b:?}")),
        }
    }
    let matrix = common::invalid_matrix();
    let mut unmatched = Vec::new();
    for (cfg, kind) in &matrix {
        match common::rejected_kinds(cfg) {
            Some(kinds) if kinds.contains(kind) => {}
            other => unmatched.push(format!("expected {kind}, got {other:?}")),
        }
    }
    check(
        mismatches.is_empty() && unmatched.is_empty() && matrix.len() == 50,
        format!(
            "1000 expressions, max relative difference {worst:.1e}, {} mismatches; {}/{} invalid configs named correctly{}",
            mismatches.len(),
            matrix.len() - unmatched.len(),
            matrix.len(),
            if mismatches.is_empty() && unmatched.is_empty() {
                String::new()
            } else {
                format!("; {:?} {:?}", mismatches.first(), unmatched.first())
            }
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("Mittag-Leffler oracle", mittag_leffler_oracle),
        ("manufactured solution t^2", manufactured_square),
        ("integer-order reduction", integer_order_reduction),
        ("decay of I^α t^-γ at the origin", decay_sweep),
        ("composition identity", composition),
        ("contraction diagnostic", contraction_ratio),
        ("initial-condition recovery", initial_conditions),
        ("quadrature exactness on constants", quadrature_exactness),
        ("parser oracle and invalid configs", parser_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {}: {name}: {detail} [{secs:.2} s]", i + 1);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
