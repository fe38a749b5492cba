use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::{EvalError, RhsExpr};

const SEED: u64 = 0x5eed_f00d;
const RELATIVE_STEP: f64 = 1e-4;

/// Empirical Lipschitz constant of `f(t, ·)` in the ℓ¹ norm on `z`.
///
/// Half of the samples compare two independent points of the box, the other
/// half perturb a single coordinate by a small step, which recovers the
/// largest partial derivative of (piecewise) linear functions exactly. The
/// result is a lower bound on the true constant. Sampling is seeded, so the
/// estimate is reproducible.
pub fn estimate_lipschitz(
    expr: &RhsExpr,
    t_range: (f64, f64),
    z_box: &[(f64, f64)],
    samples: usize,
) -> Result<f64, EvalError> {
    if z_box.is_empty() {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let draw = |lo: f64, hi: f64, rng: &mut ChaCha8Rng| {
        if hi > lo {
            rng.random_range(lo..=hi)
        } else {
            lo
        }
    };
    let (t_lo, t_hi) = t_range;
    let mut best: f64 = 0.0;
    let mut z = vec![0.0; z_box.len()];
    let mut w = vec![0.0; z_box.len()];
    for s in 0..samples {
        let t = draw(t_lo, t_hi, &mut rng);
        for (zi, &(lo, hi)) in z.iter_mut().zip(z_box) {
            *zi = draw(lo, hi, &mut rng);
        }
        if s % 2 == 0 {
            for (wi, &(lo, hi)) in w.iter_mut().zip(z_box) {
                *wi = draw(lo, hi, &mut rng);
            }
        } else {
            w.copy_from_slice(&z);
            let k = rng.random_range(0..z_box.len());
            let (lo, hi) = z_box[k];
            let step = RELATIVE_STEP * (hi - lo);
            if step == 0.0 {
                continue;
            }
            w[k] = if z[k] + step <= hi {
                z[k] + step
            } else {
                z[k] - step
            };
        }
        let dist: f64 = z.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
        if dist == 0.0 {
            continue;
        }
        let df = (expr.eval(t, &z)? - expr.eval(t, &w)?).abs();
        if df.is_finite() {
            best = best.max(df / dist);
        }
    }
    Ok(best)
}
