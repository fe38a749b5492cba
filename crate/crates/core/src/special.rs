//! Scalar special functions: Gamma, the power kernel `Φ_β`, and the
//! two-parameter Mittag-Leffler function.

use std::f64::consts::PI;

use crate::error::SpecialFnError;

// Lanczos approximation with g = 7, n = 9 (Godfrey's coefficients).
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn lanczos_sum(z: f64) -> f64 {
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Exact `(k-1)!` for integer arguments up to 171, where `Γ` still fits in an f64.
fn factorial_gamma(x: f64) -> Option<f64> {
    if (1.0..=171.0).contains(&x) && x.fract() == 0.0 {
        let k = x as u32;
        Some((1..k).fold(1.0, |acc, i| acc * i as f64))
    } else {
        None
    }
}

/// Gamma function `Γ(x)`.
///
/// Positive integers are evaluated exactly; everything else goes through
/// the Lanczos approximation, with the reflection formula below `x = 0.5`.
pub fn gamma(x: f64) -> Result<f64, SpecialFnError> {
    if x.is_nan() {
        return Err(SpecialFnError::NotFinite(x));
    }
    if is_nonpositive_integer(x) {
        return Err(SpecialFnError::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if let Some(v) = factorial_gamma(x) {
        return v;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // Split the power so that t^(z+1/2) does not overflow before exp(-t) brings it down.
    let half = t.powf((z + 0.5) / 2.0);
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z)
}

/// Natural log of `|Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma(x: f64) -> Result<(f64, f64), SpecialFnError> {
    if x.is_nan() {
        return Err(SpecialFnError::NotFinite(x));
    }
    if is_nonpositive_integer(x) {
        return Err(SpecialFnError::Pole(x));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> (f64, f64) {
    if x < 0.5 {
        let s = (PI * x).sin();
        let (lg, sign) = ln_gamma_unchecked(1.0 - x);
        return ((PI / s.abs()).ln() - lg, sign * s.signum());
    }
    if x <= 171.0 {
        return (gamma_unchecked(x).ln(), 1.0);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (
        LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln(),
        1.0,
    )
}

/// `1/Γ(x)`, which is entire: zero at the poles of `Γ`.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

/// The power kernel `Φ_β(t) = t^(β-1) / Γ(β)`.
///
/// With this normalisation `Σ b_j Φ_{j+1}(t)` is the Taylor polynomial
/// `Σ b_j t^j / j!`, and `I^β f = Φ_β * f`.
pub fn power_kernel(beta: f64, t: f64) -> Result<f64, SpecialFnError> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(SpecialFnError::Domain {
            name: "power_kernel",
            detail: format!("beta must be positive, got {beta}"),
        });
    }
    if !(t >= 0.0) {
        return Err(SpecialFnError::Domain {
            name: "power_kernel",
            detail: format!("t must be non-negative, got {t}"),
        });
    }
    if beta < 1.0 && t == 0.0 {
        return Err(SpecialFnError::Singularity { beta });
    }
    Ok(t.powf(beta - 1.0) / gamma_unchecked(beta))
}

/// Parameters of the truncated Mittag-Leffler series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
    pub tol: f64,
    pub max_terms: usize,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, SpecialFnError> {
        Self::with_tolerance(alpha, beta, 1e-17, 10_000)
    }

    pub fn with_tolerance(
        alpha: f64,
        beta: f64,
        tol: f64,
        max_terms: usize,
    ) -> Result<Self, SpecialFnError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(SpecialFnError::Domain {
                name: "mittag_leffler",
                detail: format!("alpha must be positive, got {alpha}"),
            });
        }
        if !beta.is_finite() {
            return Err(SpecialFnError::NotFinite(beta));
        }
        if !(tol > 0.0) {
            return Err(SpecialFnError::Domain {
                name: "mittag_leffler",
                detail: format!("tol must be positive, got {tol}"),
            });
        }
        if max_terms == 0 {
            return Err(SpecialFnError::Domain {
                name: "mittag_leffler",
                detail: "max_terms must be at least 1".into(),
            });
        }
        Ok(Self {
            alpha,
            beta,
            tol,
            max_terms,
        })
    }
}

/// Two-parameter Mittag-Leffler function `E_{α,β}(z) = Σ z^k / Γ(αk + β)`
/// by direct summation.
///
/// Each term is formed in log space so that neither `z^k` nor `Γ(αk+β)`
/// overflows on its own. Summation stops once a term falls below `tol` while
/// the term magnitudes are decreasing. Large negative `z` loses digits to
/// cancellation; the series is meant for `|z|` up to a few tens.
pub fn mittag_leffler(params: &MLParams, z: f64) -> Result<f64, SpecialFnError> {
    if !z.is_finite() {
        return Err(SpecialFnError::NotFinite(z));
    }
    let MLParams {
        alpha,
        beta,
        tol,
        max_terms,
    } = *params;
    if z == 0.0 {
        return Ok(reciprocal_gamma(beta));
    }
    let ln_abs_z = z.abs().ln();
    let mut sum = 0.0;
    let mut prev_mag = f64::INFINITY;
    for k in 0..max_terms {
        let arg = alpha * k as f64 + beta;
        let term = if is_nonpositive_integer(arg) {
            0.0
        } else {
            let (lg, sign_g) = ln_gamma_unchecked(arg);
            let sign_z = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            sign_z * sign_g * (k as f64 * ln_abs_z - lg).exp()
        };
        sum += term;
        let mag = term.abs();
        if mag < tol && mag <= prev_mag && k > 0 {
            return Ok(sum);
        }
        prev_mag = mag;
    }
    Err(SpecialFnError::NonConvergence {
        terms: max_terms,
        z,
    })
}
