//! Gamma and lower incomplete gamma functions in logarithmic form.
//!
//! Weighted monomial norms span hundreds of orders of magnitude, so
//! everything here returns logarithms. The lower incomplete gamma function
//! is evaluated in the scaled form `γ(s, x) / x^s`, which stays finite at
//! `x = 0` (where it equals `1/s`) and never overflows for the shapes used
//! by the Bergman-space code.

use crate::error::{Error, Result};

const MAX_ITER: usize = 100_000;
const EPS: f64 = 1e-17;
const FPMIN: f64 = 1e-300;

/// Bernoulli coefficients B_{2j} / (2j (2j-1)) of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(x)` for `x > 0`.
///
/// Stirling series above 15, upward recurrence below. Absolute error is a
/// few ulps of the result.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    let mut shift = 0.0;
    let mut prod = 1.0;
    let mut y = x;
    while y < 15.0 {
        prod *= y;
        y += 1.0;
        // keep the running product in range for tiny arguments
        if prod > 1e200 {
            shift += prod.ln();
            prod = 1.0;
        }
    }
    shift += prod.ln();
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (y - 0.5) * y.ln() - y + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// `ln(γ(s, x) / x^s)` for `s > 0`, `x ≥ 0`.
///
/// Power series below `x = s + 1`, Lentz continued fraction for the upper
/// function above it.
pub fn ln_lower_gamma_scaled(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !(x >= 0.0) || !s.is_finite() || !x.is_finite() {
        return Err(Error::param(
            "incomplete gamma",
            format!("need s > 0 and x >= 0, got s = {s}, x = {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(-s.ln());
    }
    if x < s + 1.0 {
        series_scaled(s, x)
    } else {
        let ln_h = upper_fraction(s, x)?;
        let ln_gamma_over_pow = ln_gamma(s) - s * x.ln();
        // Q(s, x) = exp(-x + s ln x - ln Γ(s) + ln h)
        let q = (-x - ln_gamma_over_pow + ln_h).exp();
        Ok(ln_gamma_over_pow + (-q).ln_1p())
    }
}

/// `ln γ(s, x)`.
pub fn ln_lower_gamma(s: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(s * x.ln() + ln_lower_gamma_scaled(s, x)?)
}

/// Regularized lower incomplete gamma `P(s, x) = γ(s, x) / Γ(s)`.
pub fn gamma_p(s: f64, x: f64) -> Result<f64> {
    Ok((ln_lower_gamma(s, x)? - ln_gamma(s)).exp().min(1.0))
}

fn series_scaled(s: f64, x: f64) -> Result<f64> {
    // γ(s,x)/x^s = e^{-x} Σ_j x^j / (s (s+1) ... (s+j))
    let mut term = 1.0 / s;
    let mut sum = term;
    for j in 1..MAX_ITER {
        term *= x / (s + j as f64);
        sum += term;
        if term < sum * EPS {
            return Ok(-x + sum.ln());
        }
    }
    Err(Error::numeric(
        format!("incomplete gamma series did not converge (s = {s}, x = {x})"),
        MAX_ITER,
    ))
}

/// Returns `ln h` where `Γ(s, x) = e^{-x} x^s h`.
fn upper_fraction(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h.ln());
        }
    }
    Err(Error::numeric(
        format!("incomplete gamma continued fraction did not converge (s = {s}, x = {x})"),
        MAX_ITER,
    ))
}

/// `ln Σ exp(v)` over the slice; `-∞` for an empty slice.
pub fn ln_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln(e^a - e^b)` for `a > b`.
pub fn ln_diff_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp()).ln_1p()
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial(n: u64) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        for n in [1u64, 2, 3, 5, 10, 14, 15, 16, 30, 100, 400] {
            let exact = ln_factorial(n - 1);
            let got = ln_gamma(n as f64);
            assert!(
                (got - exact).abs() <= 1e-13 * exact.abs().max(1.0),
                "n = {n}: {got} vs {exact}"
            );
        }
        let half = ln_gamma(0.5);
        assert!((half - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn incomplete_gamma_small_shape_closed_form() {
        // γ(1, x) = 1 - e^{-x}
        for x in [0.1, 0.72, 1.9, 2.0, 5.0, 40.0] {
            let got = ln_lower_gamma(1.0, x).unwrap().exp();
            let exact = -(-x).exp_m1();
            assert!((got / exact - 1.0).abs() < 1e-14, "x = {x}");
        }
        // γ(2, x) = 1 - (1 + x) e^{-x}
        for x in [0.3, 2.9, 3.1, 12.0] {
            let got = ln_lower_gamma(2.0, x).unwrap().exp();
            let exact = 1.0 - (1.0 + x) * (-x).exp();
            assert!((got / exact - 1.0).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn branches_agree_at_switchover() {
        for s in [1.0, 7.0, 50.0, 301.0] {
            let x = s + 1.0;
            let below = series_scaled(s, x).unwrap();
            let above = ln_lower_gamma_scaled(s, x).unwrap();
            assert!(
                (below - above).abs() < 1e-12 * below.abs().max(1.0),
                "s = {s}: {below} vs {above}"
            );
        }
    }

    #[test]
    fn scaled_form_at_zero() {
        assert!((ln_lower_gamma_scaled(4.0, 0.0).unwrap() + 4f64.ln()).abs() < 1e-15);
        assert!(ln_lower_gamma_scaled(0.0, 1.0).is_err());
        assert!(ln_lower_gamma_scaled(1.0, -1.0).is_err());
    }

    #[test]
    fn regularized_p_limits() {
        assert!((gamma_p(3.0, 1e3).unwrap() - 1.0).abs() < 1e-15);
        assert!(gamma_p(50.0, 1.0).unwrap() < 1e-60);
    }

    #[test]
    fn log_helpers() {
        let v = [0.0f64.ln(), 1.0f64.ln(), 2.0f64.ln()];
        assert!((ln_sum_exp(&v) - 3f64.ln()).abs() < 1e-15);
        assert!((ln_diff_exp(3f64.ln(), 1f64.ln()) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(factorial(5), 120.0);
    }
}
