//! Kolmogorov widths of embeddings for polydisc condensers, brackets for
//! the sup-norm widths, and asymptotic slope fits.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bergman::RadialWeight;
use crate::capacity::{product_capacity, CapacityValue, Condenser, ReinhardtCondenser};
use crate::error::{Error, Result};
use crate::multiindex::{ln_tail_sums_upto, rearrange};
use crate::special::factorial;
use crate::toeplitz::{leading_eigenvalues, SymbolSpec};

/// Smallest table length accepted by [`slope_estimate`].
pub const MIN_FIT_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WidthKind {
    HilbertExact,
    SupnormUpper,
    SupnormLower,
}

impl WidthKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WidthKind::HilbertExact => "hilbert-exact",
            WidthKind::SupnormUpper => "supnorm-upper",
            WidthKind::SupnormLower => "supnorm-lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthTable {
    pub kind: WidthKind,
    /// `d_1, d_2, …`; entries below the `f64` range are 0.
    pub values: Vec<f64>,
    /// `log d_m`, always finite.
    pub ln_values: Vec<f64>,
    pub k: f64,
    pub condenser: Option<ReinhardtCondenser>,
}

impl WidthTable {
    /// `d_m` for the 1-based index `m`.
    pub fn d(&self, m: usize) -> f64 {
        self.values[m - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,d_m,kind\n");
        for (i, (v, ln)) in self.values.iter().zip(&self.ln_values).enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                i + 1,
                format_width(*v, *ln),
                self.kind.as_str()
            ));
        }
        out
    }

    fn from_logs(kind: WidthKind, ln_values: Vec<f64>, k: f64, cond: &ReinhardtCondenser) -> Self {
        Self {
            kind,
            values: ln_values.iter().map(|l| l.exp()).collect(),
            ln_values,
            k,
            condenser: Some(cond.clone()),
        }
    }
}

/// Shortest round-trip form for normal doubles, otherwise `mantissa e exponent`
/// reconstructed from the logarithm.
fn format_width(value: f64, ln_value: f64) -> String {
    if value >= f64::MIN_POSITIVE {
        return format!("{value:?}");
    }
    let log10 = ln_value / std::f64::consts::LN_10;
    let mut exp = log10.floor();
    let mut mant = 10f64.powf(log10 - exp);
    if mant >= 9.9999999999995 {
        mant = 1.0;
        exp += 1.0;
    }
    format!("{mant:.12}e{exp}")
}

/// Widths of `H²_{kφ}(P(a)) → L²_{kφ}(P(b))`, i.e. square roots of the
/// Toeplitz eigenvalues for the indicator of `P(b)`.
///
/// Without a weight (or at `k = 0`) these are the rearranged products
/// `∏ (b_k/a_k)^{ν_k+1}`.
pub fn embedding_widths(
    cond: &ReinhardtCondenser,
    k: f64,
    weight: Option<&RadialWeight>,
    count: usize,
) -> Result<WidthTable> {
    let values: (Vec<f64>, Vec<f64>) = match weight {
        Some(w) if k > 0.0 => {
            if w.radii() != cond.outer() {
                return Err(Error::param(
                    "weight",
                    "weight radii must equal the outer radii of the condenser",
                ));
            }
            let sym = SymbolSpec::Polydisc {
                rho: cond.inner().to_vec(),
            };
            let lambdas = leading_eigenvalues(w, k, &sym, count)?;
            let ln_values = lambdas.iter().map(|l| 0.5 * l.ln()).collect();
            return Ok(WidthTable::from_logs(
                WidthKind::HilbertExact,
                ln_values,
                k,
                cond,
            ));
        }
        _ => {
            if !(k == 0.0) {
                return Err(Error::param("k", "a weight is required for k > 0"));
            }
            let geom = cond.geometry();
            let alpha = geom.alpha();
            let ln_prod: f64 = alpha.iter().map(|a| a.ln()).sum();
            let seq = rearrange(&geom, count)?;
            let values = seq
                .iter_nu()
                .map(|nu| {
                    nu.iter()
                        .zip(alpha)
                        .map(|(&v, a)| a.powi(v as i32 + 1))
                        .product()
                })
                .collect();
            let ln_values = seq.log_gammas().iter().map(|g| g + ln_prod).collect();
            (values, ln_values)
        }
    };
    let (values, ln_values) = values;
    Ok(WidthTable {
        kind: WidthKind::HilbertExact,
        values,
        ln_values,
        k,
        condenser: Some(cond.clone()),
    })
}

/// Default shrink factor `√(max_k b_k/a_k)`.
pub fn default_shrink(cond: &ReinhardtCondenser) -> f64 {
    cond.geometry()
        .alpha()
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .sqrt()
}

/// Bracket for the sup-norm widths.
///
/// * upper: `a_m(H^∞(P(a)) → A(K)) ≤ Σ_{l≥m} γ_l`, the Cauchy-estimate
///   error of the rank `m-1` staircase truncation.
/// * lower: `d_m(H^∞(P(sa)) → A(K)) ≥ d_m(H²(P(a)) → L²(K)) / (‖J₁‖ √m(K))`
///   with `‖J₁‖ ≤ sup_{P(sa)} B_{P(a)}(z,z)^{1/2} = ∏ 1/(√π a_k (1 - s²))`.
pub fn supnorm_bounds(
    cond: &ReinhardtCondenser,
    count: usize,
    shrink: Option<f64>,
) -> Result<(WidthTable, WidthTable)> {
    let s = shrink.unwrap_or_else(|| default_shrink(cond));
    let max_ratio = cond.geometry().alpha().iter().copied().fold(0.0, f64::max);
    if !(s > max_ratio && s < 1.0) {
        return Err(Error::param(
            "shrink",
            format!("must lie in ({max_ratio}, 1), got {s}"),
        ));
    }
    let hilbert = embedding_widths(cond, 0.0, None, count)?;
    let j1_norm: f64 = cond
        .outer()
        .iter()
        .map(|a| 1.0 / (PI.sqrt() * a * (1.0 - s * s)))
        .product();
    let vol_k: f64 = cond.inner().iter().map(|b| PI * b * b).product();
    let ln_scale = -(j1_norm * vol_k.sqrt()).ln();
    let lower = WidthTable::from_logs(
        WidthKind::SupnormLower,
        hilbert.ln_values.iter().map(|d| d + ln_scale).collect(),
        0.0,
        cond,
    );
    let (_, tails) = ln_tail_sums_upto(&cond.geometry(), count)?;
    let upper = WidthTable::from_logs(WidthKind::SupnormUpper, tails[..count].to_vec(), 0.0, cond);
    Ok((lower, upper))
}

/// `2π (n!/C)^{1/n}`.
pub fn target_slope(capacity: &CapacityValue, n: usize) -> f64 {
    2.0 * PI * (factorial(n) / capacity.value).powf(1.0 / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Inclusive 1-based index window.
    pub window: (usize, usize),
    pub target: Option<f64>,
    pub relative_error: Option<f64>,
}

/// Least-squares line through `(m^{1/n}, -log d_m)` over `m ∈ [M/2, M]`.
pub fn slope_estimate(table: &WidthTable, n: usize) -> Result<SlopeEstimate> {
    let len = table.len();
    if len < MIN_FIT_LEN {
        return Err(Error::param(
            "M",
            format!("need at least {MIN_FIT_LEN} widths, got {len}"),
        ));
    }
    if n == 0 {
        return Err(Error::param("n", "dimension must be positive"));
    }
    if let Some((i, _)) = table
        .ln_values
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite())
    {
        return Err(Error::Data(format!(
            "d_{} = {} is not positive and finite",
            i + 1,
            table.values[i]
        )));
    }
    let lo = len / 2;
    let pts: Vec<(f64, f64)> = (lo..=len)
        .map(|m| ((m as f64).powf(1.0 / n as f64), -table.ln_values[m - 1]))
        .collect();
    let count = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / count)
        .sqrt();
    let target = table
        .condenser
        .as_ref()
        .map(|c| target_slope(&product_capacity(c), c.dim()));
    Ok(SlopeEstimate {
        slope,
        intercept,
        residual,
        window: (lo, len),
        target,
        relative_error: target.map(|t| (slope - t).abs() / t),
    })
}

/// Outcome of a three-circles check for one polynomial and one `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoConstants {
    /// `sup_{K_c} |f|`.
    pub lhs: f64,
    /// `(sup_K |f|)^{1-c}`.
    pub rhs: f64,
}

/// Samples used for sup-norms on circles, before local refinement.
const CIRCLE_SAMPLES: usize = 8192;

/// `max_{|z| = r} |f(z)|` for a polynomial with coefficients `coeffs`.
pub fn circle_sup(coeffs: &[crate::Complex64], r: f64) -> f64 {
    let eval = |theta: f64| {
        let z = crate::Complex64::from_polar(r, theta);
        coeffs
            .iter()
            .rev()
            .fold(crate::Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
            .norm()
    };
    let step = 2.0 * PI / CIRCLE_SAMPLES as f64;
    let samples: Vec<f64> = (0..CIRCLE_SAMPLES).map(|i| eval(i as f64 * step)).collect();
    let mut best = samples.iter().copied().fold(0.0, f64::max);
    // refine around every local maximum within 1% of the sampled peak
    for i in 0..CIRCLE_SAMPLES {
        let (prev, next) = (
            samples[(i + CIRCLE_SAMPLES - 1) % CIRCLE_SAMPLES],
            samples[(i + 1) % CIRCLE_SAMPLES],
        );
        if samples[i] >= prev && samples[i] >= next && samples[i] >= 0.99 * best {
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let (mut lo, mut hi) = ((i as f64 - 1.0) * step, (i as f64 + 1.0) * step);
            for _ in 0..80 {
                let m1 = hi - g * (hi - lo);
                let m2 = lo + g * (hi - lo);
                if eval(m1) < eval(m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            best = best.max(eval(0.5 * (lo + hi)));
        }
    }
    best
}

/// For `n = 1`: with `f` scaled so that `Σ |f_j| a^j = 1` (hence `sup_D |f| ≤ 1`),
/// compares `sup_{K_c}|f|` against `(sup_K |f|)^{1-c}`.
pub fn two_constants(
    cond: &ReinhardtCondenser,
    coeffs: &[crate::Complex64],
    c: f64,
) -> Result<TwoConstants> {
    if cond.dim() != 1 {
        return Err(Error::param(
            "condenser",
            "two-constants check is one-dimensional",
        ));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::param("c", format!("must lie in (0, 1), got {c}")));
    }
    let (a, b) = (cond.outer()[0], cond.inner()[0]);
    let norm: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(j, f)| f.norm() * a.powi(j as i32))
        .sum();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Data("polynomial must be non-zero and finite".into()));
    }
    let scaled: Vec<crate::Complex64> = coeffs.iter().map(|f| f / norm).collect();
    let rc = a * (b / a).powf(1.0 - c);
    Ok(TwoConstants {
        lhs: circle_sup(&scaled, rc),
        rhs: circle_sup(&scaled, b).powf(1.0 - c),
    })
}

/// Worst ratios found when checking `s_m(J∘R) ≤ ‖R‖ s_m(J)` and
/// `s_m(J∘R) ≤ ‖J‖ s_m(R)` for `R: H²(P(a')) → H²(P(a))` and
/// `J: H²(P(a)) → L²(P(b))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Submultiplicativity {
    /// `max_m s_m(JR) / (‖R‖ s_m(J))`.
    pub left: f64,
    /// `max_m s_m(JR) / (‖J‖ s_m(R))`.
    pub right: f64,
}

pub fn submultiplicativity(
    cond: &ReinhardtCondenser,
    a_prime: &[f64],
    count: usize,
) -> Result<Submultiplicativity> {
    let big_to_k = ReinhardtCondenser::new(a_prime.to_vec(), cond.inner().to_vec())?;
    let big_to_d = ReinhardtCondenser::new(a_prime.to_vec(), cond.outer().to_vec())?;
    let jr = embedding_widths(&big_to_k, 0.0, None, count)?;
    let j = embedding_widths(cond, 0.0, None, count)?;
    let r = embedding_widths(&big_to_d, 0.0, None, count)?;
    let norm_r = r.d(1);
    let norm_j = j.d(1);
    let mut out = Submultiplicativity {
        left: 0.0,
        right: 0.0,
    };
    for m in 1..=count {
        out.left = out.left.max(jr.d(m) / (norm_r * j.d(m)));
        out.right = out.right.max(jr.d(m) / (norm_j * r.d(m)));
    }
    Ok(out)
}
