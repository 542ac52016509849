//! Weighted Bergman spaces `H²_{kφ}(P(R))` on polydiscs with diagonal
//! quadratic weights `φ(z) = Σ τ_k |z_k|² + φ₀`.
//!
//! Monomials are orthogonal, and the squared norm of `z^ν` factors over the
//! coordinates. With `s = ν + 1` and `x = 2kτR²` one coordinate contributes
//!
//! ```text
//! 2π ∫_0^R r^{2s-1} e^{-2kτr²} dr = π R^{2s} γ(s, x) / x^s
//! ```
//!
//! and the constant `φ₀` contributes `e^{-2kφ₀}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{ln_lower_gamma_scaled, ln_sum_exp};
use crate::{Complex64, MAX_DIM};

/// Agreement required between the closed form and quadrature, in `ln`.
const VALIDATION_TOL: f64 = 1e-12;
/// Default relative accuracy of truncated kernel sums.
pub const KERNEL_RTOL: f64 = 1e-10;
/// Hard cap on the per-axis truncation degree.
pub const MAX_DEGREE: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialWeight {
    tau: Vec<f64>,
    radii: Vec<f64>,
    offset: f64,
}

impl RadialWeight {
    pub fn new(tau: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        Self::with_offset(tau, radii, 0.0)
    }

    pub fn with_offset(tau: Vec<f64>, radii: Vec<f64>, offset: f64) -> Result<Self> {
        if tau.is_empty() || tau.len() > MAX_DIM || tau.len() != radii.len() {
            return Err(Error::InvalidGeometry(format!(
                "need 1..={MAX_DIM} curvatures matching the radii, got {} and {}",
                tau.len(),
                radii.len()
            )));
        }
        if let Some(t) = tau.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::param(
                "tau",
                format!("must be positive and finite, got {t}"),
            ));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidGeometry(format!(
                "radius must be positive, got {r}"
            )));
        }
        if !offset.is_finite() {
            return Err(Error::param("offset", "must be finite"));
        }
        Ok(Self { tau, radii, offset })
    }

    /// `φ = Σ τ_k (|z_k|² - a_k²)` with `τ_k = 1/(n a_k²)`, so that
    /// `-1 ≤ φ ≤ 0` on `P(a)` and hence on `P(b)`. The bound at the origin
    /// forces `Σ τ_k a_k² ≤ 1`; equal shares maximize `∏ τ_k`.
    pub fn normalized_for(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidGeometry("radii differ in length".into()));
        }
        if let Some((x, y)) = a.iter().zip(b).find(|(x, y)| !(**y > 0.0 && y < x)) {
            return Err(Error::InvalidGeometry(format!(
                "need 0 < b < a, got a = {x}, b = {y}"
            )));
        }
        let n = a.len() as f64;
        let tau: Vec<f64> = a.iter().map(|x| 1.0 / (n * x * x)).collect();
        Self::with_offset(tau, a.to_vec(), -1.0)
    }

    pub fn dim(&self) -> usize {
        self.tau.len()
    }
    pub fn tau(&self) -> &[f64] {
        &self.tau
    }
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn phi(&self, z: &[Complex64]) -> f64 {
        self.offset
            + self
                .tau
                .iter()
                .zip(z)
                .map(|(t, w)| t * w.norm_sqr())
                .sum::<f64>()
    }

    fn check_scale(k: f64) -> Result<()> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::param(
                "k",
                format!("must be finite and >= 0, got {k}"),
            ));
        }
        Ok(())
    }

    fn check_inside(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::OutOfDomain(format!(
                "point has {} coordinates, weight has {}",
                z.len(),
                self.dim()
            )));
        }
        for (w, r) in z.iter().zip(&self.radii) {
            if !(w.norm() < *r) {
                return Err(Error::OutOfDomain(format!(
                    "|z| = {} is not below the radius {r}",
                    w.norm()
                )));
            }
        }
        Ok(())
    }
}

/// `ln(2π ∫_0^ρ r^{2j+1} e^{-2kτr²} dr)` in closed form.
pub fn ln_axis_mass(tau: f64, rho: f64, k: f64, j: usize) -> Result<f64> {
    let s = j as f64 + 1.0;
    let x = 2.0 * k * tau * rho * rho;
    Ok(PI.ln() + 2.0 * s * rho.ln() + ln_lower_gamma_scaled(s, x)?)
}

/// The same quantity by adaptive Gauss–Kronrod quadrature.
pub fn ln_axis_mass_quadrature(tau: f64, rho: f64, k: f64, j: usize) -> Result<f64> {
    let s = j as f64 + 1.0;
    let x = 2.0 * k * tau * rho * rho;
    // 2∫_0^1 u^{2s-1} e^{-xu²} du, scaled by the integrand's maximum
    let log_f = |u: f64| (2.0 * s - 1.0) * u.ln() - x * u * u;
    let u_star = if x > 0.0 {
        ((2.0 * s - 1.0) / (2.0 * x)).sqrt().min(1.0)
    } else {
        1.0
    };
    let peak = log_f(u_star);
    let mut f = |u: f64| {
        if u > 0.0 {
            2.0 * (log_f(u) - peak).exp()
        } else {
            0.0
        }
    };
    // split at the peak so both panels see a monotone integrand
    let mut total = 0.0;
    for (lo, hi) in [(0.0, u_star), (u_star, 1.0)] {
        if hi > lo {
            total += quad::integrate(&mut f, lo, hi, 2e-14, 0.0, 4000)?.value;
        }
    }
    Ok(PI.ln() + 2.0 * s * rho.ln() + peak + total.ln())
}

fn validated_axis_mass(tau: f64, rho: f64, k: f64, j: usize) -> Result<f64> {
    let closed = ln_axis_mass(tau, rho, k, j)?;
    let check = ln_axis_mass_quadrature(tau, rho, k, j)?;
    if (closed - check).abs() > VALIDATION_TOL * closed.abs().max(1.0) {
        return Err(Error::numeric(
            format!("monomial norm disagreement at degree {j}: closed form {closed}, quadrature {check} (ln)"),
            0,
        ));
    }
    Ok(closed)
}

/// `ln ‖z^ν‖²_{kφ}`, cross-validated against quadrature.
pub fn ln_monomial_norm(w: &RadialWeight, k: f64, nu: &[u32]) -> Result<f64> {
    RadialWeight::check_scale(k)?;
    if nu.len() != w.dim() {
        return Err(Error::param(
            "nu",
            format!("expected {} entries, got {}", w.dim(), nu.len()),
        ));
    }
    let mut total = -2.0 * k * w.offset;
    for ((t, r), &j) in w.tau.iter().zip(&w.radii).zip(nu) {
        total += validated_axis_mass(*t, *r, k, j as usize)?;
    }
    Ok(total)
}

pub fn monomial_norm(w: &RadialWeight, k: f64, nu: &[u32]) -> Result<f64> {
    Ok(ln_monomial_norm(w, k, nu)?.exp())
}

/// Lazily extended per-axis table of `ln` masses (closed form only).
#[derive(Debug, Clone)]
pub(crate) struct AxisMasses {
    tau: f64,
    rho: f64,
    k: f64,
    ln: Vec<f64>,
}

impl AxisMasses {
    pub(crate) fn new(tau: f64, rho: f64, k: f64) -> Self {
        Self {
            tau,
            rho,
            k,
            ln: Vec::new(),
        }
    }

    pub(crate) fn get(&mut self, j: usize) -> Result<f64> {
        while self.ln.len() <= j {
            let next = ln_axis_mass(self.tau, self.rho, self.k, self.ln.len())?;
            self.ln.push(next);
        }
        Ok(self.ln[j])
    }
}

/// Squared monomial norms for all `ν` with `max ν_k ≤ J`, stored per axis.
#[derive(Debug, Clone)]
pub struct MonomialNormTable {
    k: f64,
    j_max: usize,
    offset_term: f64,
    axes: Vec<Vec<f64>>,
}

impl MonomialNormTable {
    /// Every per-axis factor is cross-validated against quadrature.
    pub fn new(w: &RadialWeight, k: f64, j_max: usize) -> Result<Self> {
        RadialWeight::check_scale(k)?;
        if j_max > MAX_DEGREE {
            return Err(Error::Resource {
                requested: j_max,
                cap: MAX_DEGREE,
            });
        }
        let mut axes = Vec::with_capacity(w.dim());
        for (t, r) in w.tau.iter().zip(&w.radii) {
            axes.push(
                (0..=j_max)
                    .map(|j| validated_axis_mass(*t, *r, k, j))
                    .collect::<Result<Vec<f64>>>()?,
            );
        }
        Ok(Self {
            k,
            j_max,
            offset_term: -2.0 * k * w.offset,
            axes,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn ln_norm(&self, nu: &[u32]) -> f64 {
        self.offset_term
            + nu.iter()
                .zip(&self.axes)
                .map(|(&j, axis)| axis[j as usize])
                .sum::<f64>()
    }

    pub fn norm(&self, nu: &[u32]) -> f64 {
        self.ln_norm(nu).exp()
    }
}

/// Partial sum of a positive series with eventually geometric decay.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesSum {
    pub ln_sum: f64,
    /// Upper bound on `remainder / partial sum`.
    pub rel_remainder: f64,
    pub last: usize,
}

/// Sums `Σ_j exp(term(j))` where the term ratios are non-increasing in `j`.
///
/// With `j_max = None` the sum stops at the first `J` whose remainder
/// bound `t_{J+1}/(1 - r_{J+1})` drops below `rtol` times the partial sum.
pub(crate) fn sum_decreasing_ratio<F>(
    mut term: F,
    j_max: Option<usize>,
    rtol: f64,
) -> Result<SeriesSum>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut logs = vec![term(0)?];
    let mut ln_sum = logs[0];
    let mut j = 0;
    loop {
        let t1 = term(j + 1)?;
        let t2 = term(j + 2)?;
        let ratio = (t2 - t1).exp();
        let rel = if t1 == f64::NEG_INFINITY {
            0.0
        } else if ratio < 1.0 {
            (t1 - ln_sum).exp() / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        match j_max {
            Some(jm) if j >= jm => {
                if rel < rtol {
                    return Ok(SeriesSum {
                        ln_sum,
                        rel_remainder: rel,
                        last: j,
                    });
                }
                return Err(Error::Truncation {
                    j_max: jm,
                    achieved: rel,
                    required: rtol,
                });
            }
            None if rel < rtol => {
                return Ok(SeriesSum {
                    ln_sum,
                    rel_remainder: rel,
                    last: j,
                })
            }
            _ => {}
        }
        if j >= MAX_DEGREE {
            return Err(Error::Truncation {
                j_max: j,
                achieved: rel,
                required: rtol,
            });
        }
        logs.push(t1);
        ln_sum = ln_sum_exp(&[ln_sum, t1]);
        j += 1;
    }
}

/// Per-axis diagonal `Σ_j r^{2j} / N_j` in logarithmic form.
pub(crate) fn axis_kernel(
    masses: &mut AxisMasses,
    r: f64,
    j_max: Option<usize>,
    rtol: f64,
) -> Result<SeriesSum> {
    let ln_r2 = 2.0 * r.ln();
    sum_decreasing_ratio(
        |j| {
            let m = masses.get(j)?;
            Ok(if j == 0 { -m } else { j as f64 * ln_r2 - m })
        },
        j_max,
        rtol,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelDiagonal {
    pub z: Vec<Complex64>,
    pub value: f64,
    pub ln_value: f64,
    /// Bound on the omitted terms relative to `value`.
    pub remainder_bound: f64,
    pub j_max: usize,
}

/// `B_{kφ}(z, z) = Σ_ν |z^ν|² / ‖z^ν‖²_{kφ}`.
///
/// Ratios of consecutive terms decrease in the degree (a mean of `|u|²`
/// under a tilted measure increases), so the tail after `J` is bounded by
/// a geometric series. `j_max = None` picks the smallest `J` with relative
/// remainder below `1e-10`.
pub fn kernel_diagonal(
    w: &RadialWeight,
    k: f64,
    z: &[Complex64],
    j_max: Option<usize>,
) -> Result<KernelDiagonal> {
    RadialWeight::check_scale(k)?;
    w.check_inside(z)?;
    let n = w.dim();
    let per_axis_tol = KERNEL_RTOL / (4.0 * n as f64);
    let mut ln_value = 2.0 * k * w.offset;
    let mut log1p_sum = 0.0;
    let mut used = 0;
    for (a, za) in z.iter().enumerate() {
        let mut masses = AxisMasses::new(w.tau[a], w.radii[a], k);
        let s = match axis_kernel(&mut masses, za.norm(), j_max, per_axis_tol) {
            Err(Error::Truncation { j_max, .. }) => {
                // report the bound against the overall tolerance
                let s = axis_kernel(&mut masses, z[a].norm(), Some(j_max), f64::INFINITY)?;
                if s.rel_remainder >= KERNEL_RTOL {
                    return Err(Error::Truncation {
                        j_max,
                        achieved: s.rel_remainder,
                        required: KERNEL_RTOL,
                    });
                }
                s
            }
            other => other?,
        };
        ln_value += s.ln_sum;
        log1p_sum += s.rel_remainder.ln_1p();
        used = used.max(s.last);
    }
    let remainder_bound = log1p_sum.exp_m1();
    if remainder_bound >= KERNEL_RTOL {
        return Err(Error::Truncation {
            j_max: used,
            achieved: remainder_bound,
            required: KERNEL_RTOL,
        });
    }
    Ok(KernelDiagonal {
        z: z.to_vec(),
        value: ln_value.exp(),
        ln_value,
        remainder_bound,
        j_max: used,
    })
}

/// Density of `(2π)^{-n}(n!)^{-1}(dd^cφ)^n` against Lebesgue measure: `∏ 4τ_k / (2π)^n`.
pub fn ma_density(w: &RadialWeight) -> f64 {
    w.tau.iter().map(|t| 4.0 * t / (2.0 * PI)).product()
}

/// Off-diagonal mass of the kernel against a product test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonalMass {
    /// `k^{-1} ∬ h(z)h(ζ) |B_{kφ}(z, ζ)|² dm_{kφ}(z) dm_{kφ}(ζ)`.
    pub value: f64,
    /// `(2π)^{-1} ∫ h² dd^cφ`.
    pub target: f64,
    pub j_max: usize,
}

/// For `n = 1` and the bump `h(z) = (1 - |z|²/r0²)²` on `|z| < r0`.
///
/// The angular integrals reduce `|B|²` to its diagonal in the monomial
/// basis, leaving `k^{-1} Σ_j H_j²` with `H_j = ∫ h |z|^{2j} dm_{kφ} / N_j`,
/// each radial integral done adaptively.
pub fn offdiagonal_mass(w: &RadialWeight, k: f64, r0: f64) -> Result<OffDiagonalMass> {
    if w.dim() != 1 {
        return Err(Error::param(
            "weight",
            "off-diagonal mass is implemented for n = 1",
        ));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::param("k", format!("must be positive, got {k}")));
    }
    if !(r0 > 0.0 && r0 < w.radii[0]) {
        return Err(Error::param(
            "r0",
            format!("bump radius must lie in (0, {})", w.radii[0]),
        ));
    }
    let tau = w.tau[0];
    let mut masses = AxisMasses::new(tau, w.radii[0], k);
    let x0 = 2.0 * k * tau * r0 * r0;
    let mut total = 0.0;
    let mut j = 0usize;
    loop {
        let s = j as f64 + 1.0;
        // ∫_0^{r0} (1-r²/r0²)² r^{2s-1} e^{-2kτr²} dr in the variable u = r/r0
        let log_f = |u: f64| 2.0 * (1.0 - u * u).ln() + (2.0 * s - 1.0) * u.ln() - x0 * u * u;
        let peak_u = peak_of(&log_f);
        let peak = log_f(peak_u);
        let mut f = |u: f64| {
            if u > 0.0 && u < 1.0 {
                (log_f(u) - peak).exp()
            } else {
                0.0
            }
        };
        let mut inner = 0.0;
        for (lo, hi) in [(0.0, peak_u), (peak_u, 1.0)] {
            if hi > lo {
                inner += quad::integrate(&mut f, lo, hi, 1e-13, 0.0, 4000)?.value;
            }
        }
        let ln_h = (2.0 * PI).ln() + 2.0 * s * r0.ln() + peak + inner.ln() - masses.get(j)?;
        let h = ln_h.exp();
        total += h * h;
        // H_j ≤ λ_j of the disc of radius r0, which decays geometrically past the peak
        if j as f64 > 2.0 * x0 + 20.0 && h * h < 1e-18 * total {
            break;
        }
        j += 1;
        if j > MAX_DEGREE {
            return Err(Error::Truncation {
                j_max: j,
                achieved: h * h / total,
                required: 1e-18,
            });
        }
    }
    Ok(OffDiagonalMass {
        value: total / k,
        target: 0.4 * tau * r0 * r0,
        j_max: j,
    })
}

/// Maximiser of a unimodal log-integrand on `(0, 1)` by golden-section search.
fn peak_of<F: Fn(f64) -> f64>(f: &F) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn unit(tau: f64) -> RadialWeight {
        RadialWeight::new(vec![tau], vec![1.0]).unwrap()
    }

    #[test]
    fn monomial_norm_examples() {
        assert!((monomial_norm(&unit(1.0), 0.0, &[0]).unwrap() - PI).abs() < 1e-14);
        assert!((monomial_norm(&unit(1.0), 0.0, &[1]).unwrap() - PI / 2.0).abs() < 1e-14);
        let v = monomial_norm(&unit(1.0), 1.0, &[0]).unwrap();
        let exact = PI / 2.0 * (1.0 - (-2f64).exp());
        assert!((v / exact - 1.0).abs() < 1e-13);
        assert!((v - 1.358212).abs() < 1e-6);
    }

    #[test]
    fn closed_form_matches_quadrature_across_regimes() {
        for &(tau, rho, k) in &[
            (1.0, 1.0, 0.0),
            (1.0, 1.0, 200.0),
            (0.3, 2.0, 5.0),
            (2.0, 0.5, 1e3),
        ] {
            for j in [0, 1, 7, 50, 400, 2000] {
                let a = ln_axis_mass(tau, rho, k, j).unwrap();
                let b = ln_axis_mass_quadrature(tau, rho, k, j).unwrap();
                assert!(
                    (a - b).abs() < 1e-12 * a.abs().max(1.0),
                    "{tau} {rho} {k} {j}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn offset_scales_norms() {
        let w = RadialWeight::with_offset(vec![1.0], vec![1.0], -0.5).unwrap();
        let base = monomial_norm(&unit(1.0), 2.0, &[3]).unwrap();
        let shifted = monomial_norm(&w, 2.0, &[3]).unwrap();
        assert!((shifted / base - 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn table_matches_single_norms() {
        let w = RadialWeight::new(vec![1.0, 0.5], vec![1.0, 1.5]).unwrap();
        let t = MonomialNormTable::new(&w, 3.0, 20).unwrap();
        for nu in [[0u32, 0], [3, 7], [20, 20]] {
            let single = ln_monomial_norm(&w, 3.0, &nu).unwrap();
            assert!((t.ln_norm(&nu) - single).abs() < 1e-13 * single.abs().max(1.0));
        }
    }

    #[test]
    fn kernel_diagonal_examples() {
        let b = kernel_diagonal(&unit(1.0), 0.0, &[c(0.0)], None).unwrap();
        assert!((b.value - 1.0 / PI).abs() < 1e-15);
        let b = kernel_diagonal(&unit(1.0), 0.0, &[c(0.5)], None).unwrap();
        let exact = 1.0 / (PI * 0.75 * 0.75);
        assert!((b.value / exact - 1.0).abs() < 1e-10);
        assert!((b.value - 0.56588).abs() < 1e-5);
        assert!(b.remainder_bound < 1e-10);
        let w2 = RadialWeight::new(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let b = kernel_diagonal(&w2, 0.0, &[c(0.0), c(0.0)], None).unwrap();
        assert!((b.value - 1.0 / (PI * PI)).abs() < 1e-16);
    }

    #[test]
    fn kernel_truncation_errors_carry_bound() {
        let e = kernel_diagonal(&unit(1.0), 0.0, &[c(0.9)], Some(5)).unwrap_err();
        match e {
            Error::Truncation {
                j_max,
                achieved,
                required,
            } => {
                assert_eq!(j_max, 5);
                assert!(achieved > required);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(kernel_diagonal(&unit(1.0), 0.0, &[c(1.0)], None).is_err());
        assert!(kernel_diagonal(&unit(1.0), 0.0, &[c(0.9)], Some(400)).is_ok());
    }

    #[test]
    fn kernel_dominates_constant_term() {
        let w = RadialWeight::new(vec![0.7], vec![1.3]).unwrap();
        for k in [0.0, 1.0, 30.0] {
            let inv_mass = (-ln_monomial_norm(&w, k, &[0]).unwrap()).exp();
            for r in [0.0, 0.2, 0.9, 1.25] {
                let b = kernel_diagonal(&w, k, &[c(r)], None).unwrap();
                assert!(b.value >= inv_mass * (1.0 - 1e-15));
            }
        }
    }

    #[test]
    fn density_examples() {
        assert!((ma_density(&unit(1.0)) - 2.0 / PI).abs() < 1e-15);
        let w2 = RadialWeight::new(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!((ma_density(&w2) - 4.0 / (PI * PI)).abs() < 1e-15);
        assert!((ma_density(&unit(3.0)) - 6.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn semiclassical_density_ratio() {
        let w = unit(1.0);
        let k = 200.0;
        for r in [0.0, 0.3, 0.5, 0.7] {
            let z = [c(r)];
            let b = kernel_diagonal(&w, k, &z, None).unwrap();
            let ratio = (b.ln_value - 2.0 * k * w.phi(&z)).exp() / k / ma_density(&w);
            assert!((0.98..=1.02).contains(&ratio), "r = {r}: {ratio}");
        }
    }

    #[test]
    fn reproducing_identity_for_polynomials() {
        // projections by polar quadrature of f·conj(z^j) e^{-2kφ}, closed-form norms
        let w = RadialWeight::new(vec![0.8], vec![1.2]).unwrap();
        let k = 3.0;
        let coeffs = [
            Complex64::new(0.3, -1.0),
            Complex64::new(2.0, 0.5),
            Complex64::new(0.0, 0.7),
            Complex64::new(-1.1, 0.0),
            Complex64::new(0.25, 0.25),
            Complex64::new(-0.4, 0.9),
        ];
        let f = |z: Complex64| {
            coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
        };
        let radial = quad::CompositeRule::new(0.0, 1.2, 8, 20);
        let angles = 16;
        let mut proj = Vec::new();
        for j in 0..8u32 {
            let mut ip = Complex64::new(0.0, 0.0);
            for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
                for t in 0..angles {
                    let th = 2.0 * PI * t as f64 / angles as f64;
                    let z = Complex64::from_polar(r, th);
                    let dm = wr * r * (2.0 * PI / angles as f64) * (-2.0 * k * w.phi(&[z])).exp();
                    ip += f(z) * z.conj().powu(j) * dm;
                }
            }
            proj.push(ip / monomial_norm(&w, k, &[j]).unwrap());
        }
        for z in [
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.9, 0.3),
            Complex64::new(0.0, 1.1),
        ] {
            let rebuilt: Complex64 = proj
                .iter()
                .enumerate()
                .map(|(j, p)| p * z.powu(j as u32))
                .sum();
            assert!(
                (rebuilt - f(z)).norm() < 1e-12 * f(z).norm().max(1.0),
                "{z}"
            );
        }
        for p in &proj[6..] {
            assert!(p.norm() < 1e-13);
        }
    }

    #[test]
    fn offdiagonal_mass_near_target() {
        let w = unit(1.0);
        let m = offdiagonal_mass(&w, 200.0, 0.6).unwrap();
        assert!(
            (m.value / m.target - 1.0).abs() < 0.05,
            "{} vs {}",
            m.value,
            m.target
        );
    }

    #[test]
    fn normalized_weight_bounds() {
        let a = [1.0, 2.0];
        let b = [0.5, 0.3];
        let w = RadialWeight::normalized_for(&a, &b).unwrap();
        assert_eq!(w.phi(&[c(0.0), c(0.0)]), -1.0);
        assert!(w.phi(&[c(1.0), c(2.0)]).abs() < 1e-15);
        // the whole of K, not only its boundary
        for (x, y) in [(0.5, 0.3), (0.2, 0.0), (0.0, 0.3), (0.35, 0.1)] {
            let phi = w.phi(&[c(x), c(y)]);
            assert!((-1.0..0.0).contains(&phi), "{phi}");
        }
        assert_eq!(w.tau(), [0.5, 0.125]);
        assert!(RadialWeight::normalized_for(&[1.0], &[1.5]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn norm_decreases_in_k_and_tau(tau in 0.1f64..3.0, rho in 0.3f64..2.0, k in 0.0f64..50.0, j in 0usize..60) {
            let base = ln_axis_mass(tau, rho, k, j).unwrap();
            prop_assert!(ln_axis_mass(tau, rho, k + 0.5, j).unwrap() < base);
            prop_assert!(ln_axis_mass(tau * 1.1, rho, k + 0.1, j).unwrap() < base);
        }

        #[test]
        fn validated_norms_agree(tau in 0.1f64..3.0, rho in 0.3f64..2.0, k in 0.0f64..300.0, j in 0usize..300) {
            prop_assert!(validated_axis_mass(tau, rho, k, j).is_ok());
        }
    }
}
