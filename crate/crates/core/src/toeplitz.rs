//! Toeplitz operators `T_{χ,kφ}` with radial indicator symbols.
//!
//! For a symbol that is radial in every coordinate the operator is diagonal
//! in the monomials, and the eigenvalue of `z^ν` is the fraction of the
//! squared norm carried by the support:
//!
//! ```text
//! λ_ν = ∏_k ‖z_k^{ν_k}‖²_{supp_k} / ‖z_k^{ν_k}‖²_{D_k}.
//! ```

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bergman::{
    ln_axis_mass, ma_density, sum_decreasing_ratio, AxisMasses, RadialWeight, MAX_DEGREE,
};
use crate::error::{Error, Result};
use crate::multiindex::rearrange_separable;
use crate::quad;
use crate::special::{ln_diff_exp, ln_sum_exp};
use crate::Complex64;

/// Bound on the total of the omitted eigenvalues.
pub const TAIL_TOL: f64 = 1e-12;
/// Cap on the number of eigenvalues in a box truncation.
pub const SPECTRUM_CAP: usize = 20_000_000;
/// Agreement required between eigenvalue sums and kernel integrals.
pub const TRACE_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    /// `|z| ≤ rho` in one variable.
    RadialDisc { rho: f64 },
    /// `inner ≤ |z| ≤ outer` in one variable.
    RadialAnnulus { inner: f64, outer: f64 },
    /// Closed polydisc of the given radii.
    Polydisc { rho: Vec<f64> },
    /// Disc not centred at the origin; not diagonal in monomials.
    OffCenterDisc { center: Complex64, rho: f64 },
}

/// Support of one coordinate factor.
#[derive(Debug, Clone, Copy, PartialEq)]
enum AxisSupport {
    Disc(f64),
    Annulus(f64, f64),
}

impl AxisSupport {
    fn outer(&self) -> f64 {
        match *self {
            AxisSupport::Disc(r) | AxisSupport::Annulus(_, r) => r,
        }
    }

    fn inner(&self) -> f64 {
        match *self {
            AxisSupport::Disc(_) => 0.0,
            AxisSupport::Annulus(r, _) => r,
        }
    }

    /// `ln(2π ∫_supp r^{2j+1} e^{-2kτr²} dr)`.
    fn ln_mass(&self, tau: f64, k: f64, j: usize) -> Result<f64> {
        match *self {
            AxisSupport::Disc(r) => ln_axis_mass(tau, r, k, j),
            AxisSupport::Annulus(a, b) => Ok(ln_diff_exp(
                ln_axis_mass(tau, b, k, j)?,
                ln_axis_mass(tau, a, k, j)?,
            )),
        }
    }

    fn area(&self) -> f64 {
        PI * (self.outer().powi(2) - self.inner().powi(2))
    }
}

impl SymbolSpec {
    fn axes(&self, w: &RadialWeight) -> Result<Vec<AxisSupport>> {
        let axes = match self {
            SymbolSpec::OffCenterDisc { center, .. } => {
                return Err(Error::UnsupportedSymbol(format!(
                    "disc centred at {center} is not radial; only the diagonal path is implemented"
                )))
            }
            SymbolSpec::RadialDisc { rho } => vec![AxisSupport::Disc(*rho)],
            SymbolSpec::RadialAnnulus { inner, outer } => {
                if !(*inner > 0.0 && inner < outer) {
                    return Err(Error::param(
                        "symbol",
                        format!("annulus needs 0 < inner < outer, got {inner}, {outer}"),
                    ));
                }
                vec![AxisSupport::Annulus(*inner, *outer)]
            }
            SymbolSpec::Polydisc { rho } => rho.iter().map(|r| AxisSupport::Disc(*r)).collect(),
        };
        if axes.len() != w.dim() {
            return Err(Error::param(
                "symbol",
                format!(
                    "symbol has {} coordinates, weight has {}",
                    axes.len(),
                    w.dim()
                ),
            ));
        }
        for (s, r) in axes.iter().zip(w.radii()) {
            if !(s.outer() > 0.0) {
                return Err(Error::param("symbol", "support must have positive measure"));
            }
            if s.outer() >= *r {
                return Err(Error::UnsupportedSymbol(format!(
                    "support radius {} is not compactly contained in the domain radius {r}",
                    s.outer()
                )));
            }
        }
        Ok(axes)
    }

    /// Lebesgue measure of the support.
    pub fn area(&self, w: &RadialWeight) -> Result<f64> {
        Ok(self.axes(w)?.iter().map(|a| a.area()).product())
    }
}

/// Per-axis eigenvalues `ln λ(j)`, `j = 0..=J`, plus a bound on `Σ_{j>J} λ(j)`.
#[derive(Debug, Clone)]
struct AxisSpectrum {
    ln_lambda: Vec<f64>,
    tail: f64,
}

/// `λ(j) ≤ q^{j+1} e^{x_R - x_ρ}` with `q = (ρ/R)²` and `x = 2kτ(·)²`.
fn axis_spectrum(
    tau: f64,
    radius: f64,
    k: f64,
    support: AxisSupport,
    j_max: Option<usize>,
    tol: f64,
) -> Result<AxisSpectrum> {
    let q = (support.outer() / radius).powi(2);
    let shift = 2.0 * k * tau * (radius * radius - support.outer().powi(2));
    let tail_after = |j: usize| (shift + (j as f64 + 2.0) * q.ln()).exp() / (1.0 - q);
    let mut ln_lambda = Vec::new();
    let mut domain = AxisMasses::new(tau, radius, k);
    let mut j = 0;
    loop {
        let l = support.ln_mass(tau, k, j)? - domain.get(j)?;
        ln_lambda.push(l.min(0.0));
        let done = match j_max {
            Some(m) => j >= m,
            None => tail_after(j) < tol,
        };
        if done {
            return Ok(AxisSpectrum {
                ln_lambda,
                tail: tail_after(j),
            });
        }
        j += 1;
        if j > MAX_DEGREE {
            return Err(Error::Truncation {
                j_max: j,
                achieved: tail_after(j),
                required: tol,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    /// Non-increasing eigenvalues.
    pub lambdas: Vec<f64>,
    /// Eigen-index of each entry.
    pub nu: Vec<Vec<u32>>,
    pub k: f64,
    /// Per-axis truncation degree.
    pub j_max: usize,
    /// Upper bound on the sum of all omitted eigenvalues.
    pub tail_bound: f64,
}

impl SpectrumTable {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Number of eigenvalues strictly above `gamma`.
    pub fn count_above(&self, gamma: f64) -> usize {
        self.lambdas.partition_point(|&l| l > gamma)
    }
}

/// Full spectrum up to an omitted mass below [`TAIL_TOL`].
///
/// Every coordinate is truncated at the same degree `J`, chosen so that
/// `Σ_a T_a ∏_{b≠a}(H_b + T_b) < TAIL_TOL`, where `H_a` and `T_a` are the
/// kept sum and the tail bound of axis `a`.
pub fn spectrum(w: &RadialWeight, k: f64, sym: &SymbolSpec) -> Result<SpectrumTable> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::param(
            "k",
            format!("must be finite and >= 0, got {k}"),
        ));
    }
    let supports = sym.axes(w)?;
    let n = w.dim();
    let mut per_axis_tol = TAIL_TOL;
    let (axes, bound) = loop {
        let mut axes: Vec<AxisSpectrum> = Vec::with_capacity(n);
        for (a, s) in supports.iter().enumerate() {
            axes.push(axis_spectrum(
                w.tau()[a],
                w.radii()[a],
                k,
                *s,
                None,
                per_axis_tol,
            )?);
        }
        // common degree, then recompute tails there
        let j = axes
            .iter()
            .map(|s| s.ln_lambda.len() - 1)
            .max()
            .unwrap_or(0);
        let mut axes2 = Vec::with_capacity(n);
        for (a, s) in supports.iter().enumerate() {
            axes2.push(axis_spectrum(
                w.tau()[a],
                w.radii()[a],
                k,
                *s,
                Some(j),
                per_axis_tol,
            )?);
        }
        let kept: Vec<f64> = axes2
            .iter()
            .map(|s| s.ln_lambda.iter().map(|l| l.exp()).sum())
            .collect();
        let mut bound = 0.0;
        for a in 0..n {
            let mut term = axes2[a].tail;
            for b in 0..n {
                if b != a {
                    term *= kept[b] + axes2[b].tail;
                }
            }
            bound += term;
        }
        if bound < TAIL_TOL {
            break (axes2, bound);
        }
        per_axis_tol /= 10.0;
        if per_axis_tol < 1e-30 {
            return Err(Error::Truncation {
                j_max: j,
                achieved: bound,
                required: TAIL_TOL,
            });
        }
    };
    let j_max = axes[0].ln_lambda.len() - 1;
    let total = (j_max + 1).checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > SPECTRUM_CAP {
        return Err(Error::Resource {
            requested: total,
            cap: SPECTRUM_CAP,
        });
    }
    let mut entries: Vec<(f64, Vec<u32>)> = Vec::with_capacity(total);
    let mut nu = vec![0u32; n];
    loop {
        let l: f64 = nu
            .iter()
            .enumerate()
            .map(|(a, &j)| axes[a].ln_lambda[j as usize])
            .sum();
        entries.push((l, nu.clone()));
        // odometer increment
        let mut a = n;
        loop {
            if a == 0 {
                break;
            }
            a -= 1;
            if (nu[a] as usize) < j_max {
                nu[a] += 1;
                nu[a + 1..].fill(0);
                break;
            }
            if a == 0 {
                a = usize::MAX;
                break;
            }
        }
        if a == usize::MAX {
            break;
        }
    }
    entries.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    Ok(SpectrumTable {
        lambdas: entries.iter().map(|e| e.0.exp()).collect(),
        nu: entries.into_iter().map(|e| e.1).collect(),
        k,
        j_max,
        tail_bound: bound,
    })
}

/// The `count` largest eigenvalues for a polydisc symbol, by best-first
/// search over the per-axis eigenvalues (which decrease in the degree).
pub fn leading_eigenvalues(
    w: &RadialWeight,
    k: f64,
    sym: &SymbolSpec,
    count: usize,
) -> Result<Vec<f64>> {
    let supports = sym.axes(w)?;
    if supports
        .iter()
        .any(|s| matches!(s, AxisSupport::Annulus(..)))
    {
        return Err(Error::UnsupportedSymbol(
            "best-first search needs eigenvalues decreasing in the degree; use spectrum() for annuli".into(),
        ));
    }
    let mut domain: Vec<AxisMasses> = (0..w.dim())
        .map(|a| AxisMasses::new(w.tau()[a], w.radii()[a], k))
        .collect();
    let (_, costs) = rearrange_separable(w.dim(), count, |a, j| {
        let l = supports[a].ln_mass(w.tau()[a], k, j as usize)? - domain[a].get(j as usize)?;
        Ok(-l.min(0.0))
    })?;
    Ok(costs.iter().map(|c| (-c).exp()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traces {
    pub tr1_eigen: f64,
    pub tr1_integral: f64,
    pub tr2_eigen: f64,
    pub tr2_integral: f64,
}

/// Eigenvalue sums against kernel integrals over the support:
/// `Tr T = ∫_K B(z,z) dm_{kφ}` and `Tr T² = ∬_{K×K} |B(z,ζ)|² dm_{kφ} dm_{kφ}`.
///
/// The diagonal integral uses the full kernel radially and adaptively. The
/// double integral uses a tensor Gauss–Legendre rule in the two radii, the
/// angles being integrated exactly by orthogonality, with the kernel
/// truncated at the spectrum's degree.
pub fn traces(table: &SpectrumTable, w: &RadialWeight, k: f64, sym: &SymbolSpec) -> Result<Traces> {
    if table.tail_bound >= TAIL_TOL {
        return Err(Error::Truncation {
            j_max: table.j_max,
            achieved: table.tail_bound,
            required: TAIL_TOL,
        });
    }
    let supports = sym.axes(w)?;
    let mut ascending = table.lambdas.clone();
    ascending.reverse();
    let tr1_eigen: f64 = ascending.iter().sum();
    let tr2_eigen: f64 = ascending.iter().map(|l| l * l).sum();

    let mut tr1_integral = 1.0;
    let mut tr2_integral = 1.0;
    for (a, s) in supports.iter().enumerate() {
        let (tau, radius) = (w.tau()[a], w.radii()[a]);
        tr1_integral *= axis_tr1(tau, radius, k, *s)?;
        tr2_integral *= axis_tr2(tau, radius, k, *s, table.j_max)?;
    }
    let disagreement = |a: f64, b: f64| (a - b).abs() / b.abs();
    if disagreement(tr1_eigen, tr1_integral) > TRACE_RTOL
        || disagreement(tr2_eigen, tr2_integral) > TRACE_RTOL
    {
        return Err(Error::numeric(
            format!(
                "trace mismatch: Tr {tr1_eigen:.15e} vs {tr1_integral:.15e}, Tr² {tr2_eigen:.15e} vs {tr2_integral:.15e}"
            ),
            0,
        ));
    }
    Ok(Traces {
        tr1_eigen,
        tr1_integral,
        tr2_eigen,
        tr2_integral,
    })
}

/// `2π ∫_supp B_a(r) e^{-2kτr²} r dr` with the per-axis kernel diagonal.
fn axis_tr1(tau: f64, radius: f64, k: f64, s: AxisSupport) -> Result<f64> {
    let mut masses = AxisMasses::new(tau, radius, k);
    let mut failure = None;
    let mut f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let ln_r2 = 2.0 * r.ln();
        let sum = sum_decreasing_ratio(
            |j| {
                let m = masses.get(j)?;
                Ok(if j == 0 { -m } else { j as f64 * ln_r2 - m })
            },
            None,
            1e-15,
        );
        match sum {
            Ok(s) => 2.0 * PI * r * (s.ln_sum - 2.0 * k * tau * r * r).exp(),
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        }
    };
    let mut total = 0.0;
    // split at the points where the integrand changes character
    let mut cuts = vec![s.inner(), s.outer()];
    let mid = 0.5 * (s.inner() + s.outer());
    cuts.insert(1, mid);
    for w in cuts.windows(2) {
        match quad::integrate(&mut f, w[0], w[1], 1e-13, 0.0, 20_000) {
            Ok(i) => total += i.value,
            Err(e) => return Err(failure.take().unwrap_or(e)),
        }
    }
    Ok(total)
}

/// `(2π)² ∫∫_{supp²} Σ_{j≤J} (rt)^{2j}/N_j² e^{-2kτ(r²+t²)} r t dr dt`.
fn axis_tr2(tau: f64, radius: f64, k: f64, s: AxisSupport, j_max: usize) -> Result<f64> {
    let rule = quad::CompositeRule::new(s.inner(), s.outer(), 16, 16);
    let mut masses = AxisMasses::new(tau, radius, k);
    let ln_n: Vec<f64> = (0..=j_max).map(|j| masses.get(j)).collect::<Result<_>>()?;
    let nodes = &rule.nodes;
    let weights = &rule.weights;
    let ln_node: Vec<f64> = nodes.iter().map(|r| r.ln()).collect();
    let mut total = 0.0;
    let mut logs = Vec::with_capacity(j_max + 1);
    for (i, &r) in nodes.iter().enumerate() {
        for (l, &t) in nodes.iter().enumerate() {
            let ln_rt2 = 2.0 * (ln_node[i] + ln_node[l]);
            logs.clear();
            for (j, lnj) in ln_n.iter().enumerate() {
                logs.push(j as f64 * ln_rt2 - 2.0 * lnj);
            }
            let ln_kernel = ln_sum_exp(&logs) - 2.0 * k * tau * (r * r + t * t);
            total += weights[i] * weights[l] * r * t * ln_kernel.exp();
        }
    }
    Ok(4.0 * PI * PI * total)
}

/// One entry of a concentration trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationPoint {
    pub k: f64,
    pub count: usize,
    /// `count / k^n`.
    pub count_over_kn: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationScan {
    pub gamma: f64,
    pub points: Vec<ConcentrationPoint>,
    /// `ma_density × m(K)`.
    pub target: f64,
}

impl ConcentrationScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,count,count_over_kn,target\n");
        for p in &self.points {
            out.push_str(&format!(
                "{:?},{},{:?},{:?}\n",
                p.k, p.count, p.count_over_kn, self.target
            ));
        }
        out
    }
}

/// `#{m : λ_m(T_{χ,kφ}) > γ}` for each scale, in the order given.
pub fn concentration_scan(
    w: &RadialWeight,
    sym: &SymbolSpec,
    gamma: f64,
    k_list: &[f64],
) -> Result<ConcentrationScan> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param(
            "gamma",
            format!("must lie in (0, 1), got {gamma}"),
        ));
    }
    if let Some(k) = k_list.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
        return Err(Error::param(
            "k_list",
            format!("scales must be positive, got {k}"),
        ));
    }
    let target = ma_density(w) * sym.area(w)?;
    let n = w.dim() as i32;
    let points = k_list
        .par_iter()
        .map(|&k| {
            let table = spectrum(w, k, sym)?;
            let count = table.count_above(gamma);
            Ok(ConcentrationPoint {
                k,
                count,
                count_over_kn: count as f64 / k.powi(n),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcentrationScan {
        gamma,
        points,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(tau: f64) -> RadialWeight {
        RadialWeight::new(vec![tau], vec![1.0]).unwrap()
    }

    #[test]
    fn leading_eigenvalue_example() {
        let t = spectrum(&unit(1.0), 1.0, &SymbolSpec::RadialDisc { rho: 0.6 }).unwrap();
        let exact = (1.0 - (-0.72f64).exp()) / (1.0 - (-2f64).exp());
        assert!((t.lambdas[0] / exact - 1.0).abs() < 1e-13);
        assert!((t.lambdas[0] - 0.59359).abs() < 1e-5);
        assert_eq!(t.nu[0], vec![0]);
    }

    #[test]
    fn unweighted_disc_is_geometric() {
        let rho: f64 = 0.7;
        let t = spectrum(&unit(1.0), 0.0, &SymbolSpec::RadialDisc { rho }).unwrap();
        for (j, l) in t.lambdas.iter().enumerate().take(60) {
            assert!((l / rho.powi(2 * j as i32 + 2) - 1.0).abs() < 1e-12);
        }
        assert!(t.tail_bound < TAIL_TOL);
    }

    #[test]
    fn rejected_symbols() {
        let w = unit(1.0);
        let e = spectrum(&w, 1.0, &SymbolSpec::RadialDisc { rho: 1.0 }).unwrap_err();
        assert!(matches!(e, Error::UnsupportedSymbol(_)));
        let e = spectrum(
            &w,
            1.0,
            &SymbolSpec::OffCenterDisc {
                center: Complex64::new(0.2, 0.0),
                rho: 0.3,
            },
        )
        .unwrap_err();
        assert!(matches!(e, Error::UnsupportedSymbol(_)));
        assert!(spectrum(&w, 1.0, &SymbolSpec::RadialDisc { rho: 0.0 }).is_err());
        assert!(spectrum(
            &w,
            1.0,
            &SymbolSpec::RadialAnnulus {
                inner: 0.5,
                outer: 0.5
            }
        )
        .is_err());
    }

    #[test]
    fn unweighted_traces_exact() {
        let w = unit(1.0);
        let sym = SymbolSpec::RadialDisc { rho: 0.5 };
        let t = spectrum(&w, 0.0, &sym).unwrap();
        let tr = traces(&t, &w, 0.0, &sym).unwrap();
        assert!((tr.tr1_eigen - 1.0 / 3.0).abs() < 1e-12);
        assert!((tr.tr2_eigen - 1.0 / 15.0).abs() < 1e-12);
        assert!((tr.tr1_integral - 1.0 / 3.0).abs() < 1e-12);
        assert!((tr.tr2_integral - 1.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_traces_agree() {
        let cases = [
            (
                RadialWeight::new(vec![1.0], vec![1.0]).unwrap(),
                SymbolSpec::RadialDisc { rho: 0.6 },
                10.0,
            ),
            (
                RadialWeight::new(vec![0.5], vec![1.5]).unwrap(),
                SymbolSpec::RadialAnnulus {
                    inner: 0.4,
                    outer: 1.1,
                },
                3.0,
            ),
            (
                RadialWeight::new(vec![1.0, 2.0], vec![1.0, 0.8]).unwrap(),
                SymbolSpec::Polydisc {
                    rho: vec![0.5, 0.6],
                },
                4.0,
            ),
        ];
        for (w, sym, k) in cases {
            let t = spectrum(&w, k, &sym).unwrap();
            let tr = traces(&t, &w, k, &sym).unwrap();
            assert!(tr.tr2_eigen < tr.tr1_eigen);
            assert!(tr.tr2_eigen > 0.0);
        }
    }

    #[test]
    fn annulus_eigenvalues_are_mass_ratios() {
        let w = RadialWeight::new(vec![1.0], vec![1.0]).unwrap();
        let sym = SymbolSpec::RadialAnnulus {
            inner: 0.3,
            outer: 0.8,
        };
        let t = spectrum(&w, 5.0, &sym).unwrap();
        for (l, nu) in t.lambdas.iter().zip(&t.nu).take(30) {
            let j = nu[0] as usize;
            let inner = quad::integrate(
                |r: f64| r.powi(2 * j as i32 + 1) * (-10.0 * r * r).exp(),
                0.3,
                0.8,
                1e-14,
                0.0,
                1000,
            )
            .unwrap()
            .value;
            let all = quad::integrate(
                |r: f64| r.powi(2 * j as i32 + 1) * (-10.0 * r * r).exp(),
                0.0,
                1.0,
                1e-14,
                0.0,
                1000,
            )
            .unwrap()
            .value;
            assert!((l / (inner / all) - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn leading_matches_full_spectrum() {
        let w = RadialWeight::new(vec![1.0, 0.5], vec![1.0, 1.2]).unwrap();
        let sym = SymbolSpec::Polydisc {
            rho: vec![0.6, 0.5],
        };
        let full = spectrum(&w, 6.0, &sym).unwrap();
        let lead = leading_eigenvalues(&w, 6.0, &sym, 300).unwrap();
        for (a, b) in lead.iter().zip(&full.lambdas) {
            assert!((a / b - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn concentration_example() {
        let w = unit(1.0);
        let sym = SymbolSpec::RadialDisc { rho: 0.6 };
        let scan = concentration_scan(&w, &sym, 0.5, &[50.0, 200.0, 100.0]).unwrap();
        assert!((scan.target - 0.72).abs() < 1e-14);
        assert_eq!(
            scan.points.iter().map(|p| p.k).collect::<Vec<_>>(),
            vec![50.0, 200.0, 100.0]
        );
        let at200 = scan.points[1].count_over_kn;
        assert!((at200 - 0.72).abs() <= 0.05, "{at200}");
        let csv = scan.to_csv();
        assert!(csv.starts_with("k,count,count_over_kn,target\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(concentration_scan(&w, &sym, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn threshold_deviation_shrinks_with_k() {
        let w = unit(1.0);
        let sym = SymbolSpec::RadialDisc { rho: 0.6 };
        for gamma in [0.01, 0.99] {
            let scan = concentration_scan(&w, &sym, gamma, &[50.0, 200.0, 800.0]).unwrap();
            let dev: Vec<f64> = scan
                .points
                .iter()
                .map(|p| (p.count_over_kn - scan.target).abs())
                .collect();
            assert!(dev[0] > dev[1] && dev[1] > dev[2], "{gamma}: {dev:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn eigenvalues_lie_in_unit_interval(tau in 0.2f64..3.0, rho in 0.1f64..0.9, k in 0.0f64..40.0) {
            let t = spectrum(&unit(tau), k, &SymbolSpec::RadialDisc { rho }).unwrap();
            prop_assert!(t.lambdas[0] <= 1.0);
            prop_assert!(t.lambdas.iter().all(|l| *l >= 0.0));
            for win in t.lambdas.windows(2) {
                prop_assert!(win[0] >= win[1]);
            }
        }

        #[test]
        fn unweighted_log_spectrum_is_linear(rho in 0.1f64..0.9) {
            let t = spectrum(&unit(1.0), 0.0, &SymbolSpec::RadialDisc { rho }).unwrap();
            let l: Vec<f64> = t.lambdas.iter().take(40).map(|x| x.ln()).collect();
            for win in l.windows(3) {
                prop_assert!((win[2] - 2.0 * win[1] + win[0]).abs() < 1e-10);
            }
        }
    }
}
