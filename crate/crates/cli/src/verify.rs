//! The acceptance suite: eleven numbered criteria, each printed as one
//! pass/fail line with the measured value, the expected value and the
//! tolerance.
//!
//! Profiles: `default` runs everything, `strict-slope` runs everything with
//! a zero tolerance on the two-dimensional slope, and any tag name
//! (`closed-form`, `convergence`, `property`) runs the criteria carrying it.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use widthlab::bergman::{kernel_diagonal, RadialWeight};
use widthlab::bergmanweil::{
    compact_point, error_bound, error_table, measured_error, numerical_rank, ApproximantSpec,
    BwCondenser, HeferData,
};
use widthlab::capacity::{
    planar_capacity_fd, product_capacity, sublevel_scale, Condenser, PlanarCondenserGrid,
    PolyhedralCondenser, ReinhardtCondenser, SolverOptions,
};
use widthlab::multiindex::{count_lattice, ln_tail_sums_upto, CountingQuery, GeometryVector};
use widthlab::special::factorial;
use widthlab::toeplitz::{concentration_scan, spectrum, traces, SymbolSpec};
use widthlab::widths::{embedding_widths, slope_estimate, supnorm_bounds, target_slope};
use widthlab::{Complex64, Result};

use crate::config::VerifySection;
use crate::{CliError, CliResult};

pub const DEFAULT_SLOPE_TOLERANCE: f64 = 0.05;

struct Criterion {
    id: u32,
    name: &'static str,
    tags: &'static [&'static str],
    /// Wall-clock limit in seconds, part of the criterion.
    limit: Option<f64>,
    check: fn(&Profile) -> Result<Check>,
}

const CRITERIA: [Criterion; 11] = [
    Criterion {
        id: 1,
        name: "exact-1d-widths",
        tags: &["closed-form"],
        limit: Some(1.0),
        check: exact_1d_widths,
    },
    Criterion {
        id: 2,
        name: "2d-slope",
        tags: &["convergence"],
        limit: Some(30.0),
        check: slope_2d,
    },
    Criterion {
        id: 3,
        name: "toeplitz-concentration",
        tags: &["convergence"],
        limit: Some(10.0),
        check: concentration,
    },
    Criterion {
        id: 4,
        name: "bergman-density",
        tags: &["convergence"],
        limit: Some(5.0),
        check: density,
    },
    Criterion {
        id: 5,
        name: "trace-identities",
        tags: &["property"],
        limit: None,
        check: trace_identities,
    },
    Criterion {
        id: 6,
        name: "bw-bound-dominance",
        tags: &["closed-form", "property"],
        limit: None,
        check: bw_dominance,
    },
    Criterion {
        id: 7,
        name: "capacity-scaling",
        tags: &["closed-form"],
        limit: None,
        check: capacity_scaling,
    },
    Criterion {
        id: 8,
        name: "fd-capacity",
        tags: &["convergence"],
        limit: Some(60.0),
        check: fd_capacity,
    },
    Criterion {
        id: 9,
        name: "polyhedral-consistency",
        tags: &["closed-form"],
        limit: None,
        check: polyhedral,
    },
    Criterion {
        id: 10,
        name: "sandwich",
        tags: &["convergence"],
        limit: None,
        check: sandwich,
    },
    Criterion {
        id: 11,
        name: "property-suites",
        tags: &["property"],
        limit: None,
        check: property_suites,
    },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub name: String,
    pub criteria: Vec<u32>,
    pub slope_tolerance: f64,
}

impl Profile {
    pub fn named(name: &str) -> CliResult<Self> {
        let all: Vec<u32> = CRITERIA.iter().map(|c| c.id).collect();
        let (criteria, slope_tolerance) = match name {
            "default" => (all, DEFAULT_SLOPE_TOLERANCE),
            "strict-slope" => (all, 0.0),
            tag => {
                let ids: Vec<u32> = CRITERIA
                    .iter()
                    .filter(|c| c.tags.contains(&tag))
                    .map(|c| c.id)
                    .collect();
                if ids.is_empty() {
                    return Err(CliError::Usage(format!(
                        "--profile: unknown profile {tag:?}; use default, strict-slope, closed-form, convergence or property"
                    )));
                }
                (ids, DEFAULT_SLOPE_TOLERANCE)
            }
        };
        Ok(Self {
            name: name.to_string(),
            criteria,
            slope_tolerance,
        })
    }

    pub fn with_overrides(mut self, section: &VerifySection) -> CliResult<Self> {
        if let Some(ids) = &section.criteria {
            for (i, id) in ids.iter().enumerate() {
                if !CRITERIA.iter().any(|c| c.id == *id) {
                    return Err(CliError::Usage(format!(
                        "verify.criteria[{i}]: no criterion {id}, expected 1..=11"
                    )));
                }
            }
            self.criteria = ids.clone();
        }
        if let Some(t) = section.slope_tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!(
                    "verify.slope_tolerance: must be finite and >= 0, got {t}"
                )));
            }
            self.slope_tolerance = t;
        }
        Ok(self)
    }
}

/// What a criterion measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub seconds: f64,
    pub limit_seconds: Option<f64>,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let limit = self
            .limit_seconds
            .map(|l| format!(" / {l} s"))
            .unwrap_or_default();
        write!(
            f,
            "[{}] {:>2} {:<23} measured {:<13.6e} expected {:<13.6e} tolerance {:<9.1e} {:.2} s{limit}  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.expected,
            self.tolerance,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub profile: Profile,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    pub fn into_result(self) -> CliResult<()> {
        let failed: Vec<String> = self
            .outcomes
            .iter()
            .filter(|o| !o.pass)
            .map(|o| o.id.to_string())
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Acceptance(format!(
                "criteria {} failed",
                failed.join(", ")
            )))
        }
    }
}

pub fn run_criterion(id: u32, profile: &Profile) -> Outcome {
    let c = CRITERIA
        .iter()
        .find(|c| c.id == id)
        .expect("criterion ids are validated");
    let start = Instant::now();
    let check = (c.check)(profile).unwrap_or_else(|e| Check {
        measured: f64::NAN,
        expected: f64::NAN,
        tolerance: f64::NAN,
        pass: false,
        detail: format!("error: {e}"),
    });
    let seconds = start.elapsed().as_secs_f64();
    let in_time = c.limit.is_none_or(|l| seconds < l);
    let mut detail = check.detail;
    if !in_time {
        detail.push_str("; over the time limit");
    }
    Outcome {
        id: c.id,
        name: c.name,
        tags: c.tags,
        measured: check.measured,
        expected: check.expected,
        tolerance: check.tolerance,
        seconds,
        limit_seconds: c.limit,
        pass: check.pass && in_time,
        detail,
    }
}

/// Runs the profile's criteria in order, printing each line as it finishes.
pub fn run_profile(profile: &Profile) -> Report {
    let outcomes = profile
        .criteria
        .iter()
        .map(|&id| {
            let o = run_criterion(id, profile);
            println!("{o}");
            o
        })
        .collect();
    Report {
        profile: profile.clone(),
        outcomes,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn reinhardt(a: &[f64], b: &[f64]) -> Result<ReinhardtCondenser> {
    ReinhardtCondenser::new(a.to_vec(), b.to_vec())
}

fn random_reinhardt(rng: &mut ChaCha8Rng, max_dim: usize) -> Result<ReinhardtCondenser> {
    let n = rng.gen_range(1..=max_dim);
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let b = a.iter().map(|a| a * rng.gen_range(0.2..0.8)).collect();
    ReinhardtCondenser::new(a, b)
}

fn exact_1d_widths(_: &Profile) -> Result<Check> {
    let cond = reinhardt(&[1.0], &[0.5])?;
    let table = embedding_widths(&cond, 0.0, None, 512)?;
    let worst = (1..=512)
        .map(|m| rel(table.d(m), 0.5f64.powi(m as i32)))
        .fold(0.0, f64::max);
    let fit = slope_estimate(&table, 1)?;
    let target = target_slope(&product_capacity(&cond), 1);
    let slope_err = rel(fit.slope, LN_2);
    let target_err = rel(target, LN_2);
    Ok(Check {
        measured: fit.slope,
        expected: LN_2,
        tolerance: 1e-10,
        pass: worst <= 1e-12 && slope_err <= 1e-10 && target_err <= 1e-10,
        detail: format!("max |d_m 2^m - 1| = {worst:.1e}, target slope error {target_err:.1e}"),
    })
}

fn slope_2d(profile: &Profile) -> Result<Check> {
    let cond = reinhardt(&[1.0, 1.0], &[0.5, 0.5])?;
    let expected = 2f64.sqrt() * LN_2;
    let errors = [10_000usize, 20_000, 40_000]
        .into_par_iter()
        .map(|m| {
            let table = embedding_widths(&cond, 0.0, None, m)?;
            Ok((slope_estimate(&table, 2)?.slope, m))
        })
        .collect::<Result<Vec<_>>>()?;
    let err: Vec<f64> = errors.iter().map(|(s, _)| rel(*s, expected)).collect();
    let tol = profile.slope_tolerance;
    Ok(Check {
        measured: errors[1].0,
        expected,
        tolerance: tol,
        pass: err[1] <= tol && err[1] < err[0],
        detail: format!(
            "relative error {:.2e} at M = 1e4, {:.2e} at 2e4, {:.2e} at 4e4 (logged only)",
            err[0], err[1], err[2]
        ),
    })
}

fn concentration(_: &Profile) -> Result<Check> {
    let w = RadialWeight::new(vec![1.0], vec![1.0])?;
    let sym = SymbolSpec::RadialDisc { rho: 0.6 };
    let fractions = [0.5, 0.1, 0.9]
        .into_par_iter()
        .map(|g| {
            let scan = concentration_scan(&w, &sym, g, &[200.0])?;
            Ok((scan.points[0].count_over_kn, scan.target))
        })
        .collect::<Result<Vec<_>>>()?;
    let target = fractions[0].1;
    let main = fractions[0].0;
    let spread = (fractions[1].0 - 0.72)
        .abs()
        .max((fractions[2].0 - 0.72).abs());
    Ok(Check {
        measured: main,
        expected: 0.72,
        tolerance: 0.05,
        pass: (main - 0.72).abs() <= 0.05 && (target - 0.72).abs() < 1e-12 && spread <= 0.08,
        detail: format!(
            "count/k = {:.4} at gamma 0.1, {:.4} at gamma 0.9 (tolerance 0.08)",
            fractions[1].0, fractions[2].0
        ),
    })
}

fn density(_: &Profile) -> Result<Check> {
    let w = RadialWeight::new(vec![1.0], vec![1.0])?;
    let z = [Complex64::new(0.3, 0.0)];
    let k = 200.0;
    let d = kernel_diagonal(&w, k, &z, None)?;
    let ratio = (d.ln_value - 2.0 * k * w.phi(&z) - k.ln() - (2.0 / PI).ln()).exp();
    Ok(Check {
        measured: ratio,
        expected: 1.0,
        tolerance: 0.02,
        pass: (ratio - 1.0).abs() <= 0.02,
        detail: format!(
            "series truncated at degree {}, remainder {:.1e}",
            d.j_max, d.remainder_bound
        ),
    })
}

fn trace_identities(_: &Profile) -> Result<Check> {
    let w = RadialWeight::new(vec![1.0], vec![1.0])?;
    let sym = SymbolSpec::RadialDisc { rho: 0.5 };
    let t = traces(&spectrum(&w, 0.0, &sym)?, &w, 0.0, &sym)?;
    let exact = [
        (t.tr1_eigen, 1.0 / 3.0),
        (t.tr1_integral, 1.0 / 3.0),
        (t.tr2_eigen, 1.0 / 15.0),
        (t.tr2_integral, 1.0 / 15.0),
    ]
    .iter()
    .map(|(v, e)| rel(*v, *e))
    .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let configs: Vec<(RadialWeight, SymbolSpec, f64)> = (0..10)
        .map(|i| {
            let tau = rng.gen_range(0.5..2.0);
            let radius = rng.gen_range(0.8..1.5);
            let k = rng.gen_range(0.5..8.0);
            let sym = if i % 2 == 0 {
                SymbolSpec::RadialDisc {
                    rho: radius * rng.gen_range(0.2..0.9),
                }
            } else {
                let inner = radius * rng.gen_range(0.1..0.5);
                SymbolSpec::RadialAnnulus {
                    inner,
                    outer: inner + radius * rng.gen_range(0.1..0.4),
                }
            };
            Ok((RadialWeight::new(vec![tau], vec![radius])?, sym, k))
        })
        .collect::<Result<_>>()?;
    let random = configs
        .par_iter()
        .map(|(w, sym, k)| {
            let t = traces(&spectrum(w, *k, sym)?, w, *k, sym)?;
            Ok(rel(t.tr1_eigen, t.tr1_integral).max(rel(t.tr2_eigen, t.tr2_integral)))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Check {
        measured: random,
        expected: 0.0,
        tolerance: 1e-8,
        pass: random <= 1e-8 && exact <= 1e-12,
        detail: format!("unweighted rho = 1/2 error {exact:.1e} (tolerance 1e-12)"),
    })
}

fn bw_dominance(_: &Profile) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let conds: Vec<BwCondenser> = (0..20)
        .map(|_| random_reinhardt(&mut rng, 3).map(BwCondenser::from))
        .collect::<Result<_>>()?;
    let worst = conds
        .par_iter()
        .map(|c| {
            let rows = error_table(c, 200)?;
            Ok(rows
                .iter()
                .map(|r| r.measured_error / r.lemma_bound)
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let spec = ApproximantSpec::new(reinhardt(&[1.0], &[0.5])?, 5)?;
    let measured = measured_error(&spec);
    let bound = error_bound(&spec)?.value;
    let example = (measured - 0.0625).abs() < 1e-12 && (bound - 0.090168).abs() < 5e-7;
    Ok(Check {
        measured: worst,
        expected: 1.0,
        tolerance: 1e-12,
        pass: worst <= 1.0 + 1e-12 && example,
        detail: format!(
            "max measured/bound over 20 condensers; example m = 5: {measured} <= {bound:.6}"
        ),
    })
}

fn capacity_scaling(_: &Profile) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let cond = random_reinhardt(&mut rng, 3)?;
        let c = rng.gen_range(0.05..0.95);
        let s = sublevel_scale(&cond, c)?;
        let n = cond.outer().len();
        let base = product_capacity(&cond).value;
        worst = worst.max(rel(s.capacity.value, base / (1.0 - c).powi(n as i32)));
        worst = worst.max(rel(product_capacity(&s.condenser).value, s.capacity.value));
        for ((r, a), b) in s.radii.iter().zip(cond.outer()).zip(cond.inner()) {
            worst = worst.max(rel(*r, a * (b / a).powf(1.0 - c)));
        }
    }
    let annulus = reinhardt(&[1.0], &[0.25])?;
    let ratio = sublevel_scale(&annulus, 0.5)?.capacity.value / product_capacity(&annulus).value;
    Ok(Check {
        measured: worst,
        expected: 0.0,
        tolerance: 1e-12,
        pass: worst <= 1e-12 && rel(ratio, 2.0) <= 1e-12,
        detail: format!("100 random condensers; annulus (1, 1/4) at c = 1/2 scales by {ratio}"),
    })
}

fn fd_capacity(_: &Profile) -> Result<Check> {
    let grid = PlanarCondenserGrid::annulus(1.0, 0.5, 1024)?;
    let sol = planar_capacity_fd(&grid, &SolverOptions::default())?;
    let exact = 2.0 * PI / LN_2;
    let spread_tol = 10.0 * (sol.residual + grid.spacing());
    let spread = sol.flux_spread();
    Ok(Check {
        measured: sol.capacity.value,
        expected: exact,
        tolerance: 0.01,
        pass: rel(sol.capacity.value, exact) <= 0.01 && spread <= spread_tol,
        detail: format!(
            "{} iterations, residual {:.1e}, flux spread {spread:.1e} (tolerance {spread_tol:.1e})",
            sol.iterations, sol.residual
        ),
    })
}

fn polyhedral(_: &Profile) -> Result<Check> {
    let poly = PolyhedralCondenser::new(vec![2], vec![1.0], vec![0.5])?;
    let value = product_capacity(&poly).value;
    let expected = 4.0 * PI / LN_2;
    let pullback = 2.0 * product_capacity(&reinhardt(&[1.0], &[0.5])?).value;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut residual = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=3);
        let p: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
        let shifts = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)))
            .collect();
        let h = HeferData::new(p, shifts)?;
        let mut pt = || -> Vec<Complex64> {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect()
        };
        let (zeta, z) = (pt(), pt());
        residual = residual.max(h.identity_residual(&zeta, &z));
    }
    Ok(Check {
        measured: value,
        expected,
        tolerance: 1e-12,
        pass: rel(value, expected) <= 1e-12 && rel(value, pullback) <= 1e-12 && residual <= 1e-12,
        detail: format!(
            "twice the annulus: {pullback}; Hefer residual {residual:.1e} on 1e4 pairs"
        ),
    })
}

fn sandwich(_: &Profile) -> Result<Check> {
    let cases: [(&[f64], &[f64]); 4] = [
        (&[1.0], &[0.5]),
        (&[1.0], &[0.25]),
        (&[1.0, 1.0], &[0.5, 0.5]),
        (&[1.0, 2.0], &[0.5, 0.6]),
    ];
    let rows = cases
        .par_iter()
        .map(|(a, b)| {
            let cond = reinhardt(a, b)?;
            let n = a.len();
            let (lower, upper) = supnorm_bounds(&cond, 10_000, None)?;
            let ordered = lower
                .ln_values
                .iter()
                .zip(&upper.ln_values)
                .all(|(l, u)| *l <= u + 1e-12 * u.abs().max(1.0));
            let lo = slope_estimate(&lower, n)?
                .relative_error
                .unwrap_or(f64::INFINITY);
            let hi = slope_estimate(&upper, n)?
                .relative_error
                .unwrap_or(f64::INFINITY);
            Ok((ordered, lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    let ordered = rows.iter().all(|r| r.0);
    let worst = rows.iter().map(|r| r.1.max(r.2)).fold(0.0, f64::max);
    let detail = rows
        .iter()
        .map(|(_, lo, hi)| format!("{lo:.3}/{hi:.3}"))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(Check {
        measured: worst,
        expected: 0.0,
        tolerance: 0.1,
        pass: ordered && worst <= 0.1,
        detail: format!("lower <= upper entrywise: {ordered}; slope errors lower/upper {detail}"),
    })
}

fn random_geometry(rng: &mut ChaCha8Rng) -> Result<GeometryVector> {
    let n = rng.gen_range(1..=3);
    GeometryVector::new((0..n).map(|_| rng.gen_range(0.05..0.95)).collect())
}

/// Violations of the γ_m and tail bounds for `m ≤ m_max`, in logs.
fn lemma_violations(g: &GeometryVector, m_max: usize) -> Result<usize> {
    let (seq, tails) = ln_tail_sums_upto(g, m_max)?;
    let n = g.dim();
    let ln_alpha: f64 = g.alpha().iter().map(|a| a.ln()).sum();
    let ln_prefactor: f64 = g.alpha().iter().map(|a| (a * -a.ln()).ln()).sum();
    let slack = |x: f64| 1e-12 * x.abs().max(1.0);
    let mut bad = 0;
    for (m, tail) in tails.iter().enumerate() {
        let root = (g.decay_constant() * m as f64).powf(1.0 / n as f64);
        if m >= 1 {
            let bound = -root - ln_alpha;
            if seq.log_gammas()[m - 1] > bound + slack(bound) {
                bad += 1;
            }
        }
        let poly: f64 = (0..n).map(|k| root.powi(k as i32) / factorial(k)).sum();
        let bound = poly.ln() - root - ln_prefactor;
        if *tail > bound + slack(bound) {
            bad += 1;
        }
    }
    Ok(bad)
}

fn property_suites(_: &Profile) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let geoms: Vec<GeometryVector> = (0..1000)
        .map(|_| random_geometry(&mut rng))
        .collect::<Result<_>>()?;
    let lemma: usize = geoms
        .par_iter()
        .map(|g| lemma_violations(g, 10_000))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();

    let mut lattice = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let q = CountingQuery::new(
            (0..n).map(|_| rng.gen_range(0.2..2.0)).collect(),
            rng.gen_range(0.0..10.0),
        )?;
        let (lo, hi) = q.volume_bounds();
        let count = count_lattice(&q) as f64;
        if count < lo * (1.0 - 1e-12) || count > hi * (1.0 + 1e-12) {
            lattice += 1;
        }
    }

    let mut weighted = 0;
    for (a, b) in [(vec![1.0], vec![0.5]), (vec![1.0, 2.0], vec![0.5, 0.6])] {
        let cond = reinhardt(&a, &b)?;
        let w = RadialWeight::normalized_for(&a, &b)?;
        let base = embedding_widths(&cond, 0.0, None, 300)?;
        for k in [1.0f64, 5.0, 10.0, 20.0] {
            let t = embedding_widths(&cond, k, Some(&w), 300)?;
            weighted += (1..=300)
                .filter(|&m| t.d(m) > k.exp() * base.d(m) * (1.0 + 1e-12))
                .count();
        }
    }

    let specs = [
        ApproximantSpec::new(PolyhedralCondenser::new(vec![2], vec![1.0], vec![0.5])?, 3)?,
        ApproximantSpec::new(
            PolyhedralCondenser::new(vec![2, 3], vec![1.0, 1.0], vec![0.5, 0.5])?,
            2,
        )?,
        ApproximantSpec::new(reinhardt(&[1.0, 1.0], &[0.5, 0.5])?, 6)?,
    ];
    let mut rank = 0;
    for spec in &specs {
        let probes = 4 * spec.rank_bound() as usize;
        let samples: Vec<Vec<Complex64>> = (0..2 * probes)
            .map(|_| {
                let u: Vec<f64> = (0..2 * spec.dim()).map(|_| rng.gen()).collect();
                compact_point(spec, &u)
            })
            .collect();
        if numerical_rank(spec, probes, &samples, 1e-9)? as u64 > spec.rank_bound() {
            rank += 1;
        }
    }

    let total = lemma + lattice + weighted + rank;
    Ok(Check {
        measured: total as f64,
        expected: 0.0,
        tolerance: 0.0,
        pass: total == 0,
        detail: format!("violations: decay bounds {lemma}, lattice brackets {lattice}, weighted comparison {weighted}, rank {rank}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles() {
        assert_eq!(Profile::named("default").unwrap().criteria.len(), 11);
        assert_eq!(Profile::named("strict-slope").unwrap().slope_tolerance, 0.0);
        assert_eq!(
            Profile::named("closed-form").unwrap().criteria,
            vec![1, 6, 7, 9]
        );
        assert!(matches!(Profile::named("fast"), Err(CliError::Usage(_))));
        let section = VerifySection {
            criteria: Some(vec![12]),
            slope_tolerance: None,
        };
        assert!(Profile::named("default")
            .unwrap()
            .with_overrides(&section)
            .is_err());
    }

    #[test]
    fn zero_slope_tolerance_fails() {
        let p = Profile::named("strict-slope").unwrap();
        let o = run_criterion(2, &p);
        assert!(!o.pass, "{o}");
    }

    #[test]
    fn closed_form_criteria_pass() {
        let p = Profile::named("closed-form").unwrap();
        let r = run_profile(&p);
        assert!(r.passed());
    }
}
