use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use widthlab::bergman::{kernel_diagonal, ma_density};
use widthlab::bergmanweil::{
    compact_point, error_bound, error_table, error_table_csv, numerical_rank, ApproximantSpec,
    BwCondenser,
};
use widthlab::capacity::{
    planar_capacity_fd, product_capacity, sublevel_scale, CapacityValue, Condenser,
};
use widthlab::toeplitz::{concentration_scan, SymbolSpec};
use widthlab::widths::{embedding_widths, slope_estimate, supnorm_bounds, WidthTable, MIN_FIT_LEN};

use crate::artifact::Writer;
use crate::config::{
    BergmanPlan, BwPlan, CapacityPlan, ExperimentConfig, ExperimentKind, Plan, ToeplitzPlan,
    WidthsPlan,
};
use crate::verify;
use crate::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct RunArtifact {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub timings: Vec<(String, f64)>,
}

/// Validates `config` for `kind`, runs it with at most `jobs` threads and
/// writes the artifacts into `out`.
pub fn run(
    kind: ExperimentKind,
    config: &ExperimentConfig,
    config_text: &str,
    config_dir: &Path,
    out: &Path,
    jobs: Option<usize>,
) -> CliResult<RunArtifact> {
    let start = Instant::now();
    let plan = config.plan(kind, config_dir)?;
    let mut writer = Writer::new(out, config_text)?;
    let mut timings = vec![("validate".to_string(), start.elapsed().as_secs_f64())];
    let pool = thread_pool(jobs)?;
    let compute = Instant::now();
    let result = pool.install(|| match &plan {
        Plan::Widths(p) => widths(p, &mut writer),
        Plan::Toeplitz(p) => toeplitz(p, &mut writer),
        Plan::Bergman(p) => bergman(p, &mut writer),
        Plan::Capacity(p) => capacity(p, &mut writer),
        Plan::BwApprox(p) => bw(p, &mut writer),
        Plan::Verify(section) => {
            let profile = verify::Profile::named("default")?.with_overrides(section)?;
            verify_into(&profile, &mut writer)
        }
    });
    timings.push(("compute".to_string(), compute.elapsed().as_secs_f64()));
    timings.push(("total".to_string(), start.elapsed().as_secs_f64()));
    let manifest = writer.manifest(kind.as_str(), &timings)?;
    result?;
    Ok(RunArtifact {
        files: writer.files.clone(),
        manifest,
        timings,
    })
}

/// Runs the acceptance suite under `profile`, writing `verify.json` and the
/// manifest when `out` is given.
pub fn run_verify(
    profile: &verify::Profile,
    config_text: &str,
    out: Option<&Path>,
    jobs: Option<usize>,
) -> CliResult<()> {
    let pool = thread_pool(jobs)?;
    let start = Instant::now();
    match out {
        Some(dir) => {
            let mut writer = Writer::new(dir, config_text)?;
            let result = pool.install(|| verify_into(profile, &mut writer));
            writer.manifest(
                ExperimentKind::Verify.as_str(),
                &[("total".to_string(), start.elapsed().as_secs_f64())],
            )?;
            result
        }
        None => pool.install(|| verify::run_profile(profile).into_result()),
    }
}

fn thread_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs: must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))
}

fn verify_into(profile: &verify::Profile, w: &mut Writer) -> CliResult<()> {
    let report = verify::run_profile(profile);
    w.summary(
        "verify",
        serde_json::to_value(&report).expect("report serializes"),
    )?;
    report.into_result()
}

fn capacity_json(c: &CapacityValue) -> Value {
    json!({ "value": c.value, "provenance": c.provenance, "shifted": c.shifted })
}

fn condenser_json(c: &dyn Condenser) -> Value {
    json!({ "a": c.outer(), "b": c.inner(), "multiplicity": c.multiplicity(), "shifted": c.is_shifted() })
}

fn bw_condenser(c: &BwCondenser) -> &dyn Condenser {
    match c {
        BwCondenser::Reinhardt(c) => c,
        BwCondenser::Polyhedral(c) => c,
    }
}

const WIDTH_COLUMNS: [(&str, &str); 3] = [
    ("m", "1-based index"),
    (
        "d_m",
        "width value; below the double range written as mantissa e exponent",
    ),
    ("kind", "hilbert-exact, supnorm-upper or supnorm-lower"),
];

fn fit_summary(table: &WidthTable, capacity: &CapacityValue, n: usize) -> CliResult<Value> {
    let target = widthlab::widths::target_slope(capacity, n);
    if table.len() < MIN_FIT_LEN {
        return Ok(json!({
            "target_slope": target,
            "fitted_slope": Value::Null,
            "relative_error": Value::Null,
            "window": Value::Null,
        }));
    }
    let fit = slope_estimate(table, n).map_err(|e| CliError::module("slope fit", e))?;
    Ok(json!({
        "target_slope": target,
        "fitted_slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "relative_error": fit.relative_error,
        "window": [fit.window.0, fit.window.1],
    }))
}

fn widths(p: &WidthsPlan, w: &mut Writer) -> CliResult<()> {
    let n = p.cond.dim();
    let capacity = product_capacity(&p.cond);
    let table = embedding_widths(&p.cond, p.k, p.weight.as_ref(), p.count)
        .map_err(|e| CliError::module("widths", e))?;
    let mut summary = fit_summary(&table, &capacity, n)?;
    summary["condenser"] = condenser_json(&p.cond);
    summary["capacity"] = capacity_json(&capacity);
    summary["k"] = json!(p.k);
    summary["count"] = json!(p.count);
    w.table("widths", &table.to_csv(), &WIDTH_COLUMNS, summary)?;
    if p.supnorm {
        let (lower, upper) = supnorm_bounds(&p.cond, p.count, p.shrink)
            .map_err(|e| CliError::module("widths.shrink", e))?;
        let ok = lower
            .ln_values
            .iter()
            .zip(&upper.ln_values)
            .all(|(l, u)| l <= u);
        for (stem, t) in [("supnorm_lower", &lower), ("supnorm_upper", &upper)] {
            let mut s = fit_summary(t, &capacity, n)?;
            s["sandwich_holds"] = json!(ok);
            w.table(stem, &t.to_csv(), &WIDTH_COLUMNS, s)?;
        }
        if !ok {
            return Err(CliError::Numeric(
                "supnorm lower bound exceeds the upper bound".into(),
            ));
        }
    }
    Ok(())
}

fn symbol_json(s: &SymbolSpec) -> Value {
    match s {
        SymbolSpec::RadialDisc { rho } => json!({ "kind": "disc", "rho": rho }),
        SymbolSpec::RadialAnnulus { inner, outer } => {
            json!({ "kind": "annulus", "inner": inner, "outer": outer })
        }
        SymbolSpec::Polydisc { rho } => json!({ "kind": "polydisc", "rho": rho }),
        SymbolSpec::OffCenterDisc { center, rho } => {
            json!({ "kind": "off-center-disc", "center": [center.re, center.im], "rho": rho })
        }
    }
}

fn toeplitz(p: &ToeplitzPlan, w: &mut Writer) -> CliResult<()> {
    let scan = concentration_scan(&p.weight, &p.symbol, p.gamma, &p.k_list)
        .map_err(|e| CliError::module("toeplitz", e))?;
    let summary = json!({
        "gamma": scan.gamma,
        "target": scan.target,
        "symbol": symbol_json(&p.symbol),
        "tau": p.weight.tau(),
        "radii": p.weight.radii(),
    });
    w.table(
        "concentration",
        &scan.to_csv(),
        &[
            ("k", "semiclassical scale"),
            ("count", "number of eigenvalues above gamma"),
            ("count_over_kn", "count / k^n"),
            ("target", "Monge-Ampere mass of the symbol support"),
        ],
        summary,
    )
}

/// `(k, point, ln B, ratio, remainder, j_max)`.
type DensityRow = (f64, usize, f64, f64, f64, usize);

fn bergman(p: &BergmanPlan, w: &mut Writer) -> CliResult<()> {
    let n = p.weight.dim();
    let density = ma_density(&p.weight);
    let rows: Vec<Vec<DensityRow>> = p
        .k_list
        .par_iter()
        .map(|&k| {
            p.points
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    let d = kernel_diagonal(&p.weight, k, z, None).map_err(|e| {
                        CliError::module(&format!("bergman.points[{i}] at k = {k}"), e)
                    })?;
                    let ln_ratio =
                        d.ln_value - 2.0 * k * p.weight.phi(z) - n as f64 * k.ln() - density.ln();
                    Ok((k, i, d.ln_value, ln_ratio.exp(), d.remainder_bound, d.j_max))
                })
                .collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut csv = String::from("k,point,ln_kernel,ratio,remainder_bound,j_max\n");
    let mut worst = 0.0f64;
    for (k, i, ln_b, ratio, rem, j) in rows.into_iter().flatten() {
        csv.push_str(&format!("{k:?},{i},{ln_b:?},{ratio:?},{rem:e},{j}\n"));
        worst = worst.max((ratio - 1.0).abs());
    }
    let summary = json!({
        "ma_density": density,
        "max_ratio_deviation": worst,
        "tau": p.weight.tau(),
        "radii": p.weight.radii(),
    });
    w.table(
        "density",
        &csv,
        &[
            ("k", "semiclassical scale"),
            ("point", "index into bergman.points"),
            ("ln_kernel", "log of the kernel diagonal"),
            (
                "ratio",
                "k^-n B(z,z) exp(-2k phi(z)) / Monge-Ampere density",
            ),
            ("remainder_bound", "relative bound on the truncated series"),
            ("j_max", "largest degree summed"),
        ],
        summary,
    )
}

fn capacity(p: &CapacityPlan, w: &mut Writer) -> CliResult<()> {
    let closed = p.closed.as_ref().map(|c| product_capacity(bw_condenser(c)));
    let fd = match &p.grid {
        Some(grid) => {
            let sol = planar_capacity_fd(grid, &p.options)
                .map_err(|e| CliError::module("capacity", e))?;
            let fluxes: Vec<Value> = sol
                .fluxes
                .iter()
                .map(|(l, f)| json!({ "level": l, "flux": f }))
                .collect();
            Some(json!({
                "capacity": capacity_json(&sol.capacity),
                "fluxes": fluxes,
                "flux_spread": sol.flux_spread(),
                "residual": sol.residual,
                "iterations": sol.iterations,
                "spacing": grid.spacing(),
                "size": [grid.width(), grid.height()],
                "tolerance": p.options.tolerance,
            }))
        }
        None => None,
    };
    let relative_error = match (&fd, &closed) {
        (Some(f), Some(c)) => {
            json!((f["capacity"]["value"].as_f64().unwrap_or(f64::NAN) / c.value - 1.0).abs())
        }
        _ => Value::Null,
    };
    let mut sublevels = Vec::new();
    if let Some(cond) = &p.closed {
        for &c in &p.sublevel {
            let (radii, cap) = match cond {
                BwCondenser::Reinhardt(r) => {
                    let s = sublevel_scale(r, c)
                        .map_err(|e| CliError::module("capacity.sublevel", e))?;
                    (s.radii, s.capacity)
                }
                BwCondenser::Polyhedral(r) => {
                    let s = sublevel_scale(r, c)
                        .map_err(|e| CliError::module("capacity.sublevel", e))?;
                    (s.radii, s.capacity)
                }
            };
            sublevels.push(json!({ "c": c, "radii": radii, "capacity": capacity_json(&cap) }));
        }
    }
    let summary = json!({
        "closed_form": closed.as_ref().map(capacity_json),
        "condenser": p.closed.as_ref().map(|c| condenser_json(bw_condenser(c))),
        "finite_difference": fd,
        "relative_error": relative_error,
        "sublevel": sublevels,
    });
    w.summary("capacity", summary)
}

fn bw(p: &BwPlan, w: &mut Writer) -> CliResult<()> {
    let rows = error_table(&p.cond, p.m_max).map_err(|e| CliError::module("bw", e))?;
    let dominated = rows
        .iter()
        .all(|r| r.measured_error <= r.lemma_bound * (1.0 + 1e-12));
    let spec = ApproximantSpec::new(p.cond.clone(), p.rank_m.unwrap_or(1))
        .map_err(|e| CliError::module("bw", e))?;
    let bound = error_bound(&spec).map_err(|e| CliError::module("bw", e))?;
    let rank = match p.rank_m {
        Some(m) => {
            let probes = 4 * spec.rank_bound() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            let samples: Vec<_> = (0..2 * probes)
                .map(|_| {
                    let u: Vec<f64> = (0..2 * spec.dim()).map(|_| rng.gen()).collect();
                    compact_point(&spec, &u)
                })
                .collect();
            let r = numerical_rank(&spec, probes, &samples, 1e-9)
                .map_err(|e| CliError::module("bw.rank_m", e))?;
            json!({ "m": m, "probes": probes, "numerical_rank": r, "bound": spec.rank_bound() })
        }
        None => Value::Null,
    };
    let summary = json!({
        "condenser": condenser_json(bw_condenser(&p.cond)),
        "constant": bound.constant,
        "decay": bound.decay,
        "bound_dominates": dominated,
        "rank": rank,
    });
    w.table(
        "bw_error",
        &error_table_csv(&rows),
        &[
            ("m", "number of retained multi-indices"),
            (
                "measured_error",
                "worst case over the Cauchy coefficient ball",
            ),
            ("lemma_bound", "explicit error bound"),
            ("bound_slope", "-log(lemma_bound) / m^(1/n)"),
        ],
        summary,
    )?;
    if !dominated {
        return Err(CliError::Numeric(
            "measured error exceeds the explicit bound".into(),
        ));
    }
    Ok(())
}
