//! Python module `widthlab`: thin wrappers over the core library taking
//! plain lists and floats.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use widthlab::bergman::{kernel_diagonal as core_kernel_diagonal, ma_density, RadialWeight};
use widthlab::bergmanweil::{error_table as core_error_table, BwCondenser};
use widthlab::capacity::{
    planar_capacity_fd, product_capacity as core_product_capacity, sublevel_scale,
    PlanarCondenserGrid, PolyhedralCondenser, ReinhardtCondenser, SolverOptions,
};
use widthlab::toeplitz::{concentration_scan, SymbolSpec};
use widthlab::widths::{
    embedding_widths as core_embedding_widths, slope_estimate,
    supnorm_bounds as core_supnorm_bounds, target_slope as core_target_slope,
};
use widthlab::{Complex64, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numeric { .. } | Error::Truncation { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn condenser(a: Vec<f64>, b: Vec<f64>, p: Option<Vec<u32>>) -> PyResult<BwCondenser> {
    Ok(match p {
        None => ReinhardtCondenser::new(a, b).map_err(py_err)?.into(),
        Some(p) => PolyhedralCondenser::new(p, a, b).map_err(py_err)?.into(),
    })
}

/// Widths `d_1..d_count` of the embedding for the polydisc pair `(a, b)`.
/// `k > 0` uses the normalized weight of the condenser.
#[pyfunction]
#[pyo3(signature = (a, b, count, k = 0.0))]
fn embedding_widths(a: Vec<f64>, b: Vec<f64>, count: usize, k: f64) -> PyResult<Vec<f64>> {
    let cond = ReinhardtCondenser::new(a.clone(), b.clone()).map_err(py_err)?;
    let weight = if k > 0.0 {
        Some(RadialWeight::normalized_for(&a, &b).map_err(py_err)?)
    } else {
        None
    };
    let t = core_embedding_widths(&cond, k, weight.as_ref(), count).map_err(py_err)?;
    Ok(t.values)
}

/// Natural logs of the widths; finite where `embedding_widths` underflows.
#[pyfunction]
fn ln_embedding_widths(a: Vec<f64>, b: Vec<f64>, count: usize) -> PyResult<Vec<f64>> {
    let cond = ReinhardtCondenser::new(a, b).map_err(py_err)?;
    Ok(core_embedding_widths(&cond, 0.0, None, count)
        .map_err(py_err)?
        .ln_values)
}

/// `(lower, upper)` log tables for the sup-norm widths.
#[pyfunction]
#[pyo3(signature = (a, b, count, shrink = None))]
fn ln_supnorm_bounds(
    a: Vec<f64>,
    b: Vec<f64>,
    count: usize,
    shrink: Option<f64>,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cond = ReinhardtCondenser::new(a, b).map_err(py_err)?;
    let (lo, hi) = core_supnorm_bounds(&cond, count, shrink).map_err(py_err)?;
    Ok((lo.ln_values, hi.ln_values))
}

/// Least-squares slope of `-log d_m` against `m^(1/n)` on the upper half.
#[pyfunction]
fn fitted_slope(a: Vec<f64>, b: Vec<f64>, count: usize) -> PyResult<f64> {
    let n = a.len();
    let cond = ReinhardtCondenser::new(a, b).map_err(py_err)?;
    let t = core_embedding_widths(&cond, 0.0, None, count).map_err(py_err)?;
    Ok(slope_estimate(&t, n).map_err(py_err)?.slope)
}

/// Closed-form relative capacity; `p` makes the condenser a monomial polyhedron.
#[pyfunction]
#[pyo3(signature = (a, b, p = None))]
fn product_capacity(a: Vec<f64>, b: Vec<f64>, p: Option<Vec<u32>>) -> PyResult<f64> {
    Ok(match condenser(a, b, p)? {
        BwCondenser::Reinhardt(c) => core_product_capacity(&c).value,
        BwCondenser::Polyhedral(c) => core_product_capacity(&c).value,
    })
}

#[pyfunction]
fn sublevel_capacity(a: Vec<f64>, b: Vec<f64>, c: f64) -> PyResult<f64> {
    let cond = ReinhardtCondenser::new(a, b).map_err(py_err)?;
    Ok(sublevel_scale(&cond, c).map_err(py_err)?.capacity.value)
}

/// `2π (n!/C)^(1/n)`.
#[pyfunction]
fn target_slope(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    let n = a.len();
    let cond = ReinhardtCondenser::new(a, b).map_err(py_err)?;
    Ok(core_target_slope(&core_product_capacity(&cond), n))
}

/// Finite-difference capacity of the annulus `b < |z| < a` on an `n × n` grid.
#[pyfunction]
fn fd_annulus_capacity(a: f64, b: f64, n: usize) -> PyResult<f64> {
    let grid = PlanarCondenserGrid::annulus(a, b, n).map_err(py_err)?;
    Ok(planar_capacity_fd(&grid, &SolverOptions::default())
        .map_err(py_err)?
        .capacity
        .value)
}

/// `(ln B(z, z), Monge-Ampère density)` for `φ = Σ τ_k |z_k|²` on the polydisc of `radii`.
#[pyfunction]
fn kernel_diagonal(
    tau: Vec<f64>,
    radii: Vec<f64>,
    k: f64,
    z: Vec<Complex64>,
) -> PyResult<(f64, f64)> {
    let w = RadialWeight::new(tau, radii).map_err(py_err)?;
    let d = core_kernel_diagonal(&w, k, &z, None).map_err(py_err)?;
    Ok((d.ln_value, ma_density(&w)))
}

/// Counts of Toeplitz eigenvalues above `gamma` for the disc symbol `|z| ≤ rho`.
#[pyfunction]
fn concentration_counts(
    tau: f64,
    radius: f64,
    rho: f64,
    gamma: f64,
    k_list: Vec<f64>,
) -> PyResult<Vec<usize>> {
    let w = RadialWeight::new(vec![tau], vec![radius]).map_err(py_err)?;
    let scan =
        concentration_scan(&w, &SymbolSpec::RadialDisc { rho }, gamma, &k_list).map_err(py_err)?;
    Ok(scan.points.iter().map(|p| p.count).collect())
}

/// Rows `(m, measured_error, bound)` for `m = 1..=m_max`.
#[pyfunction]
#[pyo3(signature = (a, b, m_max, p = None))]
fn bw_error_table(
    a: Vec<f64>,
    b: Vec<f64>,
    m_max: usize,
    p: Option<Vec<u32>>,
) -> PyResult<Vec<(usize, f64, f64)>> {
    let rows = core_error_table(&condenser(a, b, p)?, m_max).map_err(py_err)?;
    Ok(rows
        .iter()
        .map(|r| (r.m, r.measured_error, r.lemma_bound))
        .collect())
}

#[pymodule]
#[pyo3(name = "widthlab")]
fn widthlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(embedding_widths, m)?)?;
    m.add_function(wrap_pyfunction!(ln_embedding_widths, m)?)?;
    m.add_function(wrap_pyfunction!(ln_supnorm_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(fitted_slope, m)?)?;
    m.add_function(wrap_pyfunction!(product_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(sublevel_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(target_slope, m)?)?;
    m.add_function(wrap_pyfunction!(fd_annulus_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(concentration_counts, m)?)?;
    m.add_function(wrap_pyfunction!(bw_error_table, m)?)?;
    Ok(())
}
