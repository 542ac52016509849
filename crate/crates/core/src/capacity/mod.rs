//! Relative extremal functions and relative capacities.
//!
//! Closed forms cover polydiscs and monomial polyhedra
//! `U_a = {|z_k^{p_k} - c_k| < a_k}`; the planar finite-difference solver in
//! [`fd`] handles arbitrary one-dimensional condensers given as masks.

pub mod fd;
pub mod grid;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiindex::GeometryVector;
use crate::{Complex64, MAX_DIM};

pub use fd::{planar_capacity_fd, PlanarSolution, SolverOptions};
pub use grid::{Cell, PlanarCondenserGrid};

/// How a capacity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    FluxIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityValue {
    pub value: f64,
    pub provenance: Provenance,
    /// The condenser carries a non-zero regular-value shift; the value is
    /// the closed form of the unshifted polyhedron.
    pub shifted: bool,
}

impl CapacityValue {
    pub(crate) fn new(value: f64, provenance: Provenance, shifted: bool) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::numeric(
                format!("capacity {value} is not positive and finite"),
                0,
            ));
        }
        Ok(Self {
            value,
            provenance,
            shifted,
        })
    }
}

/// A condenser `(K, D)` with closed-form extremal function and capacity.
pub trait Condenser {
    fn dim(&self) -> usize;
    fn outer(&self) -> &[f64];
    fn inner(&self) -> &[f64];
    /// Multiplicity of the defining map.
    fn multiplicity(&self) -> u64;
    /// `|F_k(z)|` for every coordinate.
    fn level_moduli(&self, z: &[Complex64]) -> Result<Vec<f64>>;
    fn is_shifted(&self) -> bool;
}

fn check_radii(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || a.len() > MAX_DIM {
        return Err(Error::InvalidGeometry(format!(
            "dimension must be in 1..={MAX_DIM}, got {}",
            a.len()
        )));
    }
    if a.len() != b.len() {
        return Err(Error::InvalidGeometry(format!(
            "outer and inner radii differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    for (k, (&ak, &bk)) in a.iter().zip(b).enumerate() {
        if !(bk > 0.0 && bk < ak && ak.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "need 0 < b < a in coordinate {k}, got a = {ak}, b = {bk}"
            )));
        }
    }
    Ok(())
}

/// Polydisc pair `K = P(b) ⊂ D = P(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReinhardtCondenser {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ReinhardtCondenser {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        check_radii(&a, &b)?;
        Ok(Self { a, b })
    }

    pub fn geometry(&self) -> GeometryVector {
        GeometryVector::new(self.a.iter().zip(&self.b).map(|(a, b)| b / a).collect())
            .expect("validated radii give valid ratios")
    }
}

impl Condenser for ReinhardtCondenser {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn outer(&self) -> &[f64] {
        &self.a
    }
    fn inner(&self) -> &[f64] {
        &self.b
    }
    fn multiplicity(&self) -> u64 {
        1
    }
    fn level_moduli(&self, z: &[Complex64]) -> Result<Vec<f64>> {
        check_point(z, self.dim())?;
        Ok(z.iter().map(|w| w.norm()).collect())
    }
    fn is_shifted(&self) -> bool {
        false
    }
}

/// Monomial polyhedron `K = {|z_k^{p_k} - c_k| ≤ b_k} ⊂ D = {|z_k^{p_k} - c_k| < a_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCondenser {
    p: Vec<u32>,
    c: Vec<Complex64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PolyhedralCondenser {
    /// Uses the default shift `(b_k/100)(1+i)/√2` for `p_k ≥ 2`, zero otherwise.
    pub fn new(p: Vec<u32>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        check_radii(&a, &b)?;
        let c = p
            .iter()
            .zip(&b)
            .map(|(&pk, &bk)| {
                if pk >= 2 {
                    Complex64::new(1.0, 1.0) * (bk / 100.0 * FRAC_1_SQRT_2)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self::with_shift(p, c, a, b)
    }

    pub fn with_shift(p: Vec<u32>, c: Vec<Complex64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        check_radii(&a, &b)?;
        if p.len() != a.len() || c.len() != a.len() {
            return Err(Error::InvalidGeometry(format!(
                "powers ({}), shifts ({}) and radii ({}) differ in length",
                p.len(),
                c.len(),
                a.len()
            )));
        }
        if p.contains(&0) {
            return Err(Error::InvalidGeometry("powers must be positive".into()));
        }
        for (k, (ck, bk)) in c.iter().zip(&b).enumerate() {
            if !(ck.norm() < bk / 2.0) {
                return Err(Error::InvalidGeometry(format!(
                    "shift |c| = {} must be below b/2 = {} in coordinate {k}",
                    ck.norm(),
                    bk / 2.0
                )));
            }
        }
        Ok(Self { p, c, a, b })
    }

    pub fn powers(&self) -> &[u32] {
        &self.p
    }

    pub fn shifts(&self) -> &[Complex64] {
        &self.c
    }

    pub fn geometry(&self) -> GeometryVector {
        GeometryVector::new(self.a.iter().zip(&self.b).map(|(a, b)| b / a).collect())
            .expect("validated radii give valid ratios")
    }

    /// `F(z) = (z_k^{p_k} - c_k)_k`.
    pub fn map(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.iter()
            .zip(&self.p)
            .zip(&self.c)
            .map(|((w, &p), c)| w.powu(p) - c)
            .collect()
    }
}

impl Condenser for PolyhedralCondenser {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn outer(&self) -> &[f64] {
        &self.a
    }
    fn inner(&self) -> &[f64] {
        &self.b
    }
    fn multiplicity(&self) -> u64 {
        self.p.iter().map(|&p| p as u64).product()
    }
    fn level_moduli(&self, z: &[Complex64]) -> Result<Vec<f64>> {
        check_point(z, self.dim())?;
        Ok(self.map(z).iter().map(|w| w.norm()).collect())
    }
    fn is_shifted(&self) -> bool {
        self.c.iter().any(|c| c.norm() > 0.0)
    }
}

fn check_point(z: &[Complex64], n: usize) -> Result<()> {
    if z.len() != n {
        return Err(Error::OutOfDomain(format!(
            "point has {} coordinates, condenser has {n}",
            z.len()
        )));
    }
    if z.iter().any(|w| !(w.re.is_finite() && w.im.is_finite())) {
        return Err(Error::OutOfDomain("non-finite coordinate".into()));
    }
    Ok(())
}

/// `max_k log(|F_k(z)|/a_k) / log(a_k/b_k)` clamped to `[-1, 0]`.
///
/// Points on the outer boundary evaluate to 0; points beyond it are rejected.
pub fn product_extremal_at<C: Condenser + ?Sized>(cond: &C, z: &[Complex64]) -> Result<f64> {
    let moduli = cond.level_moduli(z)?;
    let mut u = f64::NEG_INFINITY;
    for ((&m, &a), &b) in moduli.iter().zip(cond.outer()).zip(cond.inner()) {
        // a few ulps of slack for points placed on the boundary by polar maps
        if m > a * (1.0 + 1e-14) {
            return Err(Error::OutOfDomain(format!(
                "|F(z)| = {m} exceeds the outer radius {a}"
            )));
        }
        u = u.max((m / a).ln() / (a / b).ln());
    }
    Ok(u.clamp(-1.0, 0.0))
}

/// `(2π)^n m₀ / ∏ log(a_k/b_k)`.
pub fn product_capacity<C: Condenser + ?Sized>(cond: &C) -> CapacityValue {
    let n = cond.dim() as i32;
    let logs: f64 = cond
        .outer()
        .iter()
        .zip(cond.inner())
        .map(|(a, b)| (a / b).ln())
        .product();
    let value = (2.0 * PI).powi(n) * cond.multiplicity() as f64 / logs;
    CapacityValue::new(value, Provenance::ClosedForm, cond.is_shifted())
        .expect("validated radii give a finite positive capacity")
}

/// Sublevel set `K_c = {u ≤ -1 + c}` as an explicit condenser, with its capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct Sublevel<C> {
    /// Inner radii of `K_c`: `a_k (b_k/a_k)^{1-c}`.
    pub radii: Vec<f64>,
    pub condenser: C,
    /// `C(K, D) / (1 - c)^n`.
    pub capacity: CapacityValue,
}

/// Condensers whose sublevel sets are of the same explicit kind.
pub trait SublevelFamily: Condenser + Sized {
    fn with_inner(&self, b: Vec<f64>) -> Result<Self>;
}

impl SublevelFamily for ReinhardtCondenser {
    fn with_inner(&self, b: Vec<f64>) -> Result<Self> {
        Self::new(self.a.clone(), b)
    }
}

impl SublevelFamily for PolyhedralCondenser {
    fn with_inner(&self, b: Vec<f64>) -> Result<Self> {
        Self::with_shift(self.p.clone(), self.c.clone(), self.a.clone(), b)
    }
}

pub fn sublevel_scale<C: SublevelFamily>(cond: &C, c: f64) -> Result<Sublevel<C>> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::param("c", format!("must lie in (0, 1), got {c}")));
    }
    let radii: Vec<f64> = cond
        .outer()
        .iter()
        .zip(cond.inner())
        .map(|(a, b)| a * (b / a).powf(1.0 - c))
        .collect();
    let condenser = cond.with_inner(radii.clone())?;
    let base = product_capacity(cond);
    let capacity = CapacityValue::new(
        base.value / (1.0 - c).powi(cond.dim() as i32),
        Provenance::ClosedForm,
        base.shifted,
    )?;
    Ok(Sublevel {
        radii,
        condenser,
        capacity,
    })
}
