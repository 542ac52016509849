//! Finite-rank approximants `J_m` built from the Bergman–Weil representation
//! for monomial polyhedra `F_k(z) = z_k^{p_k} - c_k`.
//!
//! Functions are represented in the pullback basis `z^μ F(z)^ν` with
//! `μ_k < p_k`; `J_m` keeps the terms whose `ν` lies in the staircase
//! `ν(1), …, ν(m)`. [`contour_apply`] computes the same thing from point
//! values by trapezoidal quadrature over the distinguished boundary.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::capacity::{Condenser, PolyhedralCondenser, ReinhardtCondenser};
use crate::error::{Error, Result};
use crate::multiindex::{
    complement_sum, polynomial_exp_factor, rearrange, tail_sums_upto, GeometryVector,
};
use crate::Complex64;

/// Relative slack on the coefficient decay check.
const DECAY_SLACK: f64 = 1e-12;
/// Convergence target for the boundary integrals in the constant `C`.
const CONSTANT_RTOL: f64 = 1e-12;
const MAX_NODES: usize = 1 << 16;

/// `∏_k Σ_{i<p_k} ζ_k^i z_k^{p_k-1-i}`.
pub fn hefer_det(p: &[u32], zeta: &[Complex64], z: &[Complex64]) -> Complex64 {
    p.iter()
        .zip(zeta.iter().zip(z))
        .map(|(&pk, (s, w))| hefer_entry(pk, *s, *w))
        .product()
}

fn hefer_entry(p: u32, zeta: Complex64, z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zp = Complex64::new(1.0, 0.0);
    // Horner in ζ, giving Σ ζ^{p-1-i} z^i
    for _ in 0..p {
        sum = sum * zeta + zp;
        zp *= z;
    }
    sum
}

/// Hefer matrix of a monomial map: diagonal with the entries of [`hefer_det`].
#[derive(Debug, Clone, PartialEq)]
pub struct HeferData {
    pub powers: Vec<u32>,
    pub shifts: Vec<Complex64>,
}

impl HeferData {
    pub fn new(powers: Vec<u32>, shifts: Vec<Complex64>) -> Result<Self> {
        if powers.len() != shifts.len() || powers.is_empty() {
            return Err(Error::param(
                "powers",
                "powers and shifts must be non-empty and of equal length",
            ));
        }
        if powers.contains(&0) {
            return Err(Error::param("powers", "must be positive"));
        }
        Ok(Self { powers, shifts })
    }

    pub fn map(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.iter()
            .zip(&self.powers)
            .zip(&self.shifts)
            .map(|((w, &p), c)| w.powu(p) - c)
            .collect()
    }

    /// Diagonal of `G(ζ, z)`.
    pub fn matrix(&self, zeta: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
        self.powers
            .iter()
            .zip(zeta.iter().zip(z))
            .map(|(&p, (s, w))| hefer_entry(p, *s, *w))
            .collect()
    }

    pub fn det(&self, zeta: &[Complex64], z: &[Complex64]) -> Complex64 {
        hefer_det(&self.powers, zeta, z)
    }

    /// Exponent pairs `(ζ-exponent, z-exponent)` of the monomials of `det G`;
    /// every coefficient is 1.
    pub fn det_terms(&self) -> Vec<(Vec<u32>, Vec<u32>)> {
        let mut terms = vec![(Vec::new(), Vec::new())];
        for &p in &self.powers {
            let mut next = Vec::with_capacity(terms.len() * p as usize);
            for (s, w) in &terms {
                for i in 0..p {
                    let mut s = s.clone();
                    let mut w = w.clone();
                    s.push(i);
                    w.push(p - 1 - i);
                    next.push((s, w));
                }
            }
            terms = next;
        }
        terms
    }

    /// `max_k |F_k(ζ) - F_k(z) - G_kk (ζ_k - z_k)| / (|ζ_k^p| + |z_k^p| + |c_k|)`.
    pub fn identity_residual(&self, zeta: &[Complex64], z: &[Complex64]) -> f64 {
        let (fz, fw) = (self.map(zeta), self.map(z));
        let g = self.matrix(zeta, z);
        (0..self.powers.len())
            .map(|k| {
                let p = self.powers[k];
                let scale = zeta[k].powu(p).norm() + z[k].powu(p).norm() + self.shifts[k].norm();
                (fz[k] - fw[k] - g[k] * (zeta[k] - z[k])).norm() / scale.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BwCondenser {
    Reinhardt(ReinhardtCondenser),
    Polyhedral(PolyhedralCondenser),
}

impl From<ReinhardtCondenser> for BwCondenser {
    fn from(c: ReinhardtCondenser) -> Self {
        BwCondenser::Reinhardt(c)
    }
}

impl From<PolyhedralCondenser> for BwCondenser {
    fn from(c: PolyhedralCondenser) -> Self {
        BwCondenser::Polyhedral(c)
    }
}

impl BwCondenser {
    fn as_condenser(&self) -> &dyn Condenser {
        match self {
            BwCondenser::Reinhardt(c) => c,
            BwCondenser::Polyhedral(c) => c,
        }
    }

    pub fn dim(&self) -> usize {
        self.as_condenser().dim()
    }

    pub fn outer(&self) -> &[f64] {
        self.as_condenser().outer()
    }

    pub fn inner(&self) -> &[f64] {
        self.as_condenser().inner()
    }

    pub fn multiplicity(&self) -> u64 {
        self.as_condenser().multiplicity()
    }

    pub fn geometry(&self) -> GeometryVector {
        match self {
            BwCondenser::Reinhardt(c) => c.geometry(),
            BwCondenser::Polyhedral(c) => c.geometry(),
        }
    }

    pub fn hefer(&self) -> HeferData {
        match self {
            BwCondenser::Reinhardt(c) => HeferData {
                powers: vec![1; c.dim()],
                shifts: vec![Complex64::new(0.0, 0.0); c.dim()],
            },
            BwCondenser::Polyhedral(c) => HeferData {
                powers: c.powers().to_vec(),
                shifts: c.shifts().to_vec(),
            },
        }
    }
}

/// `J_m` for a condenser: the first `m` multi-indices of the rearrangement.
#[derive(Debug, Clone)]
pub struct ApproximantSpec {
    condenser: BwCondenser,
    hefer: HeferData,
    retained: Vec<Vec<u32>>,
    lookup: HashSet<Vec<u32>>,
}

impl ApproximantSpec {
    pub fn new(condenser: impl Into<BwCondenser>, m: usize) -> Result<Self> {
        let condenser = condenser.into();
        let retained: Vec<Vec<u32>> = if m == 0 {
            Vec::new()
        } else {
            rearrange(&condenser.geometry(), m)?
                .iter_nu()
                .map(|v| v.to_vec())
                .collect()
        };
        let lookup = retained.iter().cloned().collect();
        Ok(Self {
            hefer: condenser.hefer(),
            condenser,
            retained,
            lookup,
        })
    }

    pub fn condenser(&self) -> &BwCondenser {
        &self.condenser
    }

    pub fn m(&self) -> usize {
        self.retained.len()
    }

    pub fn dim(&self) -> usize {
        self.condenser.dim()
    }

    pub fn retained(&self) -> &[Vec<u32>] {
        &self.retained
    }

    pub fn is_retained(&self, nu: &[u32]) -> bool {
        self.lookup.contains(nu)
    }

    /// `m₀ · m`.
    pub fn rank_bound(&self) -> u64 {
        self.condenser.multiplicity() * self.m() as u64
    }

    fn check_in_compact(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if z.len() != self.dim() {
            return Err(Error::OutOfDomain(format!(
                "point has {} coordinates, condenser has {}",
                z.len(),
                self.dim()
            )));
        }
        let fz = self.hefer.map(z);
        for (k, (w, b)) in fz.iter().zip(self.condenser.inner()).enumerate() {
            if !(w.norm() <= b * (1.0 + 1e-12)) {
                return Err(Error::OutOfDomain(format!(
                    "|F_{k}(z)| = {} exceeds b = {b}",
                    w.norm()
                )));
            }
        }
        Ok(fz)
    }
}

/// One term `coeff · z^μ F(z)^ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct PullbackTerm {
    pub mu: Vec<u32>,
    pub nu: Vec<u32>,
    pub coeff: Complex64,
}

/// Checks `μ_k < p_k` and `|coeff| ≤ ∏ a_k^{-ν_k}` for every term.
pub fn validate_coefficients(spec: &ApproximantSpec, g: &[PullbackTerm]) -> Result<()> {
    let n = spec.dim();
    let a = spec.condenser.outer();
    for (i, t) in g.iter().enumerate() {
        if t.mu.len() != n || t.nu.len() != n {
            return Err(Error::Data(format!(
                "term {i}: index length differs from dimension {n}"
            )));
        }
        if let Some(k) = (0..n).find(|&k| t.mu[k] >= spec.hefer.powers[k]) {
            return Err(Error::Data(format!(
                "term {i}: mu_{k} = {} must be below p_{k} = {}",
                t.mu[k], spec.hefer.powers[k]
            )));
        }
        let bound: f64 =
            t.nu.iter()
                .zip(a)
                .map(|(&v, ak)| ak.powi(-(v as i32)))
                .product();
        if !(t.coeff.norm() <= bound * (1.0 + DECAY_SLACK)) {
            return Err(Error::Data(format!(
                "term {i} (nu = {:?}): |coefficient| = {} exceeds the Cauchy bound {bound}",
                t.nu,
                t.coeff.norm()
            )));
        }
    }
    Ok(())
}

fn powers(z: &[Complex64], e: &[u32]) -> Complex64 {
    z.iter().zip(e).map(|(w, &k)| w.powu(k)).product()
}

/// `(J_m g)(z) = Σ_{ν retained} ĝ_{μ,ν} z^μ F(z)^ν`.
pub fn approximant_apply(
    spec: &ApproximantSpec,
    g: &[PullbackTerm],
    z: &[Complex64],
) -> Result<Complex64> {
    validate_coefficients(spec, g)?;
    let fz = spec.check_in_compact(z)?;
    Ok(g.iter()
        .filter(|t| spec.is_retained(&t.nu))
        .map(|t| t.coeff * powers(z, &t.mu) * powers(&fz, &t.nu))
        .sum())
}

/// Point on `{|z^p - c| = r}` at curve parameter `t ∈ [0, 2πp)`; requires `|c| < r`.
fn root_curve(p: u32, c: Complex64, r: f64, t: f64) -> Complex64 {
    let w = Complex64::from_polar(r, t) + c;
    let arg = t + (Complex64::new(1.0, 0.0) + c * Complex64::from_polar(1.0 / r, -t)).arg();
    Complex64::from_polar(w.norm().powf(1.0 / p as f64), arg / p as f64)
}

/// `J_m g` at `z` from point values of `g`, by trapezoidal quadrature with
/// `nodes` points per turn on `{|F_k| = (a_k + b_k)/2}`.
pub fn contour_apply<G>(
    spec: &ApproximantSpec,
    g: G,
    z: &[Complex64],
    nodes: usize,
) -> Result<Complex64>
where
    G: Fn(&[Complex64]) -> Complex64,
{
    if nodes == 0 {
        return Err(Error::param("nodes", "must be positive"));
    }
    let fz = spec.check_in_compact(z)?;
    let n = spec.dim();
    let (a, b) = (spec.condenser.outer(), spec.condenser.inner());
    let max_nu: Vec<u32> = (0..n)
        .map(|k| spec.retained.iter().map(|v| v[k]).max().unwrap_or(0))
        .collect();
    // per axis: node points, kernel weights, and powers (F(z)/F(ζ))^j
    struct Axis {
        zeta: Vec<Complex64>,
        weight: Vec<Complex64>,
        ratio_pow: Vec<Vec<Complex64>>,
    }
    let axes: Vec<Axis> = (0..n)
        .map(|k| {
            let (p, c) = (spec.hefer.powers[k], spec.hefer.shifts[k]);
            let r = 0.5 * (a[k] + b[k]);
            let total = nodes * p as usize;
            let mut axis = Axis {
                zeta: Vec::with_capacity(total),
                weight: Vec::with_capacity(total),
                ratio_pow: Vec::with_capacity(total),
            };
            for j in 0..total {
                let t = 2.0 * PI * j as f64 / nodes as f64;
                let s = root_curve(p, c, r, t);
                let wt = hefer_entry(p, s, z[k]) / (s.powu(p - 1) * p as f64 * nodes as f64);
                let ratio = fz[k] / Complex64::from_polar(r, t);
                let mut pw = Vec::with_capacity(max_nu[k] as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=max_nu[k] {
                    pw.push(acc);
                    acc *= ratio;
                }
                axis.zeta.push(s);
                axis.weight.push(wt);
                axis.ratio_pow.push(pw);
            }
            axis
        })
        .collect();
    let sizes: Vec<usize> = axes.iter().map(|ax| ax.zeta.len()).collect();
    let total: usize = sizes.iter().product();
    let mut idx = vec![0usize; n];
    let mut point = vec![Complex64::new(0.0, 0.0); n];
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..total {
        let mut w = Complex64::new(1.0, 0.0);
        for k in 0..n {
            point[k] = axes[k].zeta[idx[k]];
            w *= axes[k].weight[idx[k]];
        }
        let series: Complex64 = spec
            .retained
            .iter()
            .map(|nu| {
                (0..n)
                    .map(|k| axes[k].ratio_pow[idx[k]][nu[k] as usize])
                    .product::<Complex64>()
            })
            .sum();
        sum += g(&point) * w * series;
        for k in 0..n {
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(sum)
}

/// Numerical rank of `J_m` on the probe monomials `z^β`, `β` the first
/// `probes` indices of the rearrangement for `(1/2, …, 1/2)`, sampled at
/// `samples` points of `K`.
pub fn numerical_rank(
    spec: &ApproximantSpec,
    probes: usize,
    samples: &[Vec<Complex64>],
    rtol: f64,
) -> Result<usize> {
    let n = spec.dim();
    let half = GeometryVector::new(vec![0.5; n])?;
    let betas: Vec<Vec<u32>> = rearrange(&half, probes)?
        .iter_nu()
        .map(|v| v.to_vec())
        .collect();
    let max_deg = betas
        .iter()
        .flat_map(|b| b.iter())
        .copied()
        .max()
        .unwrap_or(0) as usize;
    // exact on the polynomial part once nodes exceed the degree in F
    let nodes = (max_deg + spec.retained.iter().flatten().copied().max().unwrap_or(0) as usize + 8)
        .next_power_of_two();
    let mut mat = DMatrix::<Complex64>::zeros(samples.len(), betas.len());
    for (i, z) in samples.iter().enumerate() {
        for (j, beta) in betas.iter().enumerate() {
            mat[(i, j)] = contour_apply(spec, |w| powers(w, beta), z, nodes)?;
        }
    }
    let sv = mat.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|s| **s > rtol * top).count())
}

/// Points of `K` with `|F_k(z)| = b_k r_k` for random-looking radii and angles
/// drawn from `u ∈ [0,1)^{2n}`.
pub fn compact_point(spec: &ApproximantSpec, u: &[f64]) -> Vec<Complex64> {
    let n = spec.dim();
    (0..n)
        .map(|k| {
            let (p, c) = (spec.hefer.powers[k], spec.hefer.shifts[k]);
            let w = c + Complex64::from_polar(
                spec.condenser.inner()[k] * u[2 * k].sqrt(),
                2.0 * PI * u[2 * k + 1],
            );
            let branch = ((u[2 * k + 1] * 7919.0).fract() * p as f64) as u32;
            w.powf(1.0 / p as f64) * Complex64::from_polar(1.0, 2.0 * PI * branch as f64 / p as f64)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBound {
    /// The constant `C`.
    pub constant: f64,
    /// `c = n! ∏ log(1/α_k)`.
    pub decay: f64,
    pub dim: usize,
    pub m: usize,
    pub value: f64,
}

impl ErrorBound {
    /// `C Σ_{k<n} (cm)^{k/n}/k! · exp(-(cm)^{1/n})`.
    pub fn at(&self, m: usize) -> f64 {
        self.constant * polynomial_exp_factor(self.decay, self.dim, m as f64)
    }

    /// `-log(bound(m)) / m^{1/n}`.
    pub fn slope_at(&self, m: usize) -> f64 {
        -self.at(m).ln() / (m as f64).powf(1.0 / self.dim as f64)
    }
}

/// `∫_0^{2πp} |G(ζ(t), z)| / (p |ζ(t)|^{p-1}) dt` over `{|ζ^p - c| = a}`.
fn boundary_integral(p: u32, c: Complex64, a: f64, z: Complex64) -> Result<f64> {
    let eval = |nodes: usize| {
        let total = nodes * p as usize;
        let h = 2.0 * PI / nodes as f64;
        (0..total)
            .map(|j| {
                let s = root_curve(p, c, a, j as f64 * h);
                hefer_entry(p, s, z).norm() / (p as f64 * s.norm().powi(p as i32 - 1))
            })
            .sum::<f64>()
            * h
    };
    let mut nodes = 64;
    let mut prev = eval(nodes);
    while nodes < MAX_NODES {
        nodes *= 2;
        let next = eval(nodes);
        if (next - prev).abs() <= CONSTANT_RTOL * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::numeric(
        format!("boundary integral did not converge to {CONSTANT_RTOL:e}"),
        nodes,
    ))
}

/// `sup_{|F(z)| ≤ b} boundary_integral`; the integrand is subharmonic in `z`,
/// so the supremum sits on `|z^p - c| = b`.
fn axis_constant(p: u32, c: Complex64, a: f64, b: f64) -> Result<f64> {
    if p == 1 {
        return Ok(2.0 * PI);
    }
    let f = |t: f64| boundary_integral(p, c, a, root_curve(p, c, b, t));
    let samples = 64 * p as usize;
    let step = 2.0 * PI * p as f64 / samples as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..samples {
        let t = i as f64 * step;
        let v = f(t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1)? < f(m2)? {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    Ok(best.1.max(f(0.5 * (lo + hi))?))
}

/// The constant `C` of the error estimate, evaluated on the outer boundary.
pub fn error_constant(cond: &BwCondenser) -> Result<f64> {
    let h = cond.hefer();
    let (a, b) = (cond.outer(), cond.inner());
    let mut out = 1.0;
    for k in 0..cond.dim() {
        let alpha = b[k] / a[k];
        let integral = axis_constant(h.powers[k], h.shifts[k], a[k], b[k])?;
        out *= integral / (2.0 * PI * alpha * -alpha.ln());
    }
    Ok(out)
}

pub fn error_bound(spec: &ApproximantSpec) -> Result<ErrorBound> {
    let constant = error_constant(&spec.condenser)?;
    let geom = spec.condenser.geometry();
    let mut bound = ErrorBound {
        constant,
        decay: geom.decay_constant(),
        dim: spec.dim(),
        m: spec.m(),
        value: 0.0,
    };
    bound.value = bound.at(spec.m());
    Ok(bound)
}

/// Worst case over the Cauchy coefficient ball: `Σ_{l>m} γ_l`.
pub fn measured_error(spec: &ApproximantSpec) -> f64 {
    let geom = spec.condenser.geometry();
    let nus: Vec<&[u32]> = spec.retained.iter().map(|v| v.as_slice()).collect();
    complement_sum(geom.alpha(), &nus)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub m: usize,
    pub measured_error: f64,
    pub lemma_bound: f64,
    pub bound_slope: f64,
}

/// Measured error and bound for `m = 1..=m_max`.
pub fn error_table(cond: &BwCondenser, m_max: usize) -> Result<Vec<ErrorRow>> {
    let geom = cond.geometry();
    let (_, tails) = tail_sums_upto(&geom, m_max)?;
    let bound = ErrorBound {
        constant: error_constant(cond)?,
        decay: geom.decay_constant(),
        dim: cond.dim(),
        m: 0,
        value: 0.0,
    };
    Ok((1..=m_max)
        .map(|m| ErrorRow {
            m,
            measured_error: tails[m],
            lemma_bound: bound.at(m),
            bound_slope: bound.slope_at(m),
        })
        .collect())
}

pub fn error_table_csv(rows: &[ErrorRow]) -> String {
    let mut out = String::from("m,measured_error,lemma_bound,bound_slope\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:?},{:?},{:?}\n",
            r.m, r.measured_error, r.lemma_bound, r.bound_slope
        ));
    }
    out
}
