//! Lattice-point counting and non-increasing rearrangement of geometric
//! multi-sequences `α^ν`, `ν ∈ ℕ₀ⁿ`.
//!
//! The rearrangement `ν(1), ν(2), …` orders multi-indices by the additive
//! cost `Σ ν_k log(1/α_k)`, ties broken lexicographically. The cost is
//! accumulated in a fixed coordinate order, which makes it monotone in
//! every coordinate even in floating point; hence every prefix of the
//! rearrangement is a staircase (downward-closed set).

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::special::{factorial, ln_sum_exp};
use crate::MAX_DIM;

/// Upper limit on the length of a materialized rearrangement.
pub const REARRANGE_CAP: usize = 20_000_000;

/// Relative slack applied to radii in lattice counting so that
/// `Σ ν_k β_k ≤ r` survives rounding when equality holds exactly.
const COUNT_SLACK: f64 = 1e-12;

/// Ratios `α_k = b_k/a_k ∈ (0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryVector {
    alpha: Vec<f64>,
}

impl GeometryVector {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() > MAX_DIM {
            return Err(Error::InvalidGeometry(format!(
                "dimension must be in 1..={MAX_DIM}, got {}",
                alpha.len()
            )));
        }
        if let Some(a) = alpha.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::InvalidGeometry(format!(
                "ratios must lie strictly between 0 and 1, got {a}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// `β_k = log(1/α_k)`.
    pub fn beta(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| -a.ln()).collect()
    }

    /// `c = n!·∏ log(1/α_k)`.
    pub fn decay_constant(&self) -> f64 {
        factorial(self.dim()) * self.beta().iter().product::<f64>()
    }

    /// `Σ_ν α^ν = ∏ 1/(1-α_k)`.
    pub fn total_sum(&self) -> f64 {
        self.alpha.iter().map(|a| 1.0 / (1.0 - a)).product()
    }
}

/// Query for `N_β(r) = #{ν ∈ ℕ₀ⁿ : Σ ν_k β_k ≤ r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingQuery {
    beta: Vec<f64>,
    r: f64,
}

impl CountingQuery {
    pub fn new(beta: Vec<f64>, r: f64) -> Result<Self> {
        if beta.is_empty() || beta.len() > MAX_DIM {
            return Err(Error::InvalidGeometry(format!(
                "dimension must be in 1..={MAX_DIM}, got {}",
                beta.len()
            )));
        }
        if let Some(b) = beta.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(Error::InvalidGeometry(format!(
                "weights must be positive and finite, got {b}"
            )));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::param(
                "r",
                format!("must be finite and >= 0, got {r}"),
            ));
        }
        Ok(Self { beta, r })
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Volume bounds `r^n/(n!∏β) ≤ N_β(r) ≤ (r + Σβ)^n/(n!∏β)`.
    pub fn volume_bounds(&self) -> (f64, f64) {
        let n = self.beta.len();
        let denom = factorial(n) * self.beta.iter().product::<f64>();
        let sum: f64 = self.beta.iter().sum();
        (
            self.r.powi(n as i32) / denom,
            (self.r + sum).powi(n as i32) / denom,
        )
    }
}

/// Number of lattice points in the closed simplex `Σ ν_k β_k ≤ r`.
pub fn count_lattice(query: &CountingQuery) -> u64 {
    fn rec(beta: &[f64], r: f64) -> u64 {
        if r < 0.0 {
            return 0;
        }
        let top = (r / beta[0]).floor() as u64;
        if beta.len() == 1 {
            return top + 1;
        }
        (0..=top)
            .map(|i| rec(&beta[1..], r - i as f64 * beta[0]))
            .sum()
    }
    rec(&query.beta, query.r * (1.0 + COUNT_SLACK))
}

/// Rearranged multi-indices with their values `γ_m = α^{ν(m)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiIndexSequence {
    dim: usize,
    nu: Vec<u32>,
    log_gamma: Vec<f64>,
}

impl MultiIndexSequence {
    pub fn len(&self) -> usize {
        self.log_gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_gamma.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ν(l)` for the 1-based position `l`.
    pub fn nu(&self, l: usize) -> &[u32] {
        assert!(l >= 1 && l <= self.len(), "index {l} out of range");
        &self.nu[(l - 1) * self.dim..l * self.dim]
    }

    pub fn iter_nu(&self) -> impl Iterator<Item = &[u32]> {
        self.nu.chunks(self.dim)
    }

    /// `γ_l` for the 1-based position `l`.
    pub fn gamma(&self, l: usize) -> f64 {
        self.log_gamma[l - 1].exp()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.log_gamma.iter().map(|g| g.exp()).collect()
    }

    /// `log γ_l`, 0-based.
    pub fn log_gammas(&self) -> &[f64] {
        &self.log_gamma
    }
}

fn cost(beta: &[f64], nu: &[u32]) -> f64 {
    nu.iter()
        .zip(beta)
        .fold(0.0, |acc, (&v, &b)| acc + v as f64 * b)
}

fn lex(a: &[u32], b: &[u32]) -> Ordering {
    a.cmp(b)
}

/// The `count` largest values of `α^ν` in non-increasing order.
///
/// Candidates are enumerated inside the simplex `Σ ν_k β_k ≤ r`, with `r`
/// grown geometrically until it holds at least `count` points, and the
/// selected prefix is sorted by (cost, ν).
pub fn rearrange(geom: &GeometryVector, count: usize) -> Result<MultiIndexSequence> {
    if count == 0 {
        return Err(Error::param("M", "must be at least 1"));
    }
    if count > REARRANGE_CAP {
        return Err(Error::Resource {
            requested: count,
            cap: REARRANGE_CAP,
        });
    }
    let n = geom.dim();
    let beta = geom.beta();
    let denom = factorial(n) * beta.iter().product::<f64>();
    let beta_sum: f64 = beta.iter().sum();
    // invert the upper volume bound for a starting radius that cannot overshoot
    let mut r = ((count as f64 * denom).powf(1.0 / n as f64) - beta_sum).max(0.0);
    loop {
        let q = CountingQuery::new(beta.clone(), r)?;
        let found = count_lattice(&q);
        if found >= count as u64 {
            if found > 4 * REARRANGE_CAP as u64 {
                return Err(Error::Resource {
                    requested: found as usize,
                    cap: 4 * REARRANGE_CAP,
                });
            }
            break;
        }
        r = if r == 0.0 {
            beta.iter().copied().fold(f64::INFINITY, f64::min)
        } else {
            r * 1.25
        };
    }

    let r_eff = r * (1.0 + COUNT_SLACK);
    let mut flat: Vec<u32> = Vec::new();
    let mut costs: Vec<f64> = Vec::new();
    let mut current = vec![0u32; n];
    enumerate(&beta, r_eff, 0, 0.0, &mut current, &mut flat, &mut costs);

    let mut order: Vec<usize> = (0..costs.len()).collect();
    let cmp = |&i: &usize, &j: &usize| {
        costs[i]
            .total_cmp(&costs[j])
            .then_with(|| lex(&flat[i * n..(i + 1) * n], &flat[j * n..(j + 1) * n]))
    };
    if order.len() > count {
        order.select_nth_unstable_by(count - 1, cmp);
        order.truncate(count);
    }
    order.sort_unstable_by(cmp);

    let mut nu = Vec::with_capacity(count * n);
    let mut log_gamma = Vec::with_capacity(count);
    for &i in &order {
        nu.extend_from_slice(&flat[i * n..(i + 1) * n]);
        log_gamma.push(-costs[i]);
    }
    Ok(MultiIndexSequence {
        dim: n,
        nu,
        log_gamma,
    })
}

fn enumerate(
    beta: &[f64],
    r: f64,
    axis: usize,
    partial: f64,
    current: &mut [u32],
    flat: &mut Vec<u32>,
    costs: &mut Vec<f64>,
) {
    let n = beta.len();
    let mut v = 0u32;
    loop {
        let c = partial + v as f64 * beta[axis];
        if c > r {
            break;
        }
        current[axis] = v;
        if axis + 1 == n {
            flat.extend_from_slice(current);
            // recompute with the canonical accumulation order
            costs.push(cost(beta, current));
        } else {
            enumerate(beta, r, axis + 1, c, current, flat, costs);
        }
        v += 1;
    }
    current[axis] = 0;
}

/// Best-first enumeration of the `count` smallest separable costs
/// `Σ_k cost_k(ν_k)`, where each `cost_k` is non-decreasing in `ν_k`.
///
/// `axis_cost(k, j)` is queried lazily. Returns the multi-indices and their
/// costs in (cost, ν)-order. Non-monotone axis costs are reported as a data
/// error because the staircase argument behind the search fails for them.
pub fn rearrange_separable<F>(
    dim: usize,
    count: usize,
    mut axis_cost: F,
) -> Result<(Vec<Vec<u32>>, Vec<f64>)>
where
    F: FnMut(usize, u32) -> Result<f64>,
{
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidGeometry(format!(
            "dimension {dim} out of range"
        )));
    }
    if count > REARRANGE_CAP {
        return Err(Error::Resource {
            requested: count,
            cap: REARRANGE_CAP,
        });
    }
    let mut tables: Vec<Vec<f64>> = vec![Vec::new(); dim];
    let mut lookup = |k: usize, j: u32, tables: &mut Vec<Vec<f64>>| -> Result<f64> {
        while tables[k].len() <= j as usize {
            let idx = tables[k].len() as u32;
            let c = axis_cost(k, idx)?;
            if let Some(&prev) = tables[k].last() {
                if c < prev {
                    return Err(Error::Data(format!(
                        "axis {k} cost decreases at index {idx}: {c} < {prev}"
                    )));
                }
            }
            tables[k].push(c);
        }
        Ok(tables[k][j as usize])
    };

    #[derive(PartialEq)]
    struct Node(f64, Vec<u32>);
    impl Eq for Node {}
    impl PartialOrd for Node {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Node {
        fn cmp(&self, other: &Self) -> Ordering {
            self.0
                .total_cmp(&other.0)
                .then_with(|| self.1.cmp(&other.1))
        }
    }

    let mut heap = BinaryHeap::new();
    let origin = vec![0u32; dim];
    let mut c0 = 0.0;
    for k in 0..dim {
        c0 += lookup(k, 0, &mut tables)?;
    }
    heap.push(Reverse(Node(c0, origin)));
    let mut indices = Vec::with_capacity(count);
    let mut costs = Vec::with_capacity(count);
    while indices.len() < count {
        let Some(Reverse(Node(c, nu))) = heap.pop() else {
            break;
        };
        // canonical parent: decrement the last non-zero coordinate, so a
        // child is pushed only along axes at or after that coordinate
        let last = nu.iter().rposition(|&v| v > 0).unwrap_or(0);
        for k in last..dim {
            let mut child = nu.clone();
            child[k] += 1;
            let mut cc = 0.0;
            for (axis, &v) in child.iter().enumerate() {
                cc += lookup(axis, v, &mut tables)?;
            }
            heap.push(Reverse(Node(cc, child)));
        }
        indices.push(nu);
        costs.push(c);
    }
    Ok((indices, costs))
}

/// Sum of `α^ν` over the complement of a staircase `S ⊂ ℕ₀ⁿ`.
///
/// Slices `S` along the first coordinate and closes each slice with an
/// exact geometric remainder, so every term is positive and no
/// cancellation occurs.
pub fn complement_sum(alpha: &[f64], staircase: &[&[u32]]) -> f64 {
    let full: f64 = alpha.iter().map(|a| 1.0 / (1.0 - a)).product();
    if staircase.is_empty() {
        return full;
    }
    let a0 = alpha[0];
    let imax = staircase.iter().map(|nu| nu[0]).max().unwrap_or(0);
    if alpha.len() == 1 {
        return a0.powi(imax as i32 + 1) / (1.0 - a0);
    }
    let mut slices: Vec<Vec<&[u32]>> = vec![Vec::new(); imax as usize + 1];
    for nu in staircase {
        slices[nu[0] as usize].push(&nu[1..]);
    }
    let rest_full: f64 = alpha[1..].iter().map(|a| 1.0 / (1.0 - a)).product();
    let mut total = 0.0;
    let mut pow = 1.0;
    for slice in &slices {
        total += pow * complement_sum(&alpha[1..], slice);
        pow *= a0;
    }
    total + pow / (1.0 - a0) * rest_full
}

/// `log` of [`complement_sum`], for tails far below the `f64` range.
pub fn ln_complement_sum(alpha: &[f64], staircase: &[&[u32]]) -> f64 {
    let ln_full: f64 = alpha.iter().map(|a| -(-a).ln_1p()).sum();
    if staircase.is_empty() {
        return ln_full;
    }
    let ln_a0 = alpha[0].ln();
    let imax = staircase.iter().map(|nu| nu[0]).max().unwrap_or(0);
    if alpha.len() == 1 {
        return (imax as f64 + 1.0) * ln_a0 - (-alpha[0]).ln_1p();
    }
    let mut slices: Vec<Vec<&[u32]>> = vec![Vec::new(); imax as usize + 1];
    for nu in staircase {
        slices[nu[0] as usize].push(&nu[1..]);
    }
    let ln_rest: f64 = alpha[1..].iter().map(|a| -(-a).ln_1p()).sum();
    let mut terms: Vec<f64> = slices
        .iter()
        .enumerate()
        .map(|(i, slice)| i as f64 * ln_a0 + ln_complement_sum(&alpha[1..], slice))
        .collect();
    terms.push((imax as f64 + 1.0) * ln_a0 - (-alpha[0]).ln_1p() + ln_rest);
    ln_sum_exp(&terms)
}

/// Explicit decay bounds for the rearranged sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBounds {
    /// `(∏α_k)^{-1} exp(-(cm)^{1/n})`; `None` for `m = 0`.
    pub gamma_bound: Option<f64>,
    /// Upper bound on `Σ_{l>m} γ_l`.
    pub tail_sum_bound: f64,
    /// `Σ_{l>m} γ_l`.
    pub tail_sum_exact: f64,
}

/// `(∏α)^{-1} exp(-(cm)^{1/n})`.
pub fn gamma_bound(geom: &GeometryVector, m: usize) -> f64 {
    let n = geom.dim() as f64;
    let prod: f64 = geom.alpha().iter().product();
    (-(geom.decay_constant() * m as f64).powf(1.0 / n)).exp() / prod
}

/// `[∏ α_k log(1/α_k)]^{-1} Σ_{k<n} (cm)^{k/n}/k! · exp(-(cm)^{1/n})`.
pub fn tail_sum_bound(geom: &GeometryVector, m: usize) -> f64 {
    let n = geom.dim();
    let prefactor: f64 = geom.alpha().iter().map(|a| 1.0 / (a * -a.ln())).product();
    prefactor * polynomial_exp_factor(geom.decay_constant(), n, m as f64)
}

/// `Σ_{k<n} (cx)^{k/n}/k! · exp(-(cx)^{1/n})`.
pub fn polynomial_exp_factor(c: f64, n: usize, x: f64) -> f64 {
    let root = (c * x).powf(1.0 / n as f64);
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..n {
        if k > 0 {
            term *= root / k as f64;
        }
        sum += term;
    }
    sum * (-root).exp()
}

/// Bounds and exact tail sum at index `m`.
pub fn tail_bounds(geom: &GeometryVector, m: usize) -> Result<TailBounds> {
    let exact = if m == 0 {
        geom.total_sum()
    } else {
        let seq = rearrange(geom, m)?;
        let nus: Vec<&[u32]> = seq.iter_nu().collect();
        complement_sum(geom.alpha(), &nus)
    };
    Ok(TailBounds {
        gamma_bound: (m >= 1).then(|| gamma_bound(geom, m)),
        tail_sum_bound: tail_sum_bound(geom, m),
        tail_sum_exact: exact,
    })
}

/// `Σ_{l>m} γ_l` for every `m = 0..=m_max`, plus the sequence itself.
pub fn tail_sums_upto(
    geom: &GeometryVector,
    m_max: usize,
) -> Result<(MultiIndexSequence, Vec<f64>)> {
    let seq = rearrange(geom, m_max.max(1))?;
    let nus: Vec<&[u32]> = seq.iter_nu().take(m_max).collect();
    let mut tails = vec![0.0; m_max + 1];
    tails[m_max] = complement_sum(geom.alpha(), &nus);
    for m in (0..m_max).rev() {
        tails[m] = tails[m + 1] + seq.gamma(m + 1);
    }
    Ok((seq, tails))
}

/// Like [`tail_sums_upto`], with `log Σ_{l>m} γ_l`.
pub fn ln_tail_sums_upto(
    geom: &GeometryVector,
    m_max: usize,
) -> Result<(MultiIndexSequence, Vec<f64>)> {
    let seq = rearrange(geom, m_max.max(1))?;
    let nus: Vec<&[u32]> = seq.iter_nu().take(m_max).collect();
    let mut tails = vec![0.0; m_max + 1];
    tails[m_max] = ln_complement_sum(geom.alpha(), &nus);
    for m in (0..m_max).rev() {
        tails[m] = ln_sum_exp(&[tails[m + 1], seq.log_gammas()[m]]);
    }
    Ok((seq, tails))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn count_lattice_examples() {
        let q = CountingQuery::new(vec![1.0, 1.0], 2.0).unwrap();
        assert_eq!(count_lattice(&q), 6);
        let (lo, hi) = q.volume_bounds();
        assert_eq!((lo, hi), (2.0, 8.0));
        let ln2 = 2f64.ln();
        let q = CountingQuery::new(vec![ln2], 5.0 * ln2).unwrap();
        assert_eq!(count_lattice(&q), 6);
        let q = CountingQuery::new(vec![1.0, 2.0, 3.0], 0.0).unwrap();
        assert_eq!(count_lattice(&q), 1);
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        assert!(matches!(
            CountingQuery::new(vec![], 1.0),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            CountingQuery::new(vec![1.0, 0.0], 1.0),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            CountingQuery::new(vec![1.0, -2.0], 1.0),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(GeometryVector::new(vec![0.5, 1.0]).is_err());
        assert!(GeometryVector::new(vec![0.5; 9]).is_err());
    }

    #[test]
    fn rearrange_examples() {
        let g = GeometryVector::new(vec![0.5, 1.0 / 3.0]).unwrap();
        let s = rearrange(&g, 5).unwrap();
        for (got, want) in s
            .gammas()
            .iter()
            .zip([1.0, 0.5, 1.0 / 3.0, 0.25, 1.0 / 6.0])
        {
            assert!(close(*got, want, 1e-14), "{got} vs {want}");
        }
        let g = GeometryVector::new(vec![0.5, 0.5]).unwrap();
        let s = rearrange(&g, 6).unwrap();
        for (got, want) in s.gammas().iter().zip([1.0, 0.5, 0.5, 0.25, 0.25, 0.25]) {
            assert!(close(*got, want, 1e-14));
        }
        // lexicographic tie-break
        assert_eq!(s.nu(2), &[0, 1]);
        assert_eq!(s.nu(3), &[1, 0]);
        assert_eq!(s.nu(4), &[0, 2]);
        let g = GeometryVector::new(vec![0.5]).unwrap();
        let s = rearrange(&g, 4).unwrap();
        assert_eq!(
            s.iter_nu().map(|v| v[0]).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
        assert!(close(s.gamma(4), 0.125, 1e-14));
    }

    #[test]
    fn rearrange_limits() {
        let g = GeometryVector::new(vec![0.5]).unwrap();
        assert!(rearrange(&g, 0).is_err());
        assert!(matches!(
            rearrange(&g, REARRANGE_CAP + 1),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn tail_bounds_examples() {
        let g = GeometryVector::new(vec![0.5]).unwrap();
        let t = tail_bounds(&g, 3).unwrap();
        assert!(close(t.gamma_bound.unwrap(), 0.25, 1e-14));
        assert!(rearrange(&g, 4).unwrap().gamma(4) <= t.gamma_bound.unwrap());
        let t = tail_bounds(&g, 4).unwrap();
        assert!(close(t.tail_sum_exact, 0.125, 1e-14));
        let t = tail_bounds(&g, 0).unwrap();
        assert!(t.gamma_bound.is_none());
        assert!(close(t.tail_sum_exact, 2.0, 1e-15));

        let g = GeometryVector::new(vec![0.5, 0.5]).unwrap();
        let t = tail_bounds(&g, 1).unwrap();
        let ln2 = 2f64.ln();
        // c = 2 (log 2)², (c·1)^{1/2} = √2 log 2
        let want = 4.0 * (-(2f64).sqrt() * ln2).exp();
        assert!(close(t.gamma_bound.unwrap(), want, 1e-14));
        assert!((t.gamma_bound.unwrap() - 1.501).abs() < 1e-3);
        assert!(t.gamma_bound.unwrap() >= rearrange(&g, 2).unwrap().gamma(2));
    }

    #[test]
    fn complement_sum_matches_brute_force() {
        let alpha = [0.5, 0.3, 0.7];
        let g = GeometryVector::new(alpha.to_vec()).unwrap();
        let seq = rearrange(&g, 40).unwrap();
        let nus: Vec<&[u32]> = seq.iter_nu().collect();
        let fast = complement_sum(&alpha, &nus);
        let mut brute = 0.0;
        for i in 0..120u32 {
            for j in 0..120u32 {
                for k in 0..120u32 {
                    let v = [i, j, k];
                    if !nus.iter().any(|n| *n == v) {
                        brute += alpha[0].powi(i as i32)
                            * alpha[1].powi(j as i32)
                            * alpha[2].powi(k as i32);
                    }
                }
            }
        }
        assert!(close(fast, brute, 1e-12), "{fast} vs {brute}");
    }

    #[test]
    fn tail_sums_are_consistent() {
        let g = GeometryVector::new(vec![0.4, 0.6]).unwrap();
        let (_, tails) = tail_sums_upto(&g, 200).unwrap();
        for m in [0, 1, 7, 50, 200] {
            let t = tail_bounds(&g, m).unwrap();
            assert!(close(tails[m], t.tail_sum_exact, 1e-12));
        }
    }

    #[test]
    fn log_tails_match_linear_and_survive_underflow() {
        let g = GeometryVector::new(vec![0.4, 0.6]).unwrap();
        let (_, lin) = tail_sums_upto(&g, 300).unwrap();
        let (_, ln) = ln_tail_sums_upto(&g, 300).unwrap();
        for m in 0..=300 {
            assert!(close(ln[m].exp(), lin[m], 1e-12));
        }
        // Σ_{j≥m} 2^{-j} = 2^{1-m}, far below the smallest double
        let half = GeometryVector::new(vec![0.5]).unwrap();
        let (_, ln) = ln_tail_sums_upto(&half, 10_000).unwrap();
        for m in [1, 2000, 10_000] {
            assert!((ln[m] - (1.0 - m as f64) * 2f64.ln()).abs() < 1e-12 * m as f64);
        }
    }

    #[test]
    fn separable_matches_simplex_enumeration() {
        let g = GeometryVector::new(vec![0.35, 0.6, 0.8]).unwrap();
        let beta = g.beta();
        let seq = rearrange(&g, 500).unwrap();
        let (idx, costs) = rearrange_separable(3, 500, |k, j| Ok(j as f64 * beta[k])).unwrap();
        for (l, cost) in costs.iter().enumerate() {
            assert!(close(-cost, seq.log_gammas()[l], 1e-12) || (*cost == 0.0));
            assert!((cost + seq.log_gammas()[l]).abs() < 1e-12);
        }
        // same index sets (ordering may only differ within exact ties)
        let mut a: Vec<Vec<u32>> = idx.clone();
        let mut b: Vec<Vec<u32>> = seq.iter_nu().map(|v| v.to_vec()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn separable_rejects_non_monotone_costs() {
        let r = rearrange_separable(1, 10, |_, j| Ok(if j == 3 { 0.0 } else { j as f64 }));
        assert!(matches!(r, Err(Error::Data(_))));
    }

    fn geometry() -> impl Strategy<Value = GeometryVector> {
        prop::collection::vec(0.05f64..0.9, 1..=3).prop_map(|a| GeometryVector::new(a).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rearrangement_is_sorted_staircase(g in geometry(), m in 1usize..400) {
            let s = rearrange(&g, m).unwrap();
            let gam = s.log_gammas();
            for w in gam.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            let set: std::collections::HashSet<Vec<u32>> = s.iter_nu().map(|v| v.to_vec()).collect();
            prop_assert_eq!(set.len(), m);
            for nu in s.iter_nu() {
                for k in 0..nu.len() {
                    if nu[k] > 0 {
                        let mut below = nu.to_vec();
                        below[k] -= 1;
                        prop_assert!(set.contains(&below));
                    }
                }
            }
        }

        #[test]
        fn volume_bounds_bracket_count(beta in prop::collection::vec(0.1f64..3.0, 1..=4), r in 0.0f64..12.0) {
            let q = CountingQuery::new(beta, r).unwrap();
            let (lo, hi) = q.volume_bounds();
            let n = count_lattice(&q) as f64;
            prop_assert!(lo <= n && n <= hi, "{} <= {} <= {}", lo, n, hi);
        }

        #[test]
        fn counting_reaches_rank(g in geometry(), m in 1usize..300) {
            let s = rearrange(&g, m).unwrap();
            let r = -s.log_gammas()[m - 1];
            let q = CountingQuery::new(g.beta(), r.max(0.0)).unwrap();
            prop_assert!(count_lattice(&q) >= m as u64);
        }

        #[test]
        fn decay_bounds_hold(g in geometry(), m in 0usize..2000) {
            // logs throughout: the n = 1 bound is an equality and reaches subnormals
            let (seq, tails) = ln_tail_sums_upto(&g, m.max(1)).unwrap();
            let n = g.dim();
            let root = (g.decay_constant() * m as f64).powf(1.0 / n as f64);
            let ln_alpha: f64 = g.alpha().iter().map(|a| a.ln()).sum();
            if m >= 1 {
                let ln_bound = -root - ln_alpha;
                prop_assert!(seq.log_gammas()[m - 1] <= ln_bound + 1e-12 * ln_bound.abs().max(1.0));
            }
            let poly: f64 = (0..n).map(|k| root.powi(k as i32) / factorial(k)).sum();
            let ln_tail_bound = poly.ln() - root - g.alpha().iter().map(|a| (a * -a.ln()).ln()).sum::<f64>();
            prop_assert!(tails[m] <= ln_tail_bound + 1e-12 * ln_tail_bound.abs().max(1.0));
        }
    }

    #[test]
    fn one_dimensional_rearrangement_is_identity() {
        let g = GeometryVector::new(vec![0.77]).unwrap();
        let s = rearrange(&g, 1000).unwrap();
        for (m, nu) in s.iter_nu().enumerate() {
            assert_eq!(nu[0] as usize, m);
        }
    }
}
