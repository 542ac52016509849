//! Experiment configs: flat TOML sections with typed keys.
//!
//! ```toml
//! [condenser]
//! a = [1.0]
//! b = [0.5]
//!
//! [widths]
//! count = 64
//! ```
//!
//! Sections and keys:
//!
//! | section       | keys |
//! |---------------|------|
//! | `condenser`   | `a`, `b`, `p` (powers, makes it polyhedral), `shift` (list of `[re, im]`) |
//! | `weight`      | `tau`, `radii` (default: `condenser.a`), `normalized` (bool) |
//! | `widths`      | `count`, `k` (default 0), `shrink`, `supnorm` (default true) |
//! | `toeplitz`    | `symbol` (`disc`, `annulus`, `polydisc`), `rho`, `gamma`, `k_list` |
//! | `bergman`     | `k_list`, `points` (each `[re_1, im_1, re_2, im_2, …]`) |
//! | `capacity`    | `shape` (`annulus`, `square-disc`), `outer`, `inner`, `n`, `grid` (file), `tolerance`, `max_iterations`, `levels`, `sublevel` |
//! | `bw`          | `m_max` (default 200), `rank_m` |
//! | `verify`      | `criteria`, `slope_tolerance` |

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use widthlab::bergman::RadialWeight;
use widthlab::bergmanweil::BwCondenser;
use widthlab::capacity::{
    Condenser, PlanarCondenserGrid, PolyhedralCondenser, ReinhardtCondenser, SolverOptions,
};
use widthlab::toeplitz::SymbolSpec;
use widthlab::Complex64;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Widths,
    ToeplitzScan,
    BergmanDensity,
    Capacity,
    BwApprox,
    Verify,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Widths => "widths",
            ExperimentKind::ToeplitzScan => "toeplitz-scan",
            ExperimentKind::BergmanDensity => "bergman-density",
            ExperimentKind::Capacity => "capacity",
            ExperimentKind::BwApprox => "bw-approx",
            ExperimentKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub condenser: Option<CondenserSection>,
    pub weight: Option<WeightSection>,
    pub widths: Option<WidthsSection>,
    pub toeplitz: Option<ToeplitzSection>,
    pub bergman: Option<BergmanSection>,
    pub capacity: Option<CapacitySection>,
    pub bw: Option<BwSection>,
    pub verify: Option<VerifySection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondenserSection {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub p: Option<Vec<u32>>,
    pub shift: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSection {
    pub tau: Option<Vec<f64>>,
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthsSection {
    pub count: usize,
    #[serde(default)]
    pub k: f64,
    pub shrink: Option<f64>,
    #[serde(default = "yes")]
    pub supnorm: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    Disc,
    Annulus,
    Polydisc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToeplitzSection {
    pub symbol: SymbolKind,
    pub rho: Vec<f64>,
    pub gamma: f64,
    pub k_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BergmanSection {
    pub k_list: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridShape {
    Annulus,
    SquareDisc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySection {
    pub shape: Option<GridShape>,
    pub outer: Option<f64>,
    pub inner: Option<f64>,
    pub n: Option<usize>,
    pub grid: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub levels: Option<Vec<f64>>,
    #[serde(default)]
    pub sublevel: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BwSection {
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    pub rank_m: Option<usize>,
}

fn default_m_max() -> usize {
    200
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub criteria: Option<Vec<u32>>,
    pub slope_tolerance: Option<f64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Ok((Self::parse(&text)?, text))
    }

    /// Validates the sections needed by `kind` and builds the module inputs.
    /// `base` resolves relative file paths.
    pub fn plan(&self, kind: ExperimentKind, base: &Path) -> CliResult<Plan> {
        match kind {
            ExperimentKind::Widths => self.widths_plan().map(Plan::Widths),
            ExperimentKind::ToeplitzScan => self.toeplitz_plan().map(Plan::Toeplitz),
            ExperimentKind::BergmanDensity => self.bergman_plan().map(Plan::Bergman),
            ExperimentKind::Capacity => self.capacity_plan(base).map(Plan::Capacity),
            ExperimentKind::BwApprox => self.bw_plan().map(Plan::BwApprox),
            ExperimentKind::Verify => Ok(Plan::Verify(self.verify.clone().unwrap_or_default())),
        }
    }

    fn condenser(&self) -> CliResult<BwCondenser> {
        let c = self
            .condenser
            .as_ref()
            .ok_or_else(|| usage("condenser", "section is required"))?;
        check_radii(&c.a, &c.b)?;
        match (&c.p, &c.shift) {
            (None, None) => Ok(BwCondenser::Reinhardt(
                ReinhardtCondenser::new(c.a.clone(), c.b.clone())
                    .map_err(|e| CliError::module("condenser", e))?,
            )),
            (None, Some(_)) => Err(usage("condenser.shift", "requires condenser.p")),
            (Some(p), shift) => {
                if p.len() != c.a.len() {
                    return Err(usage(
                        "condenser.p",
                        format!("has {} entries, condenser.a has {}", p.len(), c.a.len()),
                    ));
                }
                if let Some(k) = p.iter().position(|&pk| pk == 0) {
                    return Err(usage(&format!("condenser.p[{k}]"), "must be positive"));
                }
                let poly = match shift {
                    None => PolyhedralCondenser::new(p.clone(), c.a.clone(), c.b.clone()),
                    Some(s) => {
                        if s.len() != c.a.len() {
                            return Err(usage(
                                "condenser.shift",
                                format!("has {} entries, condenser.a has {}", s.len(), c.a.len()),
                            ));
                        }
                        for (k, (v, b)) in s.iter().zip(&c.b).enumerate() {
                            if !(v[0].hypot(v[1]) < b / 2.0) {
                                return Err(usage(
                                    &format!("condenser.shift[{k}]"),
                                    format!("modulus must be below b/2 = {}", b / 2.0),
                                ));
                            }
                        }
                        let shifts = s.iter().map(|v| Complex64::new(v[0], v[1])).collect();
                        PolyhedralCondenser::with_shift(p.clone(), shifts, c.a.clone(), c.b.clone())
                    }
                };
                Ok(BwCondenser::Polyhedral(
                    poly.map_err(|e| CliError::module("condenser", e))?,
                ))
            }
        }
    }

    fn reinhardt(&self) -> CliResult<ReinhardtCondenser> {
        match self.condenser()? {
            BwCondenser::Reinhardt(c) => Ok(c),
            BwCondenser::Polyhedral(_) => Err(usage(
                "condenser.p",
                "this experiment needs a polydisc condenser",
            )),
        }
    }

    /// Weight from `[weight]`; `normalized = true` derives it from the condenser.
    fn weight(&self, default_radii: Option<&[f64]>) -> CliResult<RadialWeight> {
        let w = self
            .weight
            .as_ref()
            .ok_or_else(|| usage("weight", "section is required"))?;
        if w.normalized {
            if w.tau.is_some() {
                return Err(usage(
                    "weight.tau",
                    "cannot be combined with weight.normalized",
                ));
            }
            let c = self
                .condenser
                .as_ref()
                .ok_or_else(|| usage("weight.normalized", "needs a [condenser] section"))?;
            check_radii(&c.a, &c.b)?;
            return RadialWeight::normalized_for(&c.a, &c.b)
                .map_err(|e| CliError::module("weight", e));
        }
        let tau = w
            .tau
            .as_ref()
            .ok_or_else(|| usage("weight.tau", "is required"))?;
        for (k, t) in tau.iter().enumerate() {
            if !(*t > 0.0 && t.is_finite()) {
                return Err(usage(
                    &format!("weight.tau[{k}]"),
                    format!("must be positive, got {t}"),
                ));
            }
        }
        let radii = match (&w.radii, default_radii) {
            (Some(r), _) => r.clone(),
            (None, Some(r)) => r.to_vec(),
            (None, None) => return Err(usage("weight.radii", "is required")),
        };
        if radii.len() != tau.len() {
            return Err(usage(
                "weight.radii",
                format!("has {} entries, weight.tau has {}", radii.len(), tau.len()),
            ));
        }
        for (k, r) in radii.iter().enumerate() {
            if !(*r > 0.0 && r.is_finite()) {
                return Err(usage(
                    &format!("weight.radii[{k}]"),
                    format!("must be positive, got {r}"),
                ));
            }
        }
        RadialWeight::new(tau.clone(), radii).map_err(|e| CliError::module("weight", e))
    }

    fn widths_plan(&self) -> CliResult<WidthsPlan> {
        let s = self
            .widths
            .as_ref()
            .ok_or_else(|| usage("widths", "section is required"))?;
        let cond = self.reinhardt()?;
        if s.count == 0 {
            return Err(usage("widths.count", "must be at least 1"));
        }
        if !(s.k >= 0.0 && s.k.is_finite()) {
            return Err(usage(
                "widths.k",
                format!("must be finite and >= 0, got {}", s.k),
            ));
        }
        let weight = if s.k > 0.0 {
            let w = self.weight(Some(cond.outer()))?;
            if w.radii() != cond.outer() {
                return Err(usage("weight.radii", "must equal condenser.a"));
            }
            Some(w)
        } else {
            None
        };
        if let Some(shrink) = s.shrink {
            let max_ratio = cond
                .outer()
                .iter()
                .zip(cond.inner())
                .map(|(a, b)| b / a)
                .fold(0.0, f64::max);
            if !(shrink > max_ratio && shrink < 1.0) {
                return Err(usage(
                    "widths.shrink",
                    format!("must lie in ({max_ratio}, 1), got {shrink}"),
                ));
            }
        }
        Ok(WidthsPlan {
            cond,
            weight,
            k: s.k,
            count: s.count,
            shrink: s.shrink,
            supnorm: s.supnorm,
        })
    }

    fn toeplitz_plan(&self) -> CliResult<ToeplitzPlan> {
        let s = self
            .toeplitz
            .as_ref()
            .ok_or_else(|| usage("toeplitz", "section is required"))?;
        let weight = self.weight(None)?;
        let n = weight.dim();
        let symbol = match s.symbol {
            SymbolKind::Disc => {
                if n != 1 || s.rho.len() != 1 {
                    return Err(usage(
                        "toeplitz.rho",
                        "a disc symbol needs one radius and a one-dimensional weight",
                    ));
                }
                SymbolSpec::RadialDisc { rho: s.rho[0] }
            }
            SymbolKind::Annulus => {
                if n != 1 || s.rho.len() != 2 || !(s.rho[0] < s.rho[1]) {
                    return Err(usage(
                        "toeplitz.rho",
                        "an annulus symbol needs [inner, outer] with inner < outer and a one-dimensional weight",
                    ));
                }
                SymbolSpec::RadialAnnulus {
                    inner: s.rho[0],
                    outer: s.rho[1],
                }
            }
            SymbolKind::Polydisc => {
                if s.rho.len() != n {
                    return Err(usage(
                        "toeplitz.rho",
                        format!("needs {n} radii, got {}", s.rho.len()),
                    ));
                }
                SymbolSpec::Polydisc { rho: s.rho.clone() }
            }
        };
        for (k, (r, big)) in s.rho.iter().zip(weight.radii().iter().cycle()).enumerate() {
            if !(*r > 0.0 && r < big) {
                return Err(usage(
                    &format!("toeplitz.rho[{k}]"),
                    format!("must lie in (0, {big}), got {r}"),
                ));
            }
        }
        if !(s.gamma > 0.0 && s.gamma < 1.0) {
            return Err(usage(
                "toeplitz.gamma",
                format!("must lie in (0, 1), got {}", s.gamma),
            ));
        }
        check_scales("toeplitz.k_list", &s.k_list)?;
        Ok(ToeplitzPlan {
            weight,
            symbol,
            gamma: s.gamma,
            k_list: s.k_list.clone(),
        })
    }

    fn bergman_plan(&self) -> CliResult<BergmanPlan> {
        let s = self
            .bergman
            .as_ref()
            .ok_or_else(|| usage("bergman", "section is required"))?;
        let weight = self.weight(None)?;
        let n = weight.dim();
        check_scales("bergman.k_list", &s.k_list)?;
        if s.points.is_empty() {
            return Err(usage("bergman.points", "needs at least one point"));
        }
        let mut points = Vec::with_capacity(s.points.len());
        for (i, p) in s.points.iter().enumerate() {
            if p.len() != 2 * n {
                return Err(usage(
                    &format!("bergman.points[{i}]"),
                    format!(
                        "needs {} numbers (re, im per coordinate), got {}",
                        2 * n,
                        p.len()
                    ),
                ));
            }
            let z: Vec<Complex64> = p.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            for (k, (w, r)) in z.iter().zip(weight.radii()).enumerate() {
                if !(w.norm() < *r) {
                    return Err(usage(
                        &format!("bergman.points[{i}]"),
                        format!("coordinate {k} has modulus {} >= {r}", w.norm()),
                    ));
                }
            }
            points.push(z);
        }
        Ok(BergmanPlan {
            weight,
            k_list: s.k_list.clone(),
            points,
        })
    }

    fn capacity_plan(&self, base: &Path) -> CliResult<CapacityPlan> {
        let closed = match &self.condenser {
            Some(_) => Some(self.condenser()?),
            None => None,
        };
        let s = match &self.capacity {
            Some(s) => s,
            None if closed.is_some() => {
                return Ok(CapacityPlan {
                    grid: None,
                    options: SolverOptions::default(),
                    closed,
                    sublevel: Vec::new(),
                })
            }
            None => {
                return Err(usage(
                    "capacity",
                    "needs a [capacity] or [condenser] section",
                ))
            }
        };
        let mut options = SolverOptions::default();
        if let Some(t) = s.tolerance {
            if !(t > 0.0) {
                return Err(usage(
                    "capacity.tolerance",
                    format!("must be positive, got {t}"),
                ));
            }
            options.tolerance = t;
        }
        if let Some(m) = s.max_iterations {
            options.max_iterations = m;
        }
        if let Some(levels) = &s.levels {
            if levels.is_empty() {
                return Err(usage("capacity.levels", "needs at least one level"));
            }
            for (k, l) in levels.iter().enumerate() {
                if !(*l > -1.0 && *l < 0.0) {
                    return Err(usage(
                        &format!("capacity.levels[{k}]"),
                        format!("must lie in (-1, 0), got {l}"),
                    ));
                }
            }
            options.levels = levels.clone();
        }
        for (k, c) in s.sublevel.iter().enumerate() {
            if !(*c > 0.0 && *c < 1.0) {
                return Err(usage(
                    &format!("capacity.sublevel[{k}]"),
                    format!("must lie in (0, 1), got {c}"),
                ));
            }
        }
        if !s.sublevel.is_empty() && closed.is_none() {
            return Err(usage("capacity.sublevel", "needs a [condenser] section"));
        }
        let grid = match (&s.grid, s.shape) {
            (Some(_), Some(_)) => {
                return Err(usage(
                    "capacity.grid",
                    "cannot be combined with capacity.shape",
                ))
            }
            (Some(path), None) => {
                let path = if path.is_absolute() {
                    path.clone()
                } else {
                    base.join(path)
                };
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    usage(
                        "capacity.grid",
                        format!("cannot read {}: {e}", path.display()),
                    )
                })?;
                Some(
                    PlanarCondenserGrid::parse(&text)
                        .map_err(|e| CliError::module("capacity.grid", e))?,
                )
            }
            (None, Some(shape)) => {
                let outer = s
                    .outer
                    .ok_or_else(|| usage("capacity.outer", "is required with capacity.shape"))?;
                let inner = s
                    .inner
                    .ok_or_else(|| usage("capacity.inner", "is required with capacity.shape"))?;
                let n =
                    s.n.ok_or_else(|| usage("capacity.n", "is required with capacity.shape"))?;
                if !(inner > 0.0 && inner < outer) {
                    return Err(usage(
                        "capacity.inner",
                        format!("must lie in (0, capacity.outer = {outer}), got {inner}"),
                    ));
                }
                if !(8..=8192).contains(&n) {
                    return Err(usage(
                        "capacity.n",
                        format!("must lie in 8..=8192, got {n}"),
                    ));
                }
                let g = match shape {
                    GridShape::Annulus => PlanarCondenserGrid::annulus(outer, inner, n),
                    GridShape::SquareDisc => PlanarCondenserGrid::square_with_disc(outer, inner, n),
                };
                Some(g.map_err(|e| CliError::module("capacity", e))?)
            }
            (None, None) if closed.is_some() => None,
            (None, None) => {
                return Err(usage(
                    "capacity.shape",
                    "give capacity.shape or capacity.grid",
                ))
            }
        };
        Ok(CapacityPlan {
            grid,
            options,
            closed,
            sublevel: s.sublevel.clone(),
        })
    }

    fn bw_plan(&self) -> CliResult<BwPlan> {
        let s = self.bw.clone().unwrap_or(BwSection {
            m_max: default_m_max(),
            rank_m: None,
        });
        let cond = self.condenser()?;
        if s.m_max == 0 {
            return Err(usage("bw.m_max", "must be at least 1"));
        }
        if let Some(m) = s.rank_m {
            if m == 0 || m as u64 * cond.multiplicity() > 64 {
                return Err(usage(
                    "bw.rank_m",
                    "must be positive with multiplicity * rank_m <= 64",
                ));
            }
        }
        Ok(BwPlan {
            cond,
            m_max: s.m_max,
            rank_m: s.rank_m,
        })
    }
}

fn usage(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{field}: {reason}"))
}

fn check_radii(a: &[f64], b: &[f64]) -> CliResult<()> {
    if a.is_empty() {
        return Err(usage("condenser.a", "needs at least one radius"));
    }
    if a.len() != b.len() {
        return Err(usage(
            "condenser.b",
            format!("has {} entries, condenser.a has {}", b.len(), a.len()),
        ));
    }
    for (k, (ak, bk)) in a.iter().zip(b).enumerate() {
        if !(*ak > 0.0 && ak.is_finite()) {
            return Err(usage(
                &format!("condenser.a[{k}]"),
                format!("must be positive and finite, got {ak}"),
            ));
        }
        if !(*bk > 0.0 && bk < ak) {
            return Err(usage(
                &format!("condenser.b[{k}]"),
                format!("must lie in (0, condenser.a[{k}] = {ak}), got {bk}"),
            ));
        }
    }
    Ok(())
}

fn check_scales(field: &str, k_list: &[f64]) -> CliResult<()> {
    if k_list.is_empty() {
        return Err(usage(field, "needs at least one scale"));
    }
    for (i, k) in k_list.iter().enumerate() {
        if !(*k > 0.0 && k.is_finite()) {
            return Err(usage(
                &format!("{field}[{i}]"),
                format!("must be positive, got {k}"),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum Plan {
    Widths(WidthsPlan),
    Toeplitz(ToeplitzPlan),
    Bergman(BergmanPlan),
    Capacity(CapacityPlan),
    BwApprox(BwPlan),
    Verify(VerifySection),
}

#[derive(Debug, Clone)]
pub struct WidthsPlan {
    pub cond: ReinhardtCondenser,
    pub weight: Option<RadialWeight>,
    pub k: f64,
    pub count: usize,
    pub shrink: Option<f64>,
    pub supnorm: bool,
}

#[derive(Debug, Clone)]
pub struct ToeplitzPlan {
    pub weight: RadialWeight,
    pub symbol: SymbolSpec,
    pub gamma: f64,
    pub k_list: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BergmanPlan {
    pub weight: RadialWeight,
    pub k_list: Vec<f64>,
    pub points: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone)]
pub struct CapacityPlan {
    pub grid: Option<PlanarCondenserGrid>,
    pub options: SolverOptions,
    pub closed: Option<BwCondenser>,
    pub sublevel: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BwPlan {
    pub cond: BwCondenser,
    pub m_max: usize,
    pub rank_m: Option<usize>,
}
