//! Cell masks for planar condensers and their text format.
//!
//! ```text
//! C1
//! # comments start with '#'
//! <width> <height>
//! <h> <x0> <y0>
//! <height rows of width digits: 0 outside, 1 domain, 2 compact>
//! ```
//!
//! The first row is `j = 0`; cell `(i, j)` is centred at
//! `(x0 + (i + 1/2) h, y0 + (j + 1/2) h)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Minimum Chebyshev distance, in cells, between a compact cell and any
/// outside cell (so at least four domain cells separate them).
pub const MIN_SEPARATION: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Cell {
    Outside = 0,
    Domain = 1,
    Compact = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCondenserGrid {
    width: usize,
    height: usize,
    h: f64,
    origin: (f64, f64),
    cells: Vec<Cell>,
}

impl PlanarCondenserGrid {
    pub fn new(
        width: usize,
        height: usize,
        h: f64,
        origin: (f64, f64),
        cells: Vec<Cell>,
    ) -> Result<Self> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(Error::Geometry(format!(
                "{} cells do not fill a {width}x{height} grid",
                cells.len()
            )));
        }
        if !(h > 0.0 && h.is_finite()) || !origin.0.is_finite() || !origin.1.is_finite() {
            return Err(Error::Geometry(format!(
                "invalid spacing {h} or origin {origin:?}"
            )));
        }
        let grid = Self {
            width,
            height,
            h,
            origin,
            cells,
        };
        grid.check_separation()?;
        Ok(grid)
    }

    /// Disc of radius `a` around an annular compact `|z| ≤ b`, on an
    /// `n × n` grid over `[-a, a]²`.
    pub fn annulus(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > 0.0 && b < a) {
            return Err(Error::InvalidGeometry(format!(
                "need 0 < b < a, got a = {a}, b = {b}"
            )));
        }
        let h = 2.0 * a / n as f64;
        Self::from_fn(n, n, h, (-a, -a), |x, y| {
            let r = x.hypot(y);
            if r <= b {
                Cell::Compact
            } else if r < a {
                Cell::Domain
            } else {
                Cell::Outside
            }
        })
    }

    /// Open square `|x|, |y| < s/2` around the disc `|z| ≤ r`, with one ring
    /// of outside cells; `n` cells across the square.
    pub fn square_with_disc(s: f64, r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0 && 2.0 * r < s) {
            return Err(Error::InvalidGeometry(format!(
                "disc radius {r} does not fit in a square of side {s}"
            )));
        }
        let h = s / n as f64;
        let half = s / 2.0;
        Self::from_fn(n + 2, n + 2, h, (-half - h, -half - h), |x, y| {
            if x.hypot(y) <= r {
                Cell::Compact
            } else if x.abs() < half && y.abs() < half {
                Cell::Domain
            } else {
                Cell::Outside
            }
        })
    }

    /// Classifies each cell centre with `f(x, y)`.
    pub fn from_fn<F: Fn(f64, f64) -> Cell>(
        width: usize,
        height: usize,
        h: f64,
        origin: (f64, f64),
        f: F,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                let x = origin.0 + (i as f64 + 0.5) * h;
                let y = origin.1 + (j as f64 + 0.5) * h;
                cells.push(f(x, y));
            }
        }
        Self::new(width, height, h, origin, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn spacing(&self) -> f64 {
        self.h
    }
    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
    pub fn cell(&self, i: usize, j: usize) -> Cell {
        self.cells[j * self.width + i]
    }
    pub fn centre(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + (i as f64 + 0.5) * self.h,
            self.origin.1 + (j as f64 + 0.5) * self.h,
        )
    }
    pub fn count(&self, kind: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == kind).count()
    }

    fn check_separation(&self) -> Result<()> {
        if self.count(Cell::Compact) == 0 {
            return Err(Error::Geometry("compact mask is empty".into()));
        }
        let (w, hgt) = (self.width as isize, self.height as isize);
        let reach = MIN_SEPARATION as isize - 1;
        for j in 0..hgt {
            for i in 0..w {
                if self.cells[(j * w + i) as usize] != Cell::Compact {
                    continue;
                }
                // cells beyond the grid count as outside
                if i - reach < 0 || j - reach < 0 || i + reach >= w || j + reach >= hgt {
                    return Err(Error::Geometry(format!(
                        "compact cell ({i}, {j}) lies within {MIN_SEPARATION} cells of the grid edge"
                    )));
                }
                for dj in -reach..=reach {
                    for di in -reach..=reach {
                        if self.cells[((j + dj) * w + i + di) as usize] == Cell::Outside {
                            return Err(Error::Geometry(format!(
                                "compact cell ({i}, {j}) is within {MIN_SEPARATION} cells of outside cell ({}, {})",
                                i + di,
                                j + dj
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, magic) = lines.next().ok_or(Error::Parse {
            line: 0,
            reason: "empty input".into(),
        })?;
        if magic != "C1" {
            return Err(Error::Parse {
                line: ln,
                reason: format!("expected magic `C1`, found `{magic}`"),
            });
        }
        let (ln, dims) = lines.next().ok_or(Error::Parse {
            line: ln,
            reason: "missing grid dimensions".into(),
        })?;
        let dims: Vec<usize> = parse_fields(ln, dims, 2)?;
        let (ln, geo) = lines.next().ok_or(Error::Parse {
            line: ln,
            reason: "missing spacing and origin".into(),
        })?;
        let geo: Vec<f64> = parse_fields(ln, geo, 3)?;
        let (width, height) = (dims[0], dims[1]);
        let mut cells = Vec::with_capacity(width * height);
        let mut last = ln;
        for _ in 0..height {
            let (ln, row) = lines.next().ok_or(Error::Parse {
                line: last,
                reason: format!("expected {height} rows"),
            })?;
            last = ln;
            if row.len() != width {
                return Err(Error::Parse {
                    line: ln,
                    reason: format!("row has {} cells, expected {width}", row.len()),
                });
            }
            for ch in row.chars() {
                cells.push(match ch {
                    '0' => Cell::Outside,
                    '1' => Cell::Domain,
                    '2' => Cell::Compact,
                    other => {
                        return Err(Error::Parse {
                            line: ln,
                            reason: format!("unexpected cell value `{other}`"),
                        })
                    }
                });
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse {
                line: ln,
                reason: "trailing data after the last row".into(),
            });
        }
        Self::new(width, height, geo[0], (geo[1], geo[2]), cells)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() + self.height + 64);
        let _ = writeln!(out, "C1");
        let _ = writeln!(out, "{} {}", self.width, self.height);
        let _ = writeln!(out, "{:?} {:?} {:?}", self.h, self.origin.0, self.origin.1);
        for row in self.cells.chunks(self.width) {
            for &c in row {
                out.push((b'0' + c as u8) as char);
            }
            out.push('\n');
        }
        out
    }
}

fn parse_fields<T: std::str::FromStr>(line: usize, text: &str, expected: usize) -> Result<Vec<T>> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line,
            reason: format!("expected {expected} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse().map_err(|_| Error::Parse {
                line,
                reason: format!("cannot parse `{f}`"),
            })
        })
        .collect()
}
