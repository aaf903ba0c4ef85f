use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default cap on grid cells per evaluation.
pub const DEFAULT_CELL_CAP: usize = 1_000_000;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Axis-aligned box with rational corners inside `[0,1]^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisBox {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

impl AxisBox {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::input("/hi", "lo and hi must have the same length"));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if l < &Rational::zero() || h > &Rational::one() {
                return Err(Error::input(format!("/lo/{i}"), "box must lie inside [0,1]"));
            }
            if l > h {
                return Err(Error::input(format!("/hi/{i}"), "hi must not be below lo"));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rational] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational] {
        &self.hi
    }

    pub fn volume(&self) -> Rational {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(Rational::one(), |acc, (l, h)| acc * (h - l))
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| l <= x && x <= h)
    }
}

/// Finite union of boxes of a common dimension; a stand-in for Borel sets
/// `D ⊆ [0,1]^n`. Boundaries have measure zero and are ignored by every
/// probability computed from a union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxUnion {
    dim: usize,
    boxes: Vec<AxisBox>,
}

impl BoxUnion {
    pub fn new(dim: usize, boxes: Vec<AxisBox>) -> Result<Self> {
        if let Some(i) = boxes.iter().position(|b| b.dim() != dim) {
            return Err(Error::input(
                format!("/boxes/{i}"),
                format!("box has dimension {} but the union has dimension {dim}", boxes[i].dim()),
            ));
        }
        Ok(BoxUnion { dim, boxes })
    }

    pub fn empty(dim: usize) -> Self {
        BoxUnion {
            dim,
            boxes: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        BoxUnion {
            dim,
            boxes: vec![AxisBox::cube(dim, Rational::zero(), Rational::one()).unwrap()],
        }
    }

    pub fn single(b: AxisBox) -> Self {
        BoxUnion {
            dim: b.dim(),
            boxes: vec![b],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn union(&self, other: &BoxUnion) -> Result<BoxUnion> {
        if self.dim != other.dim {
            return Err(Error::contract("union of sets with different dimensions"));
        }
        let mut boxes = self.boxes.clone();
        boxes.extend(other.boxes.iter().cloned());
        Ok(BoxUnion {
            dim: self.dim,
            boxes,
        })
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.boxes.iter().any(|b| b.contains(x))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self, DEFAULT_CELL_CAP)
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> Result<Rational> {
        Ok(self.grid()?.measure())
    }

    /// Complement within `[0,1]^n`.
    pub fn complement(&self) -> Result<BoxUnion> {
        self.complement_capped(DEFAULT_CELL_CAP)
    }

    pub fn complement_capped(&self, cap: usize) -> Result<BoxUnion> {
        let mut grid = Grid::new(self, cap)?;
        for c in grid.inside.iter_mut() {
            *c = !*c;
        }
        Ok(grid.to_union())
    }

    /// Cross-section `D / (x_1, …, x_k)` as a union of dimension `n - k`.
    pub fn section(&self, prefix: &[Rational]) -> Result<BoxUnion> {
        let k = prefix.len();
        if k > self.dim {
            return Err(Error::contract("section prefix longer than the dimension"));
        }
        let boxes = self
            .boxes
            .iter()
            .filter(|b| {
                prefix
                    .iter()
                    .enumerate()
                    .all(|(i, x)| &b.lo[i] <= x && x <= &b.hi[i])
            })
            .map(|b| AxisBox {
                lo: b.lo[k..].to_vec(),
                hi: b.hi[k..].to_vec(),
            })
            .collect();
        Ok(BoxUnion {
            dim: self.dim - k,
            boxes,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&BoxUnionRepr::from(self)).expect("serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: BoxUnionRepr = crate::json::from_str(s)?;
        repr.try_into()
    }
}

/// Cell decomposition of a box union: per-coordinate breakpoints and a
/// membership flag per cell. Cells are stored row-major with coordinate 0
/// varying slowest, so fixing the first `k` coordinates selects a contiguous
/// block of `strides[k-1]` cells.
#[derive(Debug, Clone)]
pub struct Grid {
    breaks: Vec<Vec<Rational>>,
    widths: Vec<Vec<Rational>>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    inside: Vec<bool>,
}

impl Grid {
    pub fn new(set: &BoxUnion, cap: usize) -> Result<Self> {
        let n = set.dim;
        let mut breaks = Vec::with_capacity(n);
        for i in 0..n {
            let mut b: Vec<Rational> = vec![Rational::zero(), Rational::one()];
            for bx in &set.boxes {
                b.push(bx.lo[i].clone());
                b.push(bx.hi[i].clone());
            }
            b.sort();
            b.dedup();
            breaks.push(b);
        }
        let shape: Vec<usize> = breaks.iter().map(|b| b.len() - 1).collect();
        let mut cells: u128 = 1;
        for &s in &shape {
            cells = cells.saturating_mul(s as u128);
        }
        if cells > cap as u128 {
            return Err(Error::cap("grid cell count", cells, cap as u128));
        }
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * shape[i + 1];
        }
        let widths = breaks
            .iter()
            .map(|b| b.windows(2).map(|w| &w[1] - &w[0]).collect())
            .collect();
        let mut inside = vec![false; cells as usize];
        for bx in &set.boxes {
            let ranges: Vec<_> = breaks
                .iter()
                .zip(bx.lo.iter().zip(&bx.hi))
                .map(|(br, (lo, hi))| {
                    br.binary_search(lo).expect("breakpoint")..br.binary_search(hi).expect("breakpoint")
                })
                .collect();
            if ranges.iter().any(|r| r.is_empty()) {
                continue;
            }
            mark(&mut inside, &ranges, &strides, 0, 0);
        }
        Ok(Grid {
            breaks,
            widths,
            shape,
            strides,
            inside,
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn breaks(&self, coord: usize) -> &[Rational] {
        &self.breaks[coord]
    }

    pub fn widths(&self, coord: usize) -> &[Rational] {
        &self.widths[coord]
    }

    pub fn widths_f64(&self, coord: usize) -> Vec<f64> {
        self.widths[coord].iter().map(to_f64).collect()
    }

    pub fn inside(&self, cell: usize) -> bool {
        self.inside[cell]
    }

    pub fn cell_count(&self) -> usize {
        self.inside.len()
    }

    /// Number of cells in a block whose first `level` coordinates are fixed.
    pub fn block_len(&self, level: usize) -> usize {
        if level == 0 {
            self.inside.len()
        } else {
            self.strides[level - 1]
        }
    }

    /// Measure of the section selected by the block at `level`, `offset`.
    pub fn block_measure(&self, level: usize, offset: usize) -> Rational {
        if level == self.dim() {
            return if self.inside[offset] {
                Rational::one()
            } else {
                Rational::zero()
            };
        }
        let stride = self.strides[level];
        self.widths[level]
            .iter()
            .enumerate()
            .filter_map(|(j, w)| {
                let m = self.block_measure(level + 1, offset + j * stride);
                (!m.is_zero()).then(|| w * m)
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn measure(&self) -> Rational {
        self.block_measure(0, 0)
    }

    /// Rebuilds a box union from the marked cells, merging runs along the
    /// last coordinate.
    pub fn to_union(&self) -> BoxUnion {
        let n = self.dim();
        let mut boxes = Vec::new();
        if n == 0 {
            if self.inside[0] {
                boxes.push(AxisBox {
                    lo: vec![],
                    hi: vec![],
                });
            }
            return BoxUnion { dim: 0, boxes };
        }
        let last = self.shape[n - 1];
        for row in 0..self.inside.len() / last {
            let base = row * last;
            let mut idx = vec![0usize; n - 1];
            let mut r = row;
            for i in (0..n - 1).rev() {
                idx[i] = r % self.shape[i];
                r /= self.shape[i];
            }
            let mut j = 0;
            while j < last {
                if !self.inside[base + j] {
                    j += 1;
                    continue;
                }
                let start = j;
                while j < last && self.inside[base + j] {
                    j += 1;
                }
                let mut lo: Vec<Rational> = idx.iter().enumerate().map(|(i, &c)| self.breaks[i][c].clone()).collect();
                let mut hi: Vec<Rational> = idx
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| self.breaks[i][c + 1].clone())
                    .collect();
                lo.push(self.breaks[n - 1][start].clone());
                hi.push(self.breaks[n - 1][j].clone());
                boxes.push(AxisBox { lo, hi });
            }
        }
        BoxUnion { dim: n, boxes }
    }

    /// Least common denominator of the breakpoints on `coord`.
    pub fn common_denominator(&self, coord: usize) -> BigInt {
        self.breaks[coord]
            .iter()
            .fold(BigInt::one(), |acc, b| acc.lcm(b.denom()))
    }
}

fn mark(inside: &mut [bool], ranges: &[std::ops::Range<usize>], strides: &[usize], level: usize, offset: usize) {
    if level == ranges.len() {
        inside[offset] = true;
        return;
    }
    for j in ranges[level].clone() {
        mark(inside, ranges, strides, level + 1, offset + j * strides[level]);
    }
}

/// Exact-to-nearest conversion of a rational to `f64`, safe for huge parts.
pub fn to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    (ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())).exp() * if r.numer() < &BigInt::zero() { -1.0 } else { 1.0 }
}

/// `ln |x|` for a nonzero big integer, accurate to double precision.
pub fn ln_abs_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().abs().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap().abs();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    Rational::from_str(s).map_err(|e| format!("`{s}` is not a rational of the form p/q: {e}"))
}

fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxRepr {
    lo: Vec<String>,
    hi: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxUnionRepr {
    dim: usize,
    boxes: Vec<BoxRepr>,
}

impl From<&BoxUnion> for BoxUnionRepr {
    fn from(u: &BoxUnion) -> Self {
        BoxUnionRepr {
            dim: u.dim,
            boxes: u
                .boxes
                .iter()
                .map(|b| BoxRepr {
                    lo: b.lo.iter().map(fmt_rational).collect(),
                    hi: b.hi.iter().map(fmt_rational).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<BoxUnionRepr> for BoxUnion {
    type Error = Error;

    fn try_from(r: BoxUnionRepr) -> Result<Self> {
        let mut boxes = Vec::with_capacity(r.boxes.len());
        for (i, b) in r.boxes.into_iter().enumerate() {
            let parse = |v: &[String], field: &str| -> Result<Vec<Rational>> {
                v.iter()
                    .enumerate()
                    .map(|(j, s)| parse_rational(s).map_err(|m| Error::input(format!("/boxes/{i}/{field}/{j}"), m)))
                    .collect()
            };
            let lo = parse(&b.lo, "lo")?;
            let hi = parse(&b.hi, "hi")?;
            if lo.len() != r.dim || hi.len() != r.dim {
                return Err(Error::input(
                    format!("/boxes/{i}"),
                    format!("expected {} coordinates", r.dim),
                ));
            }
            let bx = AxisBox::new(lo, hi).map_err(|e| match e {
                Error::Input { pointer, message } => Error::input(format!("/boxes/{i}{pointer}"), message),
                e => e,
            })?;
            boxes.push(bx);
        }
        BoxUnion::new(r.dim, boxes)
    }
}

impl fmt::Display for BoxUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxes.is_empty() {
            return write!(f, "∅");
        }
        for (i, b) in self.boxes.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "(")?;
            for (j, (l, h)) in b.lo.iter().zip(&b.hi).enumerate() {
                if j > 0 {
                    write!(f, "×")?;
                }
                write!(f, "[{l},{h}]")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
