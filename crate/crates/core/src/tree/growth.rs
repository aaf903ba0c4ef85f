use num_bigint::BigUint;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer-valued growth function: `f(n)` is the number of children of every
/// vertex at depth `n - 1`.
///
/// Values `f(1), …, f(m)` come from an explicit prefix; later indices use the
/// tail rule evaluated at the absolute index `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GrowthRepr", into = "GrowthRepr")]
pub struct GrowthFunction {
    prefix: Vec<u64>,
    tail: Tail,
}

/// Rule for `f(n)` past the explicit prefix. Real-valued rules are rounded up
/// so every value is a positive integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Tail {
    /// No rule: the prefix is the whole function.
    Table,
    Constant {
        value: u64,
    },
    /// `⌈scale · n^degree⌉`.
    Polynomial {
        degree: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `⌈base^n⌉`.
    Exponential { base: f64 },
    /// `⌈scale · n^degree · ln(n+1)^log_power⌉`.
    PolyLog {
        degree: f64,
        #[serde(default = "one")]
        scale: f64,
        log_power: f64,
    },
    /// `f(2j-1) = odd(j)`, `f(2j) = even(j)`.
    Interleaved { odd: Box<Tail>, even: Box<Tail> },
}

fn one() -> f64 {
    1.0
}

/// Coarse growth class of a tail rule, used by the series convergence rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthClass {
    /// Grows at least geometrically.
    Exponential,
    /// Comparable to `n^degree · ln(n)^log_power`.
    Power { degree: f64, log_power: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GrowthRepr {
    prefix: Vec<u64>,
    #[serde(default = "table_tail")]
    tail: Tail,
}

fn table_tail() -> Tail {
    Tail::Table
}

impl TryFrom<GrowthRepr> for GrowthFunction {
    type Error = Error;

    fn try_from(r: GrowthRepr) -> Result<Self> {
        GrowthFunction::new(r.prefix, r.tail)
    }
}

impl From<GrowthFunction> for GrowthRepr {
    fn from(g: GrowthFunction) -> Self {
        GrowthRepr {
            prefix: g.prefix,
            tail: g.tail,
        }
    }
}

/// Round `x` up to an integer, snapping values within relative `1e-9` of an
/// integer onto it so `3f64.powf(2.0)` style noise does not round up.
fn integer_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

const EXACT_F64: f64 = 9_007_199_254_740_992.0; // 2^53

impl Tail {
    fn validate(&self, pointer: &str) -> Result<()> {
        let positive = |v: f64, field: &str| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::input(format!("{pointer}/{field}"), "must be a positive finite number"))
            }
        };
        let nonneg = |v: f64, field: &str| -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::input(format!("{pointer}/{field}"), "must be a nonnegative finite number"))
            }
        };
        match self {
            Tail::Table => Ok(()),
            Tail::Constant { value } => {
                if *value >= 1 {
                    Ok(())
                } else {
                    Err(Error::input(format!("{pointer}/value"), "must be at least 1"))
                }
            }
            Tail::Polynomial { degree, scale } => {
                nonneg(*degree, "degree")?;
                positive(*scale, "scale")
            }
            Tail::Exponential { base } => {
                if base.is_finite() && *base >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::input(format!("{pointer}/base"), "must be at least 1"))
                }
            }
            Tail::PolyLog {
                degree,
                scale,
                log_power,
            } => {
                nonneg(*degree, "degree")?;
                positive(*scale, "scale")?;
                nonneg(*log_power, "log_power")
            }
            Tail::Interleaved { odd, even } => {
                for (part, name) in [(odd, "odd"), (even, "even")] {
                    if matches!(**part, Tail::Table | Tail::Interleaved { .. }) {
                        return Err(Error::input(
                            format!("{pointer}/{name}"),
                            "interleaved parts must be constant, polynomial, exponential or poly-log rules",
                        ));
                    }
                    part.validate(&format!("{pointer}/{name}"))?;
                }
                Ok(())
            }
        }
    }

    /// Unrounded value of the rule at absolute index `n`; `None` for `Table`.
    fn raw(&self, n: u64) -> Option<f64> {
        let x = n as f64;
        match self {
            Tail::Table => None,
            Tail::Constant { value } => Some(*value as f64),
            Tail::Polynomial { degree, scale } => Some(scale * pow(x, *degree)),
            Tail::Exponential { base } => Some(pow(*base, x)),
            Tail::PolyLog {
                degree,
                scale,
                log_power,
            } => Some(scale * pow(x, *degree) * pow((x + 1.0).ln(), *log_power)),
            Tail::Interleaved { odd, even } => {
                if n % 2 == 1 {
                    odd.raw(n.div_ceil(2))
                } else {
                    even.raw(n / 2)
                }
            }
        }
    }

    /// `ln` of the unrounded value, computed without overflow.
    fn raw_ln(&self, n: u64) -> Option<f64> {
        let x = n as f64;
        match self {
            Tail::Table => None,
            Tail::Constant { value } => Some((*value as f64).ln()),
            Tail::Polynomial { degree, scale } => Some(scale.ln() + degree * x.ln()),
            Tail::Exponential { base } => Some(x * base.ln()),
            Tail::PolyLog {
                degree,
                scale,
                log_power,
            } => Some(scale.ln() + degree * x.ln() + log_power * (x + 1.0).ln().ln()),
            Tail::Interleaved { odd, even } => {
                if n % 2 == 1 {
                    odd.raw_ln(n.div_ceil(2))
                } else {
                    even.raw_ln(n / 2)
                }
            }
        }
    }

    /// Whether the rule is nondecreasing in `n` over all `n ≥ 1`.
    pub fn is_nondecreasing(&self) -> bool {
        !matches!(self, Tail::Table | Tail::Interleaved { .. })
    }

    /// Growth class of the rule; `None` for `Table`.
    ///
    /// Interleaved rules report the class of the geometric mean of their two
    /// parts: the regularized function pairs consecutive odd and even values.
    pub fn class(&self) -> Option<GrowthClass> {
        match self {
            Tail::Table => None,
            Tail::Constant { .. } => Some(GrowthClass::Power {
                degree: 0.0,
                log_power: 0.0,
            }),
            Tail::Polynomial { degree, .. } => Some(GrowthClass::Power {
                degree: *degree,
                log_power: 0.0,
            }),
            Tail::Exponential { base } => Some(if *base > 1.0 {
                GrowthClass::Exponential
            } else {
                GrowthClass::Power {
                    degree: 0.0,
                    log_power: 0.0,
                }
            }),
            Tail::PolyLog {
                degree, log_power, ..
            } => Some(GrowthClass::Power {
                degree: *degree,
                log_power: *log_power,
            }),
            Tail::Interleaved { odd, even } => match (odd.class()?, even.class()?) {
                (
                    GrowthClass::Power {
                        degree: d1,
                        log_power: e1,
                    },
                    GrowthClass::Power {
                        degree: d2,
                        log_power: e2,
                    },
                ) => Some(GrowthClass::Power {
                    degree: (d1 + d2) / 2.0,
                    log_power: (e1 + e2) / 2.0,
                }),
                _ => Some(GrowthClass::Exponential),
            },
        }
    }
}

fn pow(x: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

impl GrowthFunction {
    pub fn new(prefix: Vec<u64>, tail: Tail) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::input("/prefix", "prefix must be nonempty"));
        }
        if let Some(i) = prefix.iter().position(|&v| v == 0) {
            return Err(Error::input(format!("/prefix/{i}"), "growth values must be at least 1"));
        }
        tail.validate("/tail")?;
        Ok(GrowthFunction { prefix, tail })
    }

    /// Finite table; no values past its end.
    pub fn table(values: Vec<u64>) -> Result<Self> {
        Self::new(values, Tail::Table)
    }

    pub fn constant(value: u64) -> Result<Self> {
        Self::from_rule(Tail::Constant { value })
    }

    /// `f(n) = n^degree`.
    pub fn polynomial(degree: f64) -> Result<Self> {
        Self::from_rule(Tail::Polynomial { degree, scale: 1.0 })
    }

    /// `f(n) = ⌈base^n⌉`.
    pub fn exponential(base: f64) -> Result<Self> {
        Self::from_rule(Tail::Exponential { base })
    }

    /// `f(2j-1) = odd(j)`, `f(2j) = even(j)`.
    pub fn interleaved(odd: Tail, even: Tail) -> Result<Self> {
        Self::from_rule(Tail::Interleaved {
            odd: Box::new(odd),
            even: Box::new(even),
        })
    }

    /// A pure tail rule; the prefix holds just `f(1)`.
    pub fn from_rule(tail: Tail) -> Result<Self> {
        tail.validate("/tail")?;
        let probe = GrowthFunction {
            prefix: vec![1],
            tail,
        };
        let first = probe.tail_value(1)?;
        Self::new(vec![first], probe.tail)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_table(&self) -> bool {
        matches!(self.tail, Tail::Table)
    }

    /// Number of indices with a defined value, `None` when unbounded.
    pub fn defined_len(&self) -> Option<usize> {
        self.is_table().then_some(self.prefix.len())
    }

    fn check_index(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::contract("growth functions are indexed from 1"));
        }
        if self.is_table() && n as usize > self.prefix.len() {
            return Err(Error::InsufficientTable {
                len: self.prefix.len(),
                index: n as usize,
            });
        }
        Ok(())
    }

    fn tail_value(&self, n: u64) -> Result<u64> {
        let raw = self.tail.raw(n).expect("table handled by check_index");
        let v = integer_ceil(raw).max(1.0);
        if v < EXACT_F64 {
            return Ok(v as u64);
        }
        if let Tail::Exponential { base } = self.tail {
            if base.fract() == 0.0 {
                if let Some(v) = (base as u64).checked_pow(n as u32) {
                    return Ok(v);
                }
            }
        }
        v.to_u64()
            .filter(|_| v < u64::MAX as f64)
            .ok_or_else(|| Error::Numeric(format!("f({n}) does not fit in 64 bits")))
    }

    /// `f(n)` as a machine integer; errors past `u64`.
    pub fn value(&self, n: u64) -> Result<u64> {
        self.check_index(n)?;
        match self.prefix.get(n as usize - 1) {
            Some(&v) => Ok(v),
            None => self.tail_value(n),
        }
    }

    /// `f(n)` exactly, for any size.
    pub fn value_big(&self, n: u64) -> Result<BigUint> {
        self.check_index(n)?;
        if let Some(&v) = self.prefix.get(n as usize - 1) {
            return Ok(BigUint::from(v));
        }
        if let Ok(v) = self.tail_value(n) {
            return Ok(BigUint::from(v));
        }
        if let Tail::Exponential { base } = self.tail {
            if base.fract() == 0.0 {
                return Ok(BigUint::from(base as u64).pow(n as u32));
            }
        }
        let raw = self.tail.raw(n).unwrap_or(f64::INFINITY);
        BigUint::from_f64(integer_ceil(raw))
            .ok_or_else(|| Error::Numeric(format!("f({n}) is not finite in double precision")))
    }

    /// `ln f(n)`; finite for every valid index even when `f(n)` overflows.
    pub fn ln_value(&self, n: u64) -> Result<f64> {
        self.check_index(n)?;
        if let Some(&v) = self.prefix.get(n as usize - 1) {
            return Ok((v as f64).ln());
        }
        match self.tail_value(n) {
            Ok(v) => Ok((v as f64).ln()),
            Err(_) => Ok(self.tail.raw_ln(n).expect("tail present")),
        }
    }

    /// `f(n)` as a float (`+∞` when it overflows).
    pub fn value_f64(&self, n: u64) -> Result<f64> {
        self.check_index(n)?;
        if let Some(&v) = self.prefix.get(n as usize - 1) {
            return Ok(v as f64);
        }
        Ok(integer_ceil(self.tail.raw(n).expect("tail present")).max(1.0))
    }

    /// `ln f(1), …, ln f(len)`.
    pub fn ln_values(&self, len: usize) -> Result<Vec<f64>> {
        (1..=len as u64).map(|n| self.ln_value(n)).collect()
    }

    /// Generation sizes `b_n = f(1)⋯f(n)` for `n = 1..=depth`.
    pub fn generation_sizes(&self, depth: usize) -> Result<Vec<BigUint>> {
        let mut acc = BigUint::from(1u32);
        let mut out = Vec::with_capacity(depth);
        for n in 1..=depth as u64 {
            acc *= self.value_big(n)?;
            out.push(acc.clone());
        }
        Ok(out)
    }

    /// Whether `f` is nondecreasing over all of its domain.
    pub fn is_nondecreasing(&self) -> bool {
        let prefix_ok = self.prefix.windows(2).all(|w| w[0] <= w[1]);
        if !prefix_ok {
            return false;
        }
        match &self.tail {
            Tail::Table => true,
            t if t.is_nondecreasing() => {
                let m = self.prefix.len() as u64;
                match self.value(m + 1) {
                    Ok(next) => *self.prefix.last().unwrap() <= next,
                    Err(_) => true,
                }
            }
            _ => false,
        }
    }

    /// First index from which `f` follows a nondecreasing rule forever, if any.
    pub fn nondecreasing_from(&self) -> Option<u64> {
        if self.is_table() || !self.tail.is_nondecreasing() {
            return None;
        }
        Some(self.prefix.len() as u64 + 1)
    }

    pub fn class(&self) -> Option<GrowthClass> {
        self.tail.class()
    }
}
