use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Inverse distribution function `G^{-1}` on `[0, 1]`.
pub type InverseCdf = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Law of the i.i.d. transit times `X(v)`.
#[derive(Clone)]
pub enum TransitDist {
    /// `G(t) = 1 - e^{-t}`.
    Exponential,
    /// `G(t) = c t^α` on `[0, c^{-1/α}]`.
    PowerLaw { alpha: f64, c: f64 },
    /// Any law given by its inverse distribution function, together with the
    /// exponents of its behavior `G(t) ~ c t^α` near zero.
    Custom { inverse_cdf: InverseCdf, alpha: f64, c: f64 },
}

impl fmt::Debug for TransitDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitDist::Exponential => write!(f, "Exponential"),
            TransitDist::PowerLaw { alpha, c } => write!(f, "PowerLaw {{ alpha: {alpha}, c: {c} }}"),
            TransitDist::Custom { alpha, c, .. } => write!(f, "Custom {{ alpha: {alpha}, c: {c} }}"),
        }
    }
}

impl Serialize for TransitDist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match self {
            TransitDist::Exponential => m.serialize_entry("kind", "exponential")?,
            TransitDist::PowerLaw { alpha, c } => {
                m.serialize_entry("kind", "power-law")?;
                m.serialize_entry("alpha", alpha)?;
                m.serialize_entry("c", c)?;
            }
            TransitDist::Custom { alpha, c, .. } => {
                m.serialize_entry("kind", "custom")?;
                m.serialize_entry("alpha", alpha)?;
                m.serialize_entry("c", c)?;
            }
        }
        m.end()
    }
}

impl TransitDist {
    pub fn power_law(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && c > 0.0 && alpha.is_finite() && c.is_finite()) {
            return Err(Error::contract(format!(
                "power law needs positive α and c, got α={alpha}, c={c}"
            )));
        }
        Ok(TransitDist::PowerLaw { alpha, c })
    }

    /// `α` in `G(t) ~ c t^α`.
    pub fn alpha(&self) -> f64 {
        match self {
            TransitDist::Exponential => 1.0,
            TransitDist::PowerLaw { alpha, .. } | TransitDist::Custom { alpha, .. } => *alpha,
        }
    }

    /// `c` in `G(t) ~ c t^α`.
    pub fn c(&self) -> f64 {
        match self {
            TransitDist::Exponential => 1.0,
            TransitDist::PowerLaw { c, .. } | TransitDist::Custom { c, .. } => *c,
        }
    }

    pub fn inverse_cdf(&self, u: f64) -> f64 {
        match self {
            TransitDist::Exponential => -(-u).ln_1p(),
            TransitDist::PowerLaw { alpha, c } => (u / c).powf(1.0 / alpha),
            TransitDist::Custom { inverse_cdf, .. } => inverse_cdf(u),
        }
    }

    /// Maps a unit exponential `e` to a draw from this law through
    /// `G^{-1}(1 - e^{-e})`, monotonically.
    #[inline]
    fn map_exponential(&self, e: f64) -> f64 {
        match self {
            TransitDist::Exponential => e,
            _ => self.inverse_cdf(-(-e).exp_m1()),
        }
    }
}

/// Minimum of `m` i.i.d. transit times from a single draw.
///
/// With `E` unit exponential, `E / m` is the minimum of `m` unit exponentials,
/// and `U = 1 - e^{-E/m}` has the law `1 - (1 - V)^{1/m}` of the minimum of
/// `m` uniforms; the result is `G^{-1}(U)`. Cost does not depend on `m`.
pub fn sample_min_transit<R: Rng + ?Sized>(m: f64, dist: &TransitDist, rng: &mut R) -> f64 {
    debug_assert!(m >= 1.0);
    let e: f64 = Exp1.sample(rng);
    dist.map_exponential(e / m)
}

/// The `k` smallest of `m` i.i.d. transit times, in increasing order.
///
/// Exponential spacings: the `i`-th smallest of `m` unit exponentials is
/// `Σ_{j≤i} E_j / (m - j + 1)`; other laws are obtained through the monotone
/// map `G^{-1}(1 - e^{-x})`. Cost `O(k)`.
pub fn sample_k_order_stats<R: Rng + ?Sized>(m: f64, k: usize, dist: &TransitDist, rng: &mut R) -> Result<Vec<f64>> {
    if k == 0 || k as f64 > m {
        return Err(Error::contract(format!("need 1 ≤ k ≤ m, got k={k}, m={m}")));
    }
    let mut out = Vec::with_capacity(k);
    fill_order_stats(m, k, dist, rng, &mut out);
    Ok(out)
}

/// Appends the `k` smallest of `m` transit times to `out`, increasing.
#[inline]
pub(crate) fn fill_order_stats<R: Rng + ?Sized>(m: f64, k: usize, dist: &TransitDist, rng: &mut R, out: &mut Vec<f64>) {
    let mut acc = 0.0;
    for j in 0..k {
        let e: f64 = Exp1.sample(rng);
        acc += e / (m - j as f64);
        out.push(dist.map_exponential(acc));
    }
}
