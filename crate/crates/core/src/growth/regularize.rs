//! The regularization `f̃` of a growth function.
//!
//! `f̃(n+1) = sup { a : a^m f̃(1)⋯f̃(n) ≤ f(1)⋯f(n+m) for all m ≥ 1 }`.
//! In log coordinates `L_n = Σ_{j≤n} ln f(j)`, the cumulative sums of `ln f̃`
//! form the greatest convex minorant of the points `(n, L_n)` anchored at
//! the origin. Both descriptions are implemented; they serve as oracles for
//! each other.
//!
//! `f̃(n)` depends on all of `f`, so values are computed on a window `1..=N`
//! from data up to `N + H`, with per-index stability flags.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{cumulative, NeumaierSum};
use crate::tree::GrowthFunction;

/// Slopes within this distance count as equal when building the hull.
pub const HULL_TIE: f64 = 1e-12;

/// Tolerance, in log domain, for `Π f̃ = Π f`.
pub const CONTACT_TOL: f64 = 1e-9;

/// `f̃` on the window `1..=window`.
#[derive(Debug, Clone, Serialize)]
pub struct RegularizedGrowth {
    pub window: usize,
    pub horizon: usize,
    /// `f̃(1), …, f̃(window)`.
    pub values: Vec<f64>,
    /// `ln f̃(1), …, ln f̃(window)`.
    pub ln_values: Vec<f64>,
    /// Whether each value is certified independent of `f` past the data used.
    pub stable: Vec<bool>,
}

impl RegularizedGrowth {
    fn from_ln(window: usize, horizon: usize, ln_values: Vec<f64>, stable: Vec<bool>) -> Self {
        RegularizedGrowth {
            window,
            horizon,
            values: ln_values.iter().map(|x| x.exp()).collect(),
            ln_values,
            stable,
        }
    }

    pub fn all_stable(&self) -> bool {
        self.stable.iter().all(|&s| s)
    }
}

/// Increments of the greatest convex minorant of the cumulative sums of
/// `ln_f`, anchored at the origin; one entry per input.
///
/// Monotone-stack lower hull. A point is dropped when its incoming slope is
/// within [`HULL_TIE`] of its outgoing slope or above it.
pub fn minorant_increments(ln_f: &[f64]) -> Vec<f64> {
    let cum = cumulative(ln_f);
    let slope = |a: usize, b: usize| (cum[b] - cum[a]) / (b - a) as f64;
    let mut hull: Vec<usize> = vec![0];
    for p in 1..cum.len() {
        while hull.len() >= 2 {
            let b = hull[hull.len() - 1];
            let a = hull[hull.len() - 2];
            if slope(a, b) >= slope(b, p) - HULL_TIE {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = vec![0.0; ln_f.len()];
    for w in hull.windows(2) {
        let s = slope(w[0], w[1]);
        out[w[0]..w[1]].iter_mut().for_each(|x| *x = s);
    }
    out
}

/// The same increments from the recursive definition: `ln f̃(n+1)` is the
/// least slope from `(n, Σ_{i≤n} ln f̃(i))` to any later data point.
pub fn minorant_increments_recursive(ln_f: &[f64]) -> Vec<f64> {
    let cum = cumulative(ln_f);
    let t = ln_f.len();
    let mut out = Vec::with_capacity(t);
    let mut acc = NeumaierSum::new();
    for n in 0..t {
        let base = acc.value();
        let a = (1..=t - n)
            .map(|m| (cum[n + m] - base) / m as f64)
            .fold(f64::INFINITY, f64::min);
        out.push(a);
        acc.add(a);
    }
    out
}

fn data_len(f: &GrowthFunction, window: usize, horizon: usize) -> Result<usize> {
    if window == 0 {
        return Err(Error::contract("window must contain at least one index"));
    }
    let need = window + horizon;
    if let Some(len) = f.defined_len() {
        if need > len {
            return Err(Error::InsufficientTable { len, index: need });
        }
    }
    Ok(need)
}

/// Longer data used to check stability: doubled horizon, clipped to the
/// table for finite growth functions.
fn doubled_len(f: &GrowthFunction, window: usize, horizon: usize) -> usize {
    let doubled = window + 2 * horizon.max(1);
    match f.defined_len() {
        Some(len) => doubled.min(len),
        None => doubled,
    }
}

fn regularize(
    f: &GrowthFunction,
    window: usize,
    horizon: usize,
    increments: fn(&[f64]) -> Vec<f64>,
) -> Result<RegularizedGrowth> {
    let t = data_len(f, window, horizon)?;
    let t2 = doubled_len(f, window, horizon).max(t);
    let ln_long = f.ln_values(t2)?;
    let short = increments(&ln_long[..t]);
    let long = if t2 == t { short.clone() } else { increments(&ln_long) };

    let cum_short = cumulative(&short);
    let cum_long = cumulative(&long);
    let certified = certified_prefix(f, &ln_long[..t], &short);
    let stable = (1..=window)
        .map(|n| {
            n <= certified
                || ((short[n - 1] - long[n - 1]).abs() <= HULL_TIE * (1.0 + short[n - 1].abs())
                    && (cum_short[n] - cum_long[n]).abs() <= HULL_TIE * (1.0 + cum_short[n].abs()))
        })
        .collect();
    Ok(RegularizedGrowth::from_ln(
        window,
        horizon,
        short[..window].to_vec(),
        stable,
    ))
}

/// Largest `c` such that the minorant on `0..=c` cannot change whatever `f`
/// does past the data: `c` is a contact point, `f` is nondecreasing from
/// `c + 1` on, and `ln f(c+1)` is at least the minorant slope into `c`.
/// Returns 0 when no such point exists.
fn certified_prefix(f: &GrowthFunction, ln_f: &[f64], inc: &[f64]) -> usize {
    let Some(from) = f.nondecreasing_from() else {
        return 0;
    };
    let t = ln_f.len();
    let cum_f = cumulative(ln_f);
    let cum_t = cumulative(inc);
    for c in (1..t).rev() {
        if (c as u64 + 1) < from {
            break;
        }
        let contact = (cum_f[c] - cum_t[c]).abs() <= CONTACT_TOL * (1.0 + cum_f[c].abs());
        if contact && ln_f[c] >= inc[c - 1] - HULL_TIE {
            return c;
        }
    }
    0
}

/// `f̃` on `1..=window` via the convex minorant of the data up to
/// `window + horizon`.
pub fn tilde_f_hull(f: &GrowthFunction, window: usize, horizon: usize) -> Result<RegularizedGrowth> {
    regularize(f, window, horizon, minorant_increments)
}

/// `f̃` on `1..=window` via the recursive definition, with the supremum over
/// `m` taken over all data up to `window + horizon`.
pub fn tilde_f_recursive(f: &GrowthFunction, window: usize, horizon: usize) -> Result<RegularizedGrowth> {
    regularize(f, window, horizon, minorant_increments_recursive)
}

/// Indices `n ≤ window` with `f̃(1)⋯f̃(n) = f(1)⋯f(n)` (within
/// [`CONTACT_TOL`] in log domain), using horizon `window`, or the rest of
/// the table for finite growth functions.
pub fn equal_product_indices(f: &GrowthFunction, window: usize) -> Result<Vec<usize>> {
    let horizon = default_horizon(f, window)?;
    let reg = tilde_f_hull(f, window, horizon)?;
    let cum_f = cumulative(&f.ln_values(window)?);
    let cum_t = cumulative(&reg.ln_values);
    Ok((1..=window)
        .filter(|&n| (cum_f[n] - cum_t[n]).abs() <= CONTACT_TOL * (1.0 + cum_f[n].abs()))
        .collect())
}

/// Horizon `H = N` for rule-based growth functions; for finite tables, the
/// remainder of the table.
pub fn default_horizon(f: &GrowthFunction, window: usize) -> Result<usize> {
    match f.defined_len() {
        Some(len) if window > len => Err(Error::InsufficientTable { len, index: window }),
        Some(len) => Ok(len - window),
        None => Ok(window),
    }
}
