use serde::Serialize;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::tree::GrowthFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentBound {
    /// `min(1, f(1)⋯f(n) · P(Gamma(n, 1) ≤ x))`.
    pub bound: f64,
    /// `min(1, f(1)⋯f(n) · x^n / n!)`.
    pub crude: f64,
}

/// `ln P(Gamma(n, 1) ≤ x)`, accurate far into the lower tail.
pub fn ln_gamma_cdf(n: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let a = n as f64;
    if x >= a + 1.0 {
        return gamma_lr(a, x).ln();
    }
    // x^a e^{-x} / Γ(a+1) · Σ_k x^k / ((a+1)⋯(a+k))
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= x / (a + k);
        sum += term;
        k += 1.0;
    }
    a * x.ln() - x - ln_gamma(a + 1.0) + sum.ln()
}

/// Union bound over level `n`: `P(M_n ≤ x) ≤ f(1)⋯f(n) · P(Gamma(n,1) ≤ x)`
/// for unit exponential transit times. Computed in log domain.
pub fn first_moment_bound(f: &GrowthFunction, n: usize, x: f64) -> Result<MomentBound> {
    if n == 0 || x.is_nan() || x <= 0.0 {
        return Err(Error::contract(format!("need n ≥ 1 and x > 0, got n={n}, x={x}")));
    }
    let mut ln_count = NeumaierSum::new();
    for i in 1..=n as u64 {
        ln_count.add(f.ln_value(i)?);
    }
    let ln_count = ln_count.value();
    let bound = (ln_count + ln_gamma_cdf(n, x)).exp().min(1.0);
    let crude = (ln_count + n as f64 * x.ln() - ln_gamma(n as f64 + 1.0)).exp().min(1.0);
    Ok(MomentBound { bound, crude })
}

/// `(n/e)(1 + ln(1 - ε))`: with unit exponentials and weights `f̃(|w|)`, the
/// weighted passage time to level `n` falls below this with probability
/// less than `(1 - ε)^n`.
pub fn weighted_chernoff_threshold(n: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::contract(format!("ε must lie in (0,1), got {eps}")));
    }
    Ok(n as f64 / std::f64::consts::E * (1.0 + (-eps).ln_1p()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_level_closed_form() {
        let f = GrowthFunction::constant(2).unwrap();
        let b = first_moment_bound(&f, 1, 0.1).unwrap();
        let want = 2.0 * (1.0 - (-0.1f64).exp());
        assert!((b.bound - want).abs() < 1e-12);
        assert!((b.bound - 0.190325).abs() < 1e-6);
        assert!((b.crude - 0.2).abs() < 1e-12);
        // True P(M_1 ≤ 0.1) = 1 - e^{-0.2} sits below.
        assert!(1.0 - (-0.2f64).exp() <= b.bound);
    }

    #[test]
    fn gamma_cdf_tails() {
        for (n, x) in [(1usize, 0.5), (3, 2.0), (5, 10.0), (8, 1.0), (20, 25.0)] {
            let direct = gamma_lr(n as f64, x).ln();
            assert!((ln_gamma_cdf(n, x) - direct).abs() < 1e-12 * direct.abs().max(1.0), "n={n}, x={x}");
        }
        // Far tail: x^n/n! dominates.
        let l = ln_gamma_cdf(200, 1e-3);
        let approx = 200.0 * 1e-3f64.ln() - 1e-3 - ln_gamma(201.0);
        assert!((l - approx).abs() < 1e-5);
        assert!(l.is_finite());
    }

    #[test]
    fn vanishes_at_zero_and_saturates() {
        let f = GrowthFunction::constant(3).unwrap();
        assert!(first_moment_bound(&f, 4, 1e-6).unwrap().bound < 1e-18);
        assert_eq!(first_moment_bound(&f, 4, 50.0).unwrap().bound, 1.0);
        let huge = GrowthFunction::exponential(1e10).unwrap();
        assert!(first_moment_bound(&huge, 50, 1e-3).unwrap().bound.is_finite());
    }

    #[test]
    fn chernoff_thresholds() {
        let t = weighted_chernoff_threshold(100, 0.1).unwrap();
        assert!((t - 32.9).abs() < 0.05);
        assert!(weighted_chernoff_threshold(100, 1.0 - (-1f64).exp()).unwrap().abs() < 1e-12);
        let small = weighted_chernoff_threshold(10, 1e-12).unwrap();
        assert!((small - 10.0 / std::f64::consts::E).abs() < 1e-9);
        assert!(weighted_chernoff_threshold(10, 0.0).is_err());
    }
}
