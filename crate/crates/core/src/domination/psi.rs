//! `Ψ(b_1, …, b_n; D)`: the probability that every root-to-level-`n` label
//! vector of a spherically symmetric tree with generation sizes `b` lies in
//! `D`, under i.i.d. uniform labels on `[0,1]`.
//!
//! Conditioning on the first-generation labels gives
//!
//! ```text
//! Ψ(b_1, …, b_n; D) = [ ∫ Ψ(b_2/b_1, …, b_n/b_1; D/x_1) dx_1 ]^{b_1},   Ψ(b; D) = μ(D)^b
//! ```
//!
//! which stays meaningful for real `b`. Cross-sections of a box union are
//! constant on grid cells, so the integral is a finite weighted sum. Unrolled,
//! level `k` raises its sum to `b_k / b_{k-1}` (with `b_0 = 1`).

use num_traits::{One, Zero};

use super::boxes::{BoxUnion, Grid, Rational};
use super::prob::ExactProb;
use crate::error::{Error, Result};

/// Exact `Ψ` for a genuine spherical generation-size vector: every ratio
/// `b_{k+1} / b_k` must be a positive integer. Other vectors go through
/// [`psi_real`].
pub fn psi_exact(b: &[u64], set: &BoxUnion) -> Result<ExactProb> {
    let exponents = integer_exponents(b, set.dim())?;
    let grid = set.grid()?;
    Ok(ExactProb::new(exact_level(&grid, &exponents, 0, 0)))
}

fn integer_exponents(b: &[u64], dim: usize) -> Result<Vec<u64>> {
    if b.len() != dim {
        return Err(Error::contract(format!(
            "Ψ needs one generation size per coordinate: got {} sizes for dimension {dim}",
            b.len()
        )));
    }
    if b.is_empty() {
        return Err(Error::contract("Ψ needs at least one generation"));
    }
    if b.contains(&0) {
        return Err(Error::contract("generation sizes must be positive"));
    }
    let mut out = vec![b[0]];
    for w in b.windows(2) {
        if w[1] % w[0] != 0 {
            return Err(Error::contract(format!(
                "generation sizes {b:?} are not spherical ({} does not divide {}); use psi_real",
                w[0], w[1]
            )));
        }
        out.push(w[1] / w[0]);
    }
    Ok(out)
}

fn exact_level(grid: &Grid, exponents: &[u64], level: usize, offset: usize) -> Rational {
    let last = level + 1 == grid.dim();
    let stride = grid.strides()[level];
    let mut sum = Rational::zero();
    for (j, w) in grid.widths(level).iter().enumerate() {
        let cell = offset + j * stride;
        if last {
            if grid.inside(cell) {
                sum += w;
            }
        } else {
            let inner = exact_level(grid, exponents, level + 1, cell);
            if !inner.is_zero() {
                sum += w * inner;
            }
        }
    }
    pow_rational(sum, exponents[level])
}

pub(crate) fn pow_rational(x: Rational, e: u64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    if x.is_zero() || x.is_one() || e == 1 {
        return x;
    }
    num_traits::pow(x, e as usize)
}

/// `Ψ` at positive real arguments.
pub fn psi_real(b: &[f64], set: &BoxUnion) -> Result<f64> {
    ln_psi_real(b, set).map(f64::exp)
}

/// `ln Ψ` at positive real arguments; `-∞` when `Ψ = 0`.
///
/// Evaluated in the log domain so deep or wide instances do not underflow.
pub fn ln_psi_real(b: &[f64], set: &BoxUnion) -> Result<f64> {
    if b.len() != set.dim() || b.is_empty() {
        return Err(Error::contract(format!(
            "Ψ needs one generation size per coordinate: got {} sizes for dimension {}",
            b.len(),
            set.dim()
        )));
    }
    if let Some(x) = b.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::contract(format!("Ψ arguments must be positive reals, got {x}")));
    }
    let mut exponents = vec![b[0]];
    exponents.extend(b.windows(2).map(|w| w[1] / w[0]));
    let grid = set.grid()?;
    let widths: Vec<Vec<f64>> = (0..grid.dim()).map(|k| grid.widths_f64(k)).collect();
    Ok(real_level(&grid, &widths, &exponents, 0, 0))
}

fn real_level(grid: &Grid, widths: &[Vec<f64>], exponents: &[f64], level: usize, offset: usize) -> f64 {
    let last = level + 1 == grid.dim();
    let stride = grid.strides()[level];
    let ln_sum = if last {
        let s: f64 = widths[level]
            .iter()
            .enumerate()
            .filter(|(j, _)| grid.inside(offset + j * stride))
            .map(|(_, w)| w)
            .sum();
        s.ln()
    } else {
        let terms: Vec<(f64, f64)> = widths[level]
            .iter()
            .enumerate()
            .map(|(j, &w)| (w, real_level(grid, widths, exponents, level + 1, offset + j * stride)))
            .collect();
        log_weighted_sum(&terms)
    };
    if ln_sum == f64::NEG_INFINITY {
        ln_sum
    } else {
        exponents[level] * ln_sum
    }
}

/// `ln Σ w_i e^{a_i}` for nonnegative weights.
fn log_weighted_sum(terms: &[(f64, f64)]) -> f64 {
    let m = terms
        .iter()
        .filter(|(w, _)| *w > 0.0)
        .map(|&(_, a)| a)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = terms
        .iter()
        .filter(|(w, a)| *w > 0.0 && *a > f64::NEG_INFINITY)
        .map(|&(w, a)| w * (a - m).exp())
        .sum();
    m + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domination::boxes::{rat, AxisBox};
    use crate::domination::counterexample_d;

    fn half_interval() -> BoxUnion {
        BoxUnion::single(AxisBox::new(vec![rat(0, 1)], vec![rat(1, 2)]).unwrap())
    }

    #[test]
    fn base_case_is_measure_power() {
        assert_eq!(psi_exact(&[2], &half_interval()).unwrap(), ExactProb::ratio(1, 4));
        assert!((psi_real(&[1.0], &half_interval()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn full_set_is_certain() {
        assert_eq!(psi_exact(&[1, 2], &BoxUnion::full(2)).unwrap(), ExactProb::one());
        assert_eq!(psi_exact(&[3, 3, 9], &BoxUnion::full(3)).unwrap(), ExactProb::one());
    }

    #[test]
    fn non_spherical_is_rejected() {
        let d = counterexample_d();
        let e = psi_exact(&[2, 3, 5], &d).unwrap_err();
        assert!(e.to_string().contains("psi_real"), "{e}");
        assert!(psi_exact(&[1, 3, 5], &d).is_err());
        assert!(psi_exact(&[1, 3], &d).is_err());
    }

    #[test]
    fn two_level_hand_computation() {
        // D = [0,1/2]×[0,1] ∪ [0,1]×[0,1/2], b = (1, 2):
        // x1 < 1/2 ⇒ section is everything; x1 > 1/2 ⇒ section [0,1/2] with mass (1/2)^2.
        let d = BoxUnion::new(
            2,
            vec![
                AxisBox::new(vec![rat(0, 1), rat(0, 1)], vec![rat(1, 2), rat(1, 1)]).unwrap(),
                AxisBox::new(vec![rat(0, 1), rat(0, 1)], vec![rat(1, 1), rat(1, 2)]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(psi_exact(&[1, 2], &d).unwrap(), ExactProb::ratio(5, 8));
        assert_eq!(psi_exact(&[2, 4], &d).unwrap(), ExactProb::ratio(25, 64));
        let r = psi_real(&[1.0, 2.0], &d).unwrap();
        assert!((r - 0.625).abs() < 1e-15);
    }

    #[test]
    fn empty_set_gives_zero() {
        assert_eq!(psi_exact(&[1, 1], &BoxUnion::empty(2)).unwrap(), ExactProb::zero());
        assert_eq!(ln_psi_real(&[1.5, 2.5], &BoxUnion::empty(2)).unwrap(), f64::NEG_INFINITY);
    }
}
