//! Explosion classification through the series `Σ f̃(n)^{-1/α}`.

use serde::Serialize;

use super::regularize::{default_horizon, tilde_f_hull};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::tree::{GrowthClass, GrowthFunction};

/// Evidence rule: the series is judged convergent when the sum over the
/// last doubling window `(N/2, N]` is below this.
pub const TAIL_SUM_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Explosion,
    NoExplosion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Authority {
    /// Decided from the tail rule.
    Analytic,
    /// Read off finitely many terms; never conclusive.
    Evidence,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationVerdict {
    pub regime: Regime,
    pub authority: Authority,
    pub alpha: f64,
    pub window: usize,
    /// `(n, Σ_{j≤n} f̃(j)^{-1/α})` at `n = 10, 100, …` and at the window end.
    pub partial_sums: Vec<(usize, f64)>,
    /// `Σ_{N/2 < j ≤ N} f̃(j)^{-1/α}`.
    pub last_doubling_sum: f64,
    pub notes: Vec<String>,
}

/// `α e^{-1} (c Γ(1+α))^{-1/α}`.
pub fn limit_constant(alpha: f64, c: f64) -> Result<f64> {
    if !(alpha > 0.0 && c > 0.0 && alpha.is_finite() && c.is_finite()) {
        return Err(Error::contract(format!("α and c must be positive, got α={alpha}, c={c}")));
    }
    let ln_g = statrs::function::gamma::ln_gamma(1.0 + alpha);
    Ok(alpha * (-1.0 - (c.ln() + ln_g) / alpha).exp())
}

/// Checkpoints `10, 100, …` up to `n`, then `n` itself.
pub fn checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(10usize), |x| x.checked_mul(10))
        .take_while(|&x| x < n)
        .collect();
    out.push(n);
    out
}

/// Partial sums of `Σ exp(-ln_terms[j] / α)` at [`checkpoints`], and the sum
/// over the last doubling window.
pub fn series_partial_sums(ln_terms: &[f64], alpha: f64) -> (Vec<(usize, f64)>, f64) {
    let n = ln_terms.len();
    let marks = checkpoints(n);
    let mut acc = NeumaierSum::new();
    let mut tail = NeumaierSum::new();
    let mut out = Vec::with_capacity(marks.len());
    let mut next = 0;
    for (i, &l) in ln_terms.iter().enumerate() {
        let t = (-l / alpha).exp();
        acc.add(t);
        if i >= n / 2 {
            tail.add(t);
        }
        if next < marks.len() && marks[next] == i + 1 {
            out.push((i + 1, acc.value()));
            next += 1;
        }
    }
    (out, tail.value())
}

/// Whether `Σ n^{-d/α} ln(n)^{-e/α}` (or a geometric series) converges.
pub fn series_converges(class: GrowthClass, alpha: f64) -> bool {
    match class {
        GrowthClass::Exponential => true,
        GrowthClass::Power { degree, log_power } => {
            let p = degree / alpha;
            let q = log_power / alpha;
            if (p - 1.0).abs() <= 1e-12 {
                q > 1.0 + 1e-12
            } else {
                p > 1.0
            }
        }
    }
}

/// Classifies explosion for growth `f` under transit times with
/// `G(t) ~ c t^α` near zero (`α = 1` for exponentials).
///
/// Rule-based growth functions get an analytic verdict from the growth class
/// of `f̃`; finite tables get a verdict from the last doubling window,
/// marked as evidence.
pub fn classify(f: &GrowthFunction, alpha: f64, window: usize) -> Result<ClassificationVerdict> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::contract(format!("α must be positive, got {alpha}")));
    }
    let horizon = default_horizon(f, window)?;
    let reg = tilde_f_hull(f, window, horizon)?;
    let mut verdict = classify_sequence(&reg.ln_values, alpha, f.class());
    if !reg.all_stable() {
        let unstable = reg.stable.iter().filter(|s| !**s).count();
        verdict
            .notes
            .push(format!("{unstable} of {window} values of f̃ are not certified at horizon {horizon}"));
    }
    Ok(verdict)
}

/// Classification from `ln f̃(1..=N)` and, when known, the growth class of
/// the tail.
pub fn classify_sequence(ln_tilde: &[f64], alpha: f64, class: Option<GrowthClass>) -> ClassificationVerdict {
    let (partial_sums, last_doubling_sum) = series_partial_sums(ln_tilde, alpha);
    let evidence = if last_doubling_sum < TAIL_SUM_TOL {
        Regime::Explosion
    } else {
        Regime::NoExplosion
    };
    let mut notes = Vec::new();
    let (regime, authority) = match class {
        Some(class) => {
            let regime = if series_converges(class, alpha) {
                Regime::Explosion
            } else {
                Regime::NoExplosion
            };
            notes.push(format!("tail rule of class {class:?}"));
            if regime != evidence {
                notes.push(format!(
                    "partial sums over the window suggest {evidence:?}; the tail rule decides"
                ));
            }
            (regime, Authority::Analytic)
        }
        None => {
            notes.push(format!(
                "finite table: verdict from the last doubling window sum {last_doubling_sum:.3e} against {TAIL_SUM_TOL:e}"
            ));
            (evidence, Authority::Evidence)
        }
    };
    ClassificationVerdict {
        regime,
        authority,
        alpha,
        window: ln_tilde.len(),
        partial_sums,
        last_doubling_sum,
        notes,
    }
}

/// Partial sums of `Σ_{n≤N} G^{-1}(1/f(n))` at [`checkpoints`].
///
/// Exploratory only: no verdict is attached.
pub fn criterion_general_g(
    f: &GrowthFunction,
    ginv: &dyn Fn(f64) -> f64,
    window: usize,
) -> Result<Vec<(usize, f64)>> {
    let marks = checkpoints(window);
    let mut acc = NeumaierSum::new();
    let mut out = Vec::with_capacity(marks.len());
    let mut next = 0;
    for n in 1..=window {
        let p = (-f.ln_value(n as u64)?).exp();
        let t = ginv(p);
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Numeric(format!("G^{{-1}}({p}) = {t} at n = {n}")));
        }
        acc.add(t);
        if marks[next] == n {
            out.push((n, acc.value()));
            next += 1;
        }
    }
    Ok(out)
}
