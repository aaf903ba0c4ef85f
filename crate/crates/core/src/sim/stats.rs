use serde::Serialize;

use super::{run_replicas, Mode, SimConfig, Trajectory};
use crate::error::{Error, Result};
use crate::growth::{classify, limit_constant, Authority, ClassificationVerdict, Regime};
use crate::tree::GrowthFunction;

/// Greedy totals are judged convergent when their mean increase over the
/// last doubling window is below this.
pub const GREEDY_TAIL_TOL: f64 = 1e-3;

/// Beam minima are judged to keep growing when their mean increase over the
/// last doubling window is at least this.
pub const BEAM_GROWTH_TOL: f64 = 0.1;

/// `ε` used for the weighted Chernoff threshold.
pub const CHERNOFF_EPS: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct LevelBand {
    pub level: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// The band `[min, max]` misses the target by more than the tolerance.
    pub excludes_target: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioSummary {
    pub target: f64,
    /// Relative tolerance around the target.
    pub tolerance: f64,
    pub replicas: usize,
    pub bands: Vec<LevelBand>,
    /// Fraction of replicas whose final ratio lies within the tolerance.
    pub final_within: f64,
    /// Relative change of the mean ratio between levels `N/2` and `N`.
    pub doubling_change: f64,
    pub flagged_levels: usize,
}

impl RatioSummary {
    pub fn final_band(&self) -> &LevelBand {
        self.bands.last().expect("at least one level")
    }
}

/// Per-level band of `M̂_n / normalizer` across replicas, compared with
/// `target`. Requires a divergent normalizer, that is a no-explosion regime.
pub fn ratio_statistics(
    trajectories: &[Trajectory],
    verdict: &ClassificationVerdict,
    target: f64,
    tolerance: f64,
) -> Result<RatioSummary> {
    if verdict.regime == Regime::Explosion {
        return Err(Error::contract(
            "ratio statistics need a divergent normalizer; this growth function explodes",
        ));
    }
    let Some(first) = trajectories.first() else {
        return Err(Error::contract("no trajectories"));
    };
    let depth = first.levels.len();
    if depth == 0 || trajectories.iter().any(|t| t.levels.len() != depth) {
        return Err(Error::contract("trajectories must share a positive depth"));
    }
    let lo = target * (1.0 - tolerance);
    let hi = target * (1.0 + tolerance);
    let bands: Vec<LevelBand> = (0..depth)
        .map(|i| {
            let rs = trajectories.iter().map(|t| t.levels[i].ratio);
            let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
            for r in rs {
                min = min.min(r);
                max = max.max(r);
                sum += r;
            }
            LevelBand {
                level: i + 1,
                mean: sum / trajectories.len() as f64,
                min,
                max,
                excludes_target: max < lo || min > hi,
            }
        })
        .collect();
    let within = trajectories
        .iter()
        .filter(|t| (lo..=hi).contains(&t.levels[depth - 1].ratio))
        .count();
    let half = bands[(depth / 2).max(1) - 1].mean;
    let last = bands[depth - 1].mean;
    Ok(RatioSummary {
        target,
        tolerance,
        replicas: trajectories.len(),
        flagged_levels: bands.iter().filter(|b| b.excludes_target).count(),
        final_within: within as f64 / trajectories.len() as f64,
        doubling_change: (last - half).abs() / last.abs().max(f64::MIN_POSITIVE),
        bands,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvidenceVerdict {
    Explosion,
    NoExplosion,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplosionReport {
    pub analytic: Option<ClassificationVerdict>,
    pub evidence: EvidenceVerdict,
    /// Final verdict: analytic when available, otherwise the evidence.
    pub verdict: EvidenceVerdict,
    /// Mean greedy passage time to level `N`.
    pub greedy_total: f64,
    /// Mean greedy increase over levels `(N/2, N]`.
    pub greedy_tail: f64,
    /// Mean beam increase over levels `(N/2, N]`.
    pub beam_increment: f64,
    /// Weighted Chernoff threshold at level `N`, scaled by the limit constant.
    pub weighted_threshold: f64,
    /// Smallest weighted beam minimum at level `N` across replicas.
    pub weighted_min: f64,
    pub threshold_respected: bool,
    /// The evidence contradicts the analytic verdict.
    pub defect: bool,
}

/// Explosion verdict for growth `f` under `cfg.dist`, combining the analytic
/// classification with greedy and beam evidence.
pub fn explosion_test(f: &GrowthFunction, cfg: &SimConfig) -> Result<ExplosionReport> {
    cfg.validate()?;
    let n = cfg.depth;
    let half = (n / 2).max(1);
    let alpha = cfg.dist.alpha();
    let classified = classify(f, alpha, n)?;
    let analytic = (classified.authority == Authority::Analytic).then_some(classified);

    let mean_increase = |runs: &[Trajectory]| {
        runs.iter()
            .map(|t| t.levels[n - 1].m_hat - t.levels[half - 1].m_hat)
            .sum::<f64>()
            / runs.len() as f64
    };
    let greedy = run_replicas(cfg, f, Mode::Greedy)?;
    let greedy_tail = mean_increase(&greedy);
    let greedy_total = greedy.iter().map(|t| t.levels[n - 1].m_hat).sum::<f64>() / greedy.len() as f64;
    let beam = run_replicas(cfg, f, Mode::Beam)?;
    let beam_increment = mean_increase(&beam);
    let weighted = run_replicas(cfg, f, Mode::BeamWeighted)?;
    let scale = limit_constant(alpha, cfg.dist.c())? * std::f64::consts::E;
    let weighted_threshold = super::bounds::weighted_chernoff_threshold(n, CHERNOFF_EPS)? * scale;
    let weighted_min = weighted
        .iter()
        .map(|t| t.levels[n - 1].m_hat)
        .fold(f64::INFINITY, f64::min);
    let threshold_respected = weighted_min >= weighted_threshold;

    let evidence = if greedy_tail < GREEDY_TAIL_TOL {
        EvidenceVerdict::Explosion
    } else if beam_increment >= BEAM_GROWTH_TOL && threshold_respected {
        EvidenceVerdict::NoExplosion
    } else {
        EvidenceVerdict::Inconclusive
    };
    let (verdict, defect) = match &analytic {
        Some(v) => {
            let a = match v.regime {
                Regime::Explosion => EvidenceVerdict::Explosion,
                Regime::NoExplosion => EvidenceVerdict::NoExplosion,
            };
            (a, evidence != EvidenceVerdict::Inconclusive && evidence != a)
        }
        None => (evidence, false),
    };
    Ok(ExplosionReport {
        analytic,
        evidence,
        verdict,
        greedy_total,
        greedy_tail,
        beam_increment,
        weighted_threshold,
        weighted_min,
        threshold_respected,
        defect,
    })
}
