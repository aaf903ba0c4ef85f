//! First-passage percolation on spherically symmetric trees.
//!
//! Greedy and beam modes never materialize the tree: the children of a
//! vertex enter only through the smallest order statistics of their transit
//! times, so `f(n)` may be astronomically large. Exact minima need the full
//! tree and are limited to [`front::DEFAULT_TREE_CAP`] vertices.
//!
//! Randomness: replica `r` of a run with seed `s` draws from ChaCha8 seeded
//! with `s`, on stream `r`. Replicas run in parallel and are reproducible
//! independently of thread count.

pub mod bounds;
pub mod dist;
pub mod front;
pub mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use bounds::{first_moment_bound, ln_gamma_cdf, weighted_chernoff_threshold, MomentBound};
pub use dist::{sample_k_order_stats, sample_min_transit, InverseCdf, TransitDist};
pub use front::{beam_levels, exact_front, greedy_descent, LabeledTree, DEFAULT_TREE_CAP};
pub use stats::{explosion_test, ratio_statistics, EvidenceVerdict, ExplosionReport, LevelBand, RatioSummary};

use crate::error::{Error, Result};
use crate::growth::{default_horizon, tilde_f_hull};
use crate::numeric::NeumaierSum;
use crate::tree::GrowthFunction;

/// Default cap on `width · k` candidates held per level.
pub const DEFAULT_MEMORY_BUDGET: usize = 100_000_000;

/// Random number stream for one replica.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Greedy,
    Beam,
    /// Beam over weighted sums `Σ f̃(|w|)^{1/α} X(w)`.
    BeamWeighted,
    Exact,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Greedy => "greedy",
            Mode::Beam => "beam",
            Mode::BeamWeighted => "beam-weighted",
            Mode::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    pub replicas: usize,
    /// Beam width `W`; `usize::MAX` keeps every candidate.
    pub beam_width: usize,
    /// Children kept per vertex.
    pub prune_k: usize,
    pub depth: usize,
    pub dist: TransitDist,
    /// Cap on `W · k`.
    pub memory_budget: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            replicas: 1,
            beam_width: 200,
            prune_k: 3,
            depth: 100,
            dist: TransitDist::Exponential,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 || self.beam_width == 0 || self.prune_k == 0 || self.depth == 0 {
            return Err(Error::contract(
                "replicas, beam width, prune degree and depth must all be at least 1",
            ));
        }
        let need = (self.beam_width as u128) * (self.prune_k as u128);
        if self.beam_width != usize::MAX && need > self.memory_budget as u128 {
            return Err(Error::cap("beam candidates per level", need, self.memory_budget as u128));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub m_hat: f64,
    pub normalizer: f64,
    /// `m_hat / normalizer`, or NaN when the normalizer is zero.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub mode: Mode,
    pub seed: u64,
    pub replica: u64,
    pub levels: Vec<LevelRecord>,
}

impl Trajectory {
    fn new(mode: Mode, seed: u64, replica: u64, m_hat: &[f64], normalizer: &[f64]) -> Self {
        let levels = m_hat
            .iter()
            .zip(normalizer)
            .enumerate()
            .map(|(i, (&m, &z))| LevelRecord {
                level: i + 1,
                m_hat: m,
                normalizer: z,
                ratio: if z > 0.0 { m / z } else { f64::NAN },
            })
            .collect();
        Trajectory {
            mode,
            seed,
            replica,
            levels,
        }
    }

    pub fn final_ratio(&self) -> f64 {
        self.levels.last().map_or(f64::NAN, |l| l.ratio)
    }
}

/// `Σ_{j≤n} f̃(j)^{-1/α}` for `n = 1..=depth`.
pub fn normalizers(f: &GrowthFunction, depth: usize, alpha: f64) -> Result<Vec<f64>> {
    let reg = tilde_f_hull(f, depth, default_horizon(f, depth)?)?;
    let mut acc = NeumaierSum::new();
    Ok(reg
        .ln_values
        .iter()
        .map(|l| {
            acc.add((-l / alpha).exp());
            acc.value()
        })
        .collect())
}

/// Weights `f̃(n)^{1/α}` for weighted sums.
pub fn weights(f: &GrowthFunction, depth: usize, alpha: f64) -> Result<Vec<f64>> {
    let reg = tilde_f_hull(f, depth, default_horizon(f, depth)?)?;
    Ok(reg.ln_values.iter().map(|l| (l / alpha).exp()).collect())
}

/// Runs one replica. Weighted trajectories are normalized by `n`, the others
/// by `Σ_{j≤n} f̃(j)^{-1/α}`.
pub fn run_replica(
    cfg: &SimConfig,
    f: &GrowthFunction,
    mode: Mode,
    replica: u64,
    normalizer: &[f64],
    weights: Option<&[f64]>,
) -> Result<Trajectory> {
    let mut rng = replica_rng(cfg.seed, replica);
    let n = cfg.depth;
    let m_hat = match mode {
        Mode::Greedy => greedy_descent(f, n, &cfg.dist, &mut rng)?,
        Mode::Beam => beam_levels(f, n, cfg.beam_width, cfg.prune_k, &cfg.dist, None, &mut rng)?,
        Mode::BeamWeighted => {
            let w = weights.ok_or_else(|| Error::contract("weighted mode needs weights"))?;
            beam_levels(f, n, cfg.beam_width, cfg.prune_k, &cfg.dist, Some(w), &mut rng)?
        }
        Mode::Exact => exact_front(f, n, &cfg.dist, &mut rng)?,
    };
    Ok(Trajectory::new(mode, cfg.seed, replica, &m_hat, normalizer))
}

/// Runs `cfg.replicas` independent replicas in parallel, in replica order.
pub fn run_replicas(cfg: &SimConfig, f: &GrowthFunction, mode: Mode) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    let alpha = cfg.dist.alpha();
    let (normalizer, w) = if mode == Mode::BeamWeighted {
        let n: Vec<f64> = (1..=cfg.depth).map(|n| n as f64).collect();
        (n, Some(weights(f, cfg.depth, alpha)?))
    } else {
        (normalizers(f, cfg.depth, alpha)?, None)
    };
    (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| run_replica(cfg, f, mode, r, &normalizer, w.as_deref()))
        .collect()
}
