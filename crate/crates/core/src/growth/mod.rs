//! The nondecreasing regularization `f̃` of a growth function and explosion
//! classification.

pub mod classify;
pub mod regularize;

pub use classify::{
    checkpoints, classify, classify_sequence, criterion_general_g, limit_constant, series_converges, Authority,
    ClassificationVerdict, Regime,
};
pub use regularize::{
    default_horizon, equal_product_indices, minorant_increments, minorant_increments_recursive, tilde_f_hull,
    tilde_f_recursive, RegularizedGrowth,
};
