//! Exact path probabilities and the domination order on finite trees, the
//! regularized growth transform, and first-passage percolation on
//! spherically symmetric trees.
//!
//! The crate is split along four lines:
//!
//! * [`tree`]: growth functions, rooted trees, graded graphs, partitions.
//! * [`domination`]: rational box unions, the `Ψ` recursion, exact
//!   all-paths / some-path probabilities and the domination criteria.
//! * [`growth`]: the nondecreasing regularization `f̃` and explosion
//!   classification.
//! * [`sim`]: lazy simulation of passage times without materializing trees.

pub mod domination;
pub mod error;
pub mod growth;
pub mod json;
pub mod numeric;
pub mod sim;
pub mod tree;

pub use error::{Error, Result};
