//! Exact evaluation of path-domination probabilities on trees and graded graphs.

pub mod boxes;
pub mod conjecture;
pub mod criteria;
pub mod phi;
pub mod prob;
pub mod psi;
pub mod random;

pub use boxes::{rat, AxisBox, BoxUnion, Grid, Rational};
pub use conjecture::{conjecture_scan, random_graded_graph, some_path_prob_graded, ConjectureReport};
pub use criteria::{
    counterexample_d, dominates_height2, dominates_spherical, height2_reversal, height2_tree, sphere_dominates_tree,
    witness_set_height2, young_violation, ReversalWitness,
};
pub use phi::{phi_tree_exact, some_path_prob};
pub use prob::ExactProb;
pub use psi::{ln_psi_real, psi_exact, psi_real};
