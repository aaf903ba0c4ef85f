//! Finite rooted trees, spherically symmetric constructions, graded graphs
//! and the structural queries the other modules rely on.

mod graded;
mod growth;
mod partition;
mod rooted;

pub use graded::GradedGraph;
pub use growth::{GrowthClass, GrowthFunction, Tail};
pub use partition::Partition;
pub use rooted::{
    build_paths_tree, build_spherical, build_spherical_capped, figure1_trees, RootedTree,
    TreeNode, VertexId, DEFAULT_VERTEX_CAP,
};

use crate::error::{Error, Result};

/// Children counts of the first generation of a tree of height at most 2, in
/// nonincreasing order. Childless first-generation vertices contribute zeros.
pub fn children_partition(tree: &RootedTree) -> Result<Partition> {
    if tree.height() > 2 {
        return Err(Error::contract(format!(
            "children_partition needs a tree of height at most 2, got height {}",
            tree.height()
        )));
    }
    Ok(Partition::new(
        tree.children(RootedTree::ROOT)
            .iter()
            .map(|&v| tree.children(v).len() as u64)
            .collect(),
    ))
}
