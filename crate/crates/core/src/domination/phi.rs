use std::collections::HashMap;

use num_traits::{One, Zero};

use super::boxes::{BoxUnion, Grid, Rational};
use super::prob::ExactProb;
use super::psi::pow_rational;
use crate::error::{Error, Result};
use crate::tree::{RootedTree, VertexId};

/// Cap on memoized (subtree, section) evaluations.
pub const DEFAULT_STATE_CAP: usize = 5_000_000;

/// `φ(T; D)`: exact probability that every path `ρ, w_1, …, w_n` of `T` has
/// `(X(w_1), …, X(w_n)) ∈ D` under i.i.d. uniform labels.
///
/// `T` must have height `n = dim(D)` with every leaf at depth `n`.
pub fn phi_tree_exact(tree: &RootedTree, set: &BoxUnion) -> Result<ExactProb> {
    check_shape(tree, set)?;
    let grid = set.grid()?;
    let mut eval = PhiEval::new(tree, &grid);
    let p = eval.vertex(RootedTree::ROOT, 0)?;
    Ok(ExactProb::new(p))
}

/// `P(B; T)`: exact probability that some path of `T` has its label vector in
/// `B`; equals `1 - φ(T; complement(B))`.
pub fn some_path_prob(tree: &RootedTree, set: &BoxUnion) -> Result<ExactProb> {
    check_shape(tree, set)?;
    Ok(phi_tree_exact(tree, &set.complement()?)?.complement())
}

fn check_shape(tree: &RootedTree, set: &BoxUnion) -> Result<()> {
    if set.dim() == 0 {
        return Err(Error::contract("sets must have dimension at least 1"));
    }
    if tree.height() != set.dim() {
        return Err(Error::contract(format!(
            "tree height {} does not match set dimension {}",
            tree.height(),
            set.dim()
        )));
    }
    if let Some(v) = tree.shallow_leaf() {
        return Err(Error::contract(format!(
            "ragged tree: vertex {v} is a leaf at depth {} above the bottom level {}",
            tree.depth(v),
            tree.height()
        )));
    }
    Ok(())
}

/// Depth-first evaluation over (vertex, ancestor cells). Isomorphic subtrees
/// share a canonical id, so repeated shapes are evaluated once per section.
struct PhiEval<'a> {
    tree: &'a RootedTree,
    grid: &'a Grid,
    canon: Vec<usize>,
    /// Children of each vertex grouped by canonical id, with multiplicity.
    groups: Vec<Vec<(VertexId, u64)>>,
    memo: HashMap<(usize, usize, usize), Rational>,
}

impl<'a> PhiEval<'a> {
    fn new(tree: &'a RootedTree, grid: &'a Grid) -> Self {
        let mut order: Vec<VertexId> = (0..tree.len()).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(tree.depth(v)));
        let mut canon = vec![0usize; tree.len()];
        let mut interned: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut groups = vec![Vec::new(); tree.len()];
        for &v in &order {
            let mut kids: Vec<usize> = tree.children(v).iter().map(|&c| canon[c]).collect();
            kids.sort_unstable();
            let next = interned.len();
            canon[v] = *interned.entry(kids).or_insert(next);

            let mut g: Vec<(VertexId, u64)> = Vec::new();
            let mut by_canon: HashMap<usize, usize> = HashMap::new();
            for &c in tree.children(v) {
                match by_canon.get(&canon[c]) {
                    Some(&i) => g[i].1 += 1,
                    None => {
                        by_canon.insert(canon[c], g.len());
                        g.push((c, 1));
                    }
                }
            }
            groups[v] = g;
        }
        PhiEval {
            tree,
            grid,
            canon,
            groups,
            memo: HashMap::new(),
        }
    }

    /// Probability that all paths below `v` stay in the section at `offset`.
    fn vertex(&mut self, v: VertexId, offset: usize) -> Result<Rational> {
        let depth = self.tree.depth(v);
        if depth == self.grid.dim() {
            return Ok(if self.grid.inside(offset) {
                Rational::one()
            } else {
                Rational::zero()
            });
        }
        let key = (self.canon[v], depth, offset);
        if let Some(p) = self.memo.get(&key) {
            return Ok(p.clone());
        }
        if self.memo.len() >= DEFAULT_STATE_CAP {
            return Err(Error::cap(
                "memoized subtree evaluations",
                self.memo.len() as u128 + 1,
                DEFAULT_STATE_CAP as u128,
            ));
        }
        let stride = self.grid.strides()[depth];
        let ncells = self.grid.shape()[depth];
        let mut prod = Rational::one();
        let groups = self.groups[v].clone();
        for (child, mult) in groups {
            let mut sum = Rational::zero();
            for j in 0..ncells {
                let inner = self.vertex(child, offset + j * stride)?;
                if !inner.is_zero() {
                    sum += &self.grid.widths(depth)[j] * inner;
                }
            }
            if sum.is_zero() {
                prod = Rational::zero();
                break;
            }
            prod *= pow_rational(sum, mult);
        }
        self.memo.insert(key, prod.clone());
        Ok(prod)
    }
}
