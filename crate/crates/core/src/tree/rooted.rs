use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::growth::GrowthFunction;
use crate::error::{Error, Result};

/// Default cap on explicitly constructed trees.
pub const DEFAULT_VERTEX_CAP: usize = 10_000_000;

pub type VertexId = usize;

/// Finite rooted tree stored as an arena. The root is vertex `0`; children
/// keep insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<usize>,
}

/// Nested JSON form: `{ "children": [ <node>, ... ] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeNode {
    #[serde(default)]
    pub children: Vec<TreeNode>,
}

impl Default for RootedTree {
    fn default() -> Self {
        Self::singleton()
    }
}

impl RootedTree {
    pub const ROOT: VertexId = 0;

    pub fn singleton() -> Self {
        RootedTree {
            parent: vec![None],
            children: vec![Vec::new()],
            depth: vec![0],
        }
    }

    /// Appends a new child of `parent` and returns its id.
    pub fn push_child(&mut self, parent: VertexId) -> VertexId {
        assert!(parent < self.len(), "unknown parent vertex {parent}");
        let id = self.len();
        self.parent.push(Some(parent));
        self.children.push(Vec::new());
        self.depth.push(self.depth[parent] + 1);
        self.children[parent].push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// `|Γ_n|` for `n = 1..=height`.
    pub fn generation_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.height()];
        for &d in &self.depth[1..] {
            sizes[d - 1] += 1;
        }
        sizes
    }

    pub fn generation(&self, n: usize) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).filter(move |&v| self.depth[v] == n)
    }

    /// True when every leaf sits at depth `height`.
    pub fn is_leveled(&self) -> bool {
        let h = self.height();
        (0..self.len()).all(|v| !self.children[v].is_empty() || self.depth[v] == h)
    }

    /// First leaf above the bottom level, if any.
    pub fn shallow_leaf(&self) -> Option<VertexId> {
        let h = self.height();
        (0..self.len()).find(|&v| self.children[v].is_empty() && self.depth[v] < h)
    }

    pub fn to_node(&self) -> TreeNode {
        fn build(t: &RootedTree, v: VertexId) -> TreeNode {
            TreeNode {
                children: t.children[v].iter().map(|&c| build(t, c)).collect(),
            }
        }
        build(self, Self::ROOT)
    }

    pub fn from_node(node: &TreeNode) -> Self {
        let mut tree = Self::singleton();
        let mut stack = vec![(Self::ROOT, node)];
        while let Some((v, n)) = stack.pop() {
            // Push in order so children ids follow the JSON order.
            let ids: Vec<_> = n.children.iter().map(|_| tree.push_child(v)).collect();
            for (id, child) in ids.into_iter().zip(&n.children).rev() {
                stack.push((id, child));
            }
        }
        tree
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_node()).expect("tree serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let node: TreeNode = crate::json::from_str(s)?;
        Ok(Self::from_node(&node))
    }

    /// Height-2 tree whose first-generation vertices have the given numbers of
    /// children. Zero counts yield childless first-generation vertices.
    pub fn height_two(counts: &[u64]) -> Self {
        let mut t = Self::singleton();
        for &c in counts {
            let v = t.push_child(Self::ROOT);
            for _ in 0..c {
                t.push_child(v);
            }
        }
        t
    }
}

/// Spherically symmetric tree of the given depth: every vertex at depth
/// `n - 1` gets `f(n)` children.
pub fn build_spherical(f: &GrowthFunction, depth: usize) -> Result<RootedTree> {
    build_spherical_capped(f, depth, DEFAULT_VERTEX_CAP)
}

pub fn build_spherical_capped(f: &GrowthFunction, depth: usize, cap: usize) -> Result<RootedTree> {
    if depth == 0 {
        return Err(Error::contract("depth must be positive"));
    }
    let sizes = f.generation_sizes(depth)?;
    let mut total = BigUint::from(1u32);
    for (i, b) in sizes.iter().enumerate() {
        total += b;
        if total > BigUint::from(cap) {
            return Err(Error::cap(
                format!("spherical tree vertex count through level {}", i + 1),
                total.to_u128().unwrap_or(u128::MAX),
                cap as u128,
            ));
        }
    }
    let mut tree = RootedTree::singleton();
    let mut frontier = vec![RootedTree::ROOT];
    for n in 1..=depth as u64 {
        let k = f.value(n)? as usize;
        let mut next = Vec::with_capacity(frontier.len() * k);
        for &v in &frontier {
            for _ in 0..k {
                next.push(tree.push_child(v));
            }
        }
        frontier = next;
    }
    Ok(tree)
}

/// `T(n, k)`: `k` disjoint paths of length `n` joined at the root.
pub fn build_paths_tree(n: usize, k: usize) -> RootedTree {
    let mut tree = RootedTree::singleton();
    for _ in 0..k {
        let mut v = RootedTree::ROOT;
        for _ in 0..n {
            v = tree.push_child(v);
        }
    }
    tree
}

/// The height-3 pair `(Γ, Γ′)` where `Γ′` glues the first generation of `Γ`.
///
/// `Γ`: the root has two children; the first has one child with three
/// children, the second has two children with one child each.
/// `Γ′`: the root has one child whose three children have 3, 1 and 1 children.
pub fn figure1_trees() -> (RootedTree, RootedTree) {
    let mut g = RootedTree::singleton();
    let a = g.push_child(RootedTree::ROOT);
    let b = g.push_child(RootedTree::ROOT);
    let a1 = g.push_child(a);
    for _ in 0..3 {
        g.push_child(a1);
    }
    for _ in 0..2 {
        let c = g.push_child(b);
        g.push_child(c);
    }

    let mut h = RootedTree::singleton();
    let c = h.push_child(RootedTree::ROOT);
    for k in [3, 1, 1] {
        let w = h.push_child(c);
        for _ in 0..k {
            h.push_child(w);
        }
    }
    (g, h)
}
