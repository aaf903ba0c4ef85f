use std::collections::BTreeSet;

use super::rooted::RootedTree;
use crate::error::{Error, Result};

/// Finite graph whose vertices sit on levels `1..=n`, with oriented edges only
/// from level `i` to level `i + 1`.
///
/// Vertices are numbered level by level: level 1 holds ids
/// `0..sizes[0]`, level 2 the next `sizes[1]` ids, and so on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedGraph {
    level_sizes: Vec<usize>,
    level_of: Vec<usize>,
    succ: Vec<Vec<usize>>,
}

impl GradedGraph {
    /// `edges` are `(from, to)` pairs of global vertex ids.
    pub fn new(level_sizes: Vec<usize>, edges: &[(usize, usize)]) -> Result<Self> {
        let level_of: Vec<usize> = level_sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| std::iter::repeat_n(i + 1, s))
            .collect();
        let mut succ = vec![BTreeSet::new(); level_of.len()];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= level_of.len() || b >= level_of.len() {
                return Err(Error::input(format!("/edges/{i}"), "vertex id out of range"));
            }
            if level_of[b] != level_of[a] + 1 {
                return Err(Error::input(
                    format!("/edges/{i}"),
                    format!(
                        "edge {a}->{b} joins levels {} and {}; edges must go to the next level",
                        level_of[a], level_of[b]
                    ),
                ));
            }
            succ[a].insert(b);
        }
        Ok(GradedGraph {
            level_sizes,
            level_of,
            succ: succ.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// The tree minus its root, levels given by depth.
    pub fn from_tree(tree: &RootedTree) -> Self {
        let h = tree.height();
        let mut order: Vec<usize> = (1..tree.len()).collect();
        order.sort_by_key(|&v| tree.depth(v));
        let mut id = vec![usize::MAX; tree.len()];
        for (i, &v) in order.iter().enumerate() {
            id[v] = i;
        }
        let sizes = tree.generation_sizes();
        let edges: Vec<(usize, usize)> = order
            .iter()
            .flat_map(|&v| tree.children(v).iter().map(move |&c| (v, c)))
            .map(|(v, c)| (id[v], id[c]))
            .collect();
        debug_assert_eq!(sizes.len(), h);
        Self::new(sizes, &edges).expect("tree edges join consecutive depths")
    }

    pub fn height(&self) -> usize {
        self.level_sizes.len()
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn vertex_count(&self) -> usize {
        self.level_of.len()
    }

    /// 1-based level of vertex `v`.
    pub fn level(&self, v: usize) -> usize {
        self.level_of[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn level_vertices(&self, level: usize) -> std::ops::Range<usize> {
        let start: usize = self.level_sizes[..level - 1].iter().sum();
        start..start + self.level_sizes[level - 1]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// `K(G)`: number of oriented paths visiting every level.
    pub fn count_full_paths(&self) -> u128 {
        if self.level_sizes.is_empty() {
            return 0;
        }
        let mut ways = vec![0u128; self.vertex_count()];
        for v in self.level_vertices(1) {
            ways[v] = 1;
        }
        for level in 1..self.height() {
            for v in self.level_vertices(level) {
                let w = ways[v];
                for &s in &self.succ[v] {
                    ways[s] += w;
                }
            }
        }
        self.level_vertices(self.height()).map(|v| ways[v]).sum()
    }

    /// All full paths as vertex sequences.
    pub fn full_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if self.level_sizes.is_empty() {
            return out;
        }
        let n = self.height();
        let mut stack: Vec<Vec<usize>> = self.level_vertices(1).map(|v| vec![v]).collect();
        while let Some(path) = stack.pop() {
            if path.len() == n {
                out.push(path);
                continue;
            }
            let last = *path.last().unwrap();
            for &s in self.succ[last].iter().rev() {
                let mut p = path.clone();
                p.push(s);
                stack.push(p);
            }
        }
        out
    }
}
