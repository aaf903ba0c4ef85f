//! Random small instances for scans and property tests.

use rand::Rng;

use super::boxes::{rat, AxisBox, BoxUnion, Rational};
use crate::tree::{Partition, RootedTree};

/// Breakpoints used for random boxes.
pub fn breakpoints() -> Vec<Rational> {
    vec![rat(0, 1), rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), rat(3, 4), rat(1, 1)]
}

/// Union of `1..=max_boxes` boxes with corners on [`breakpoints`].
pub fn random_box_union<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_boxes: usize) -> BoxUnion {
    let pts = breakpoints();
    let count = rng.random_range(1..=max_boxes.max(1));
    let boxes = (0..count)
        .map(|_| {
            let (lo, hi): (Vec<_>, Vec<_>) = (0..dim)
                .map(|_| {
                    let a = rng.random_range(0..pts.len());
                    let b = rng.random_range(0..pts.len());
                    (pts[a.min(b)].clone(), pts[a.max(b)].clone())
                })
                .unzip();
            AxisBox::new(lo, hi).expect("breakpoints lie in [0,1]")
        })
        .collect();
    BoxUnion::new(dim, boxes).expect("dimensions agree")
}

/// Leveled tree of the given height; each vertex above the bottom has
/// `1..=max_children` children.
pub fn random_leveled_tree<R: Rng + ?Sized>(rng: &mut R, height: usize, max_children: usize) -> RootedTree {
    let mut t = RootedTree::singleton();
    let mut frontier = vec![RootedTree::ROOT];
    for _ in 0..height {
        let mut next = Vec::new();
        for v in frontier {
            for _ in 0..rng.random_range(1..=max_children.max(1)) {
                next.push(t.push_child(v));
            }
        }
        frontier = next;
    }
    t
}

/// Partition with total in `1..=max_total`.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, max_total: u64) -> Partition {
    let mut left = rng.random_range(1..=max_total.max(1));
    let mut parts = Vec::new();
    while left > 0 {
        let p = rng.random_range(1..=left);
        parts.push(p);
        left -= p;
    }
    Partition::new(parts)
}
