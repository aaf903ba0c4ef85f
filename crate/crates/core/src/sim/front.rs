//! Passage times to each level: greedy descent, pruned beam search, and
//! exact minima on materialized trees.

use rand::Rng;

use super::dist::{fill_order_stats, TransitDist};
use crate::error::{Error, Result};
use crate::tree::GrowthFunction;

/// Vertex cap for materialized labeled trees.
pub const DEFAULT_TREE_CAP: usize = 10_000_000;

fn multiplicity(f: &GrowthFunction, n: usize) -> Result<f64> {
    Ok(f.value_f64(n as u64)?.min(f64::MAX))
}

/// `S(v_1), …, S(v_N)` along the greedy path that always moves to the child
/// with the smallest transit time.
pub fn greedy_descent<R: Rng + ?Sized>(f: &GrowthFunction, depth: usize, dist: &TransitDist, rng: &mut R) -> Result<Vec<f64>> {
    let mut s = 0.0;
    let mut out = Vec::with_capacity(depth);
    for n in 1..=depth {
        s += super::dist::sample_min_transit(multiplicity(f, n)?, dist, rng);
        out.push(s);
    }
    Ok(out)
}

/// Keeps the `width` smallest entries of `v`, preserving their order; ties at
/// the threshold are kept first-come.
pub fn truncate_smallest(v: &mut Vec<f64>, width: usize, scratch: &mut Vec<f64>) {
    if v.len() <= width {
        return;
    }
    scratch.clear();
    scratch.extend_from_slice(v);
    let (_, &mut thr, _) = scratch.select_nth_unstable_by(width - 1, f64::total_cmp);
    let below = v.iter().filter(|&&x| x < thr).count();
    let mut ties = width - below;
    v.retain(|&x| {
        if x < thr {
            true
        } else if x == thr && ties > 0 {
            ties -= 1;
            true
        } else {
            false
        }
    });
}

/// Beam search over the `k`-pruned tree: every retained vertex at level
/// `n - 1` gets its `min(k, f(n))` fastest children, and the `width`
/// smallest partial sums survive. Returns the per-level minimum partial sum.
///
/// Each entry is the passage time along an actual path, so it bounds `M_n`
/// from above. With `weights`, transit times at level `n` are multiplied by
/// `weights[n-1]`.
pub fn beam_levels<R: Rng + ?Sized>(
    f: &GrowthFunction,
    depth: usize,
    width: usize,
    k: usize,
    dist: &TransitDist,
    weights: Option<&[f64]>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if width == 0 || k == 0 {
        return Err(Error::contract("beam width and prune degree must be positive"));
    }
    let mut beam = vec![0.0f64];
    let mut next = Vec::new();
    let mut draws = Vec::with_capacity(k);
    let mut scratch = Vec::new();
    let mut out = Vec::with_capacity(depth);
    for n in 1..=depth {
        let m = multiplicity(f, n)?;
        let kk = (k as f64).min(m) as usize;
        let w = weights.map_or(1.0, |w| w[n - 1]);
        next.clear();
        for &s in &beam {
            draws.clear();
            fill_order_stats(m, kk, dist, rng, &mut draws);
            next.extend(draws.iter().map(|x| s + w * x));
        }
        truncate_smallest(&mut next, width, &mut scratch);
        out.push(next.iter().copied().fold(f64::INFINITY, f64::min));
        std::mem::swap(&mut beam, &mut next);
    }
    Ok(out)
}

/// One generation of a materialized labeled tree, in breadth-first order.
/// Children of a vertex are contiguous and sorted by label.
#[derive(Debug, Clone, Default)]
pub struct Generation {
    pub parent: Vec<u32>,
    pub label: Vec<f64>,
    /// `child_start[p]..child_start[p+1]` are the children of vertex `p` of
    /// the previous generation.
    pub child_start: Vec<u32>,
}

/// A spherically symmetric tree, optionally `k`-pruned, with sampled
/// transit times on every vertex.
#[derive(Debug, Clone)]
pub struct LabeledTree {
    pub generations: Vec<Generation>,
}

impl LabeledTree {
    /// Samples the tree level by level in breadth-first order; each vertex at
    /// level `n - 1` gets `min(k, f(n))` children carrying the smallest
    /// order statistics of `f(n)` transit times (all children when `k` is
    /// `None`). Draws the random numbers in the same order as
    /// [`beam_levels`] with unbounded width.
    pub fn sample<R: Rng + ?Sized>(
        f: &GrowthFunction,
        depth: usize,
        k: Option<usize>,
        dist: &TransitDist,
        rng: &mut R,
        cap: usize,
    ) -> Result<Self> {
        let mut sizes = Vec::with_capacity(depth);
        let mut count: u128 = 1;
        let mut total: u128 = 1;
        for n in 1..=depth {
            let m = f.value(n as u64)?;
            let kk = k.map_or(m, |k| (k as u64).min(m));
            count = count.saturating_mul(kk as u128);
            total = total.saturating_add(count);
            if total > cap as u128 {
                return Err(Error::SizeCap {
                    what: format!("labeled tree vertices through level {n}"),
                    requested: total,
                    cap: cap as u128,
                });
            }
            sizes.push(kk as usize);
        }
        let mut generations: Vec<Generation> = Vec::with_capacity(depth);
        let mut prev_len = 1usize;
        for (i, &kk) in sizes.iter().enumerate() {
            let m = f.value_f64(i as u64 + 1)?;
            let mut g = Generation {
                parent: Vec::with_capacity(prev_len * kk),
                label: Vec::with_capacity(prev_len * kk),
                child_start: Vec::with_capacity(prev_len + 1),
            };
            for p in 0..prev_len {
                g.child_start.push(g.label.len() as u32);
                fill_order_stats(m, kk, dist, rng, &mut g.label);
                g.parent.extend(std::iter::repeat_n(p as u32, kk));
            }
            g.child_start.push(g.label.len() as u32);
            prev_len = g.label.len();
            generations.push(g);
        }
        Ok(LabeledTree { generations })
    }

    pub fn depth(&self) -> usize {
        self.generations.len()
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.generations.iter().map(|g| g.label.len()).sum::<usize>()
    }

    fn children(&self, level: usize, v: usize) -> std::ops::Range<usize> {
        let g = &self.generations[level];
        g.child_start[v] as usize..g.child_start[v + 1] as usize
    }

    /// `M_1, …, M_N` by depth-first branch and bound.
    ///
    /// A vertex at level `d` with partial sum `s` is not expanded when
    /// `s ≥ best[j]` for every `j ≥ d`: transit times are nonnegative, so no
    /// descendant can improve any level.
    pub fn level_minima(&self) -> Vec<f64> {
        let depth = self.depth();
        let mut best = vec![f64::INFINITY; depth];
        // bound[d] = max_{j ≥ d} best[j]
        let mut bound = vec![f64::INFINITY; depth + 1];
        bound[depth] = f64::NEG_INFINITY;
        let mut stack: Vec<(usize, usize, f64)> = Vec::new();
        if depth > 0 {
            for c in self.children(0, 0).rev() {
                stack.push((0, c, 0.0));
            }
        }
        while let Some((lvl, v, base)) = stack.pop() {
            let s = base + self.generations[lvl].label[v];
            if s < best[lvl] {
                best[lvl] = s;
                let mut i = lvl;
                loop {
                    let b = best[i].max(bound[i + 1]);
                    if b == bound[i] {
                        break;
                    }
                    bound[i] = b;
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                }
            }
            if lvl + 1 == depth || s >= bound[lvl] {
                continue;
            }
            for c in self.children(lvl + 1, v).rev() {
                stack.push((lvl + 1, c, s));
            }
        }
        best
    }

    /// `M_1, …, M_N` by summing along every vertex.
    pub fn level_minima_brute_force(&self) -> Vec<f64> {
        let mut sums = vec![0.0];
        let mut out = Vec::with_capacity(self.depth());
        for g in &self.generations {
            let next: Vec<f64> = g
                .parent
                .iter()
                .zip(&g.label)
                .map(|(&p, &x)| sums[p as usize] + x)
                .collect();
            out.push(next.iter().copied().fold(f64::INFINITY, f64::min));
            sums = next;
        }
        out
    }

    /// Beam search of width `width` over the `k` fastest children of each
    /// vertex of this tree. Every entry is at least the exact `M_n`.
    pub fn beam_minima(&self, width: usize, k: usize) -> Vec<f64> {
        let mut beam: Vec<(usize, f64)> = vec![(0, 0.0)];
        let mut out = Vec::with_capacity(self.depth());
        let mut scratch = Vec::new();
        for (lvl, g) in self.generations.iter().enumerate() {
            let mut next: Vec<(usize, f64)> = Vec::new();
            for &(v, s) in &beam {
                for c in self.children(lvl, v).take(k) {
                    next.push((c, s + g.label[c]));
                }
            }
            let mut sums: Vec<f64> = next.iter().map(|x| x.1).collect();
            truncate_smallest(&mut sums, width, &mut scratch);
            if sums.len() < next.len() {
                let thr = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut ties = sums.iter().filter(|&&x| x == thr).count();
                next.retain(|&(_, s)| {
                    if s < thr {
                        true
                    } else if s == thr && ties > 0 {
                        ties -= 1;
                        true
                    } else {
                        false
                    }
                });
            }
            out.push(next.iter().map(|x| x.1).fold(f64::INFINITY, f64::min));
            beam = next;
        }
        out
    }
}

/// Exact `M_1, …, M_N` on a freshly sampled full tree.
pub fn exact_front<R: Rng + ?Sized>(f: &GrowthFunction, depth: usize, dist: &TransitDist, rng: &mut R) -> Result<Vec<f64>> {
    Ok(LabeledTree::sample(f, depth, None, dist, rng, DEFAULT_TREE_CAP)?.level_minima())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::replica_rng;

    #[test]
    fn truncation_keeps_order_and_ties() {
        let mut v = vec![5.0, 1.0, 3.0, 3.0, 0.5, 3.0];
        truncate_smallest(&mut v, 4, &mut Vec::new());
        assert_eq!(v, vec![1.0, 3.0, 3.0, 0.5]);
        let mut v = vec![2.0, 1.0];
        truncate_smallest(&mut v, 5, &mut Vec::new());
        assert_eq!(v, vec![2.0, 1.0]);
    }

    #[test]
    fn branch_and_bound_matches_brute_force() {
        let f = GrowthFunction::table(vec![3, 2, 4, 1, 3]).unwrap();
        for seed in 0..50 {
            let t = LabeledTree::sample(&f, 5, None, &TransitDist::Exponential, &mut replica_rng(seed, 0), 1000).unwrap();
            assert_eq!(t.vertex_count(), 1 + 3 + 6 + 24 + 24 + 72);
            assert_eq!(t.level_minima(), t.level_minima_brute_force());
        }
    }

    #[test]
    fn two_by_two_by_hand() {
        let f = GrowthFunction::table(vec![2, 2]).unwrap();
        let t = LabeledTree::sample(&f, 2, None, &TransitDist::Exponential, &mut replica_rng(9, 0), 100).unwrap();
        let g1 = &t.generations[0];
        let g2 = &t.generations[1];
        let paths = (0..4).map(|c| g1.label[g2.parent[c] as usize] + g2.label[c]);
        let m2 = paths.fold(f64::INFINITY, f64::min);
        let m1 = g1.label[0].min(g1.label[1]);
        assert_eq!(t.level_minima(), vec![m1, m2]);
    }

    #[test]
    fn unbounded_beam_equals_exact_on_same_stream() {
        let f = GrowthFunction::table(vec![2, 2, 2]).unwrap();
        for seed in 0..20 {
            let beam = beam_levels(&f, 3, usize::MAX, 2, &TransitDist::Exponential, None, &mut replica_rng(seed, 3)).unwrap();
            let exact = exact_front(&f, 3, &TransitDist::Exponential, &mut replica_rng(seed, 3)).unwrap();
            assert_eq!(beam, exact);
        }
    }

    #[test]
    fn single_path_degenerates() {
        let f = GrowthFunction::constant(1).unwrap();
        let beam = beam_levels(&f, 10, 5, 3, &TransitDist::Exponential, None, &mut replica_rng(1, 0)).unwrap();
        let greedy = greedy_descent(&f, 10, &TransitDist::Exponential, &mut replica_rng(1, 0)).unwrap();
        assert_eq!(beam, greedy);
        assert!(beam.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn beam_on_tree_is_an_upper_bound() {
        let f = GrowthFunction::table(vec![3, 3, 3, 3, 3, 3]).unwrap();
        for seed in 0..30 {
            let t = LabeledTree::sample(&f, 6, None, &TransitDist::Exponential, &mut replica_rng(seed, 0), 10_000).unwrap();
            let exact = t.level_minima();
            for (w, k) in [(1, 1), (2, 2), (4, 3), (1000, 3)] {
                let b = t.beam_minima(w, k);
                assert!(b.iter().zip(&exact).all(|(b, e)| b >= e));
            }
            assert_eq!(t.beam_minima(usize::MAX, 3), exact);
        }
    }

    #[test]
    fn cap_names_the_level() {
        let f = GrowthFunction::constant(10).unwrap();
        let e = LabeledTree::sample(&f, 8, None, &TransitDist::Exponential, &mut replica_rng(0, 0), 1000).unwrap_err();
        assert!(e.to_string().contains("level 3"), "{e}");
    }
}
