//! Exact checker for the graded-graph inequality
//! `1 - P(B; G) ≥ (1 - μ^n(B))^{K(G)}`.
//!
//! The checker only evaluates both sides; it never claims the inequality in
//! general.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use super::boxes::{BoxUnion, Grid, Rational};
use super::prob::ExactProb;
use super::psi::pow_rational;
use crate::error::{Error, Result};
use crate::tree::GradedGraph;

/// Cap on enumerated cell assignments of the non-bottom levels.
pub const DEFAULT_ASSIGNMENT_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    /// `1 - P(B; G)`.
    pub lhs: ExactProb,
    /// `(1 - μ^n(B))^{K(G)}`.
    pub rhs: ExactProb,
    pub full_paths: u128,
    pub holds: bool,
}

/// `P(B; G)`: probability that some oriented path through every level of `G`
/// has its label vector in `B`, labels i.i.d. uniform on `[0,1]`.
///
/// Enumerates grid-cell assignments of levels `1..n-1`; given those, the
/// bottom-level vertices are independent and are integrated in closed form.
/// Widths are scaled to integers per coordinate so the sum stays in `BigUint`.
pub fn some_path_prob_graded(g: &GradedGraph, set: &BoxUnion) -> Result<ExactProb> {
    let n = g.height();
    if n == 0 || n != set.dim() {
        return Err(Error::contract(format!(
            "graph height {n} does not match set dimension {}",
            set.dim()
        )));
    }
    let grid = set.grid()?;
    let scaled = ScaledWidths::new(&grid);

    let upper: Vec<usize> = (1..n).flat_map(|lvl| g.level_vertices(lvl)).collect();
    let mut count: u128 = 1;
    for &v in &upper {
        count = count.saturating_mul(grid.shape()[g.level(v) - 1] as u128);
    }
    if count > DEFAULT_ASSIGNMENT_CAP {
        return Err(Error::cap("cell assignments", count, DEFAULT_ASSIGNMENT_CAP));
    }

    let bottom: Vec<usize> = g.level_vertices(n).collect();
    let last = n - 1;
    let mut cells = vec![0usize; g.vertex_count()];
    // Prefix block offsets reaching each vertex.
    let mut reach: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for v in 0..g.vertex_count() {
        for &s in g.successors(v) {
            preds[s].push(v);
        }
    }

    let mut total_none = BigUint::zero();
    loop {
        // Offsets of cell-prefixes along paths ending at each upper vertex.
        let mut weight = BigUint::one();
        for &v in &upper {
            let lvl = g.level(v) - 1;
            let c = cells[v];
            weight *= &scaled.widths[lvl][c];
            let step = c * grid.strides()[lvl];
            let mut r: Vec<usize> = if lvl == 0 {
                vec![step]
            } else {
                preds[v]
                    .iter()
                    .flat_map(|&u| reach[u].iter().map(move |&o| o + step))
                    .collect()
            };
            r.sort_unstable();
            r.dedup();
            reach[v] = r;
        }
        let mut factor = BigUint::one();
        for &v in &bottom {
            let prefixes: Vec<usize> = if last == 0 {
                vec![0]
            } else {
                let mut p: Vec<usize> = preds[v].iter().flat_map(|&u| reach[u].iter().copied()).collect();
                p.sort_unstable();
                p.dedup();
                p
            };
            let mut ok = BigUint::zero();
            for (j, w) in scaled.widths[last].iter().enumerate() {
                if prefixes.iter().all(|&o| !grid.inside(o + j)) {
                    ok += w;
                }
            }
            factor *= ok;
            if factor.is_zero() {
                break;
            }
        }
        total_none += weight * factor;

        if !advance(&mut cells, &upper, |v| grid.shape()[g.level(v) - 1]) {
            break;
        }
    }

    let mut denom = BigUint::one();
    for v in 0..g.vertex_count() {
        denom *= &scaled.denominators[g.level(v) - 1];
    }
    let none = Rational::new(BigInt::from(total_none), BigInt::from(denom));
    Ok(ExactProb::new(Rational::one() - none))
}

fn advance(cells: &mut [usize], order: &[usize], radix: impl Fn(usize) -> usize) -> bool {
    for &v in order.iter().rev() {
        cells[v] += 1;
        if cells[v] < radix(v) {
            return true;
        }
        cells[v] = 0;
    }
    false
}

struct ScaledWidths {
    widths: Vec<Vec<BigUint>>,
    denominators: Vec<BigUint>,
}

impl ScaledWidths {
    fn new(grid: &Grid) -> Self {
        let mut widths = Vec::new();
        let mut denominators = Vec::new();
        for k in 0..grid.dim() {
            let l = grid.common_denominator(k);
            let ws = grid
                .widths(k)
                .iter()
                .map(|w| {
                    let scaled = w * Rational::from_integer(l.clone());
                    debug_assert!(scaled.is_integer());
                    scaled.to_integer().to_biguint().expect("widths are nonnegative")
                })
                .collect();
            widths.push(ws);
            denominators.push(l.to_biguint().expect("positive"));
        }
        ScaledWidths { widths, denominators }
    }
}

/// Evaluates both sides of the graded-graph inequality exactly.
pub fn conjecture_scan(g: &GradedGraph, set: &BoxUnion) -> Result<ConjectureReport> {
    let k = g.count_full_paths();
    let p = some_path_prob_graded(g, set)?;
    let mu = set.measure()?;
    let k_exp = k
        .to_u64()
        .ok_or_else(|| Error::cap("full path count", k, u64::MAX as u128))?;
    let rhs = ExactProb::new(pow_rational(Rational::one() - mu, k_exp));
    let lhs = p.complement();
    let holds = lhs >= rhs;
    Ok(ConjectureReport {
        lhs,
        rhs,
        full_paths: k,
        holds,
    })
}

/// Random graded graph with `levels` levels and at most `max_vertices`
/// vertices (at least one per level); each admissible edge is present with
/// probability `edge_p`.
pub fn random_graded_graph<R: Rng + ?Sized>(rng: &mut R, levels: usize, max_vertices: usize, edge_p: f64) -> GradedGraph {
    assert!(levels >= 1 && max_vertices >= levels);
    let mut sizes = vec![1usize; levels];
    let extra = rng.random_range(0..=max_vertices - levels);
    for _ in 0..extra {
        let i = rng.random_range(0..levels);
        sizes[i] += 1;
    }
    let mut starts = vec![0usize];
    for s in &sizes {
        starts.push(starts.last().unwrap() + s);
    }
    let mut edges = Vec::new();
    for l in 0..levels.saturating_sub(1) {
        for a in starts[l]..starts[l + 1] {
            for b in starts[l + 1]..starts[l + 2] {
                if rng.random_bool(edge_p) {
                    edges.push((a, b));
                }
            }
        }
    }
    GradedGraph::new(sizes, &edges).expect("edges join consecutive levels")
}
