use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::boxes::{rat, AxisBox, BoxUnion, Rational};
use super::phi::phi_tree_exact;
use super::prob::ExactProb;
use crate::error::{Error, Result};
use crate::tree::{GrowthFunction, Partition, RootedTree};

/// Spherical comparison: the tree with growth `f` dominates the one with
/// growth `g` iff `f(1)⋯f(n) ≥ g(1)⋯g(n)` for every `n ≤ horizon`.
pub fn dominates_spherical(f: &GrowthFunction, g: &GrowthFunction, horizon: usize) -> Result<bool> {
    let a = f.generation_sizes(horizon)?;
    let b = g.generation_sizes(horizon)?;
    Ok(a.iter().zip(&b).all(|(x, y)| x >= y))
}

/// Generation-size criterion for a spherically symmetric `sphere` against an
/// arbitrary tree, through the height of `other`.
pub fn sphere_dominates_tree(sphere: &GrowthFunction, other: &RootedTree) -> Result<bool> {
    let sizes = sphere.generation_sizes(other.height())?;
    Ok(sizes
        .iter()
        .zip(other.generation_sizes())
        .all(|(a, b)| a >= &num_bigint::BigUint::from(b)))
}

/// Smallest `k ≥ 0` at which the tail-sum condition
/// `Σ_{i>k} p_i ≥ Σ_{i>k} q_i` fails, after padding both with zeros.
pub fn young_violation(p: &Partition, q: &Partition) -> Option<usize> {
    let len = p.len().max(q.len());
    let (p, q) = (p.padded(len), q.padded(len));
    let mut tp: u64 = p.iter().sum();
    let mut tq: u64 = q.iter().sum();
    for k in 0..=len {
        if tp < tq {
            return Some(k);
        }
        if k < len {
            tp -= p[k];
            tq -= q[k];
        }
    }
    None
}

/// Height-2 domination: the tree with children counts `p` dominates the one
/// with counts `q` iff every tail sum of `p` is at least that of `q`.
pub fn dominates_height2(p: &Partition, q: &Partition) -> bool {
    young_violation(p, q).is_none()
}

/// The three-dimensional set that separates the figure-1 trees:
/// `([0,1/2]×[0,1]×[0,2/3]) ∪ ([1/2,1]×[0,1/2]×[0,1])`.
pub fn counterexample_d() -> BoxUnion {
    BoxUnion::new(
        3,
        vec![
            AxisBox::new(vec![rat(0, 1), rat(0, 1), rat(0, 1)], vec![rat(1, 2), rat(1, 1), rat(2, 3)]).unwrap(),
            AxisBox::new(vec![rat(1, 2), rat(0, 1), rat(0, 1)], vec![rat(1, 1), rat(1, 2), rat(1, 1)]).unwrap(),
        ],
    )
    .expect("dimensions agree")
}

/// `D_ε = ([0,ε^r]×[0,1]) ∪ ([0,1]×[0,ε])`.
pub fn witness_set_height2(r: u32, eps: &Rational) -> Result<BoxUnion> {
    if r == 0 {
        return Err(Error::contract("r must be a positive integer"));
    }
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::contract(format!("ε must lie in (0,1), got {eps}")));
    }
    let er = num_traits::pow(eps.clone(), r as usize);
    BoxUnion::new(
        2,
        vec![
            AxisBox::new(vec![Rational::zero(), Rational::zero()], vec![er, Rational::one()])?,
            AxisBox::new(vec![Rational::zero(), Rational::zero()], vec![Rational::one(), eps.clone()])?,
        ],
    )
}

/// Height-2 tree with the positive parts of `p` as children counts.
pub fn height2_tree(p: &Partition) -> Result<RootedTree> {
    let parts = p.positive();
    if parts.is_empty() {
        return Err(Error::contract("partition has no positive part; the tree has no level-2 paths"));
    }
    Ok(RootedTree::height_two(&parts))
}

/// A set on which the tree for `p` has strictly larger all-paths probability
/// than the tree for `q`, witnessing that `p` does not dominate `q`.
#[derive(Debug, Clone)]
pub struct ReversalWitness {
    /// Index `k` at which the tail-sum condition fails.
    pub k: usize,
    pub r: u32,
    /// `ε = 2^{-j}`.
    pub j: u32,
    pub set: BoxUnion,
    pub phi_p: ExactProb,
    pub phi_q: ExactProb,
}

/// When the tail-sum condition fails at `k`, searches `ε = 2^{-1}, …,
/// 2^{-max_j}` for a `D_ε` with `r = q_k` (or `q_1` when `k = 0`) on which
/// `φ(Γ_p; D_ε) > φ(Γ_q; D_ε)`.
pub fn height2_reversal(p: &Partition, q: &Partition, max_j: u32) -> Result<Option<ReversalWitness>> {
    let Some(k) = young_violation(p, q) else {
        return Ok(None);
    };
    let len = p.len().max(q.len());
    let qp = q.padded(len);
    let r = qp[k.max(1) - 1] as u32;
    if r == 0 {
        return Err(Error::contract("violation index selects a zero part"));
    }
    let tp = height2_tree(p)?;
    let tq = height2_tree(q)?;
    for j in 1..=max_j {
        let eps = Rational::new(BigInt::one(), BigInt::from(2).pow(j));
        let set = witness_set_height2(r, &eps)?;
        let phi_p = phi_tree_exact(&tp, &set)?;
        let phi_q = phi_tree_exact(&tq, &set)?;
        if phi_p > phi_q {
            return Ok(Some(ReversalWitness {
                k,
                r,
                j,
                set,
                phi_p,
                phi_q,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(v: &[u64]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn spherical_examples() {
        let t = |v: &[u64]| GrowthFunction::table(v.to_vec()).unwrap();
        assert!(dominates_spherical(&t(&[2, 2]), &t(&[1, 2]), 2).unwrap());
        assert!(!dominates_spherical(&t(&[1, 4]), &t(&[2, 2]), 2).unwrap());
        assert!(dominates_spherical(&t(&[3, 1, 2]), &t(&[3, 1, 2]), 3).unwrap());
    }

    #[test]
    fn young_examples() {
        assert!(dominates_height2(&part(&[2, 2]), &part(&[3, 1])));
        assert!(!dominates_height2(&part(&[3, 1]), &part(&[2, 2])));
        assert_eq!(young_violation(&part(&[3, 1]), &part(&[2, 2])), Some(1));
        assert!(dominates_height2(&part(&[2, 1, 1]), &part(&[2, 1, 1])));
        // Totals compared at k = 0.
        assert_eq!(young_violation(&part(&[1]), &part(&[1, 1])), Some(0));
        // Padding with zeros.
        assert!(dominates_height2(&part(&[1, 1, 1]), &part(&[3])));
    }

    #[test]
    fn counterexample_shape() {
        let d = counterexample_d();
        assert_eq!(d.measure().unwrap(), rat(7, 12));
        let s = d.section(&[rat(1, 4)]).unwrap();
        assert_eq!(s.boxes(), &[AxisBox::new(vec![rat(0, 1), rat(0, 1)], vec![rat(1, 1), rat(2, 3)]).unwrap()]);
        let s = d.section(&[rat(3, 4)]).unwrap();
        assert_eq!(s.boxes(), &[AxisBox::new(vec![rat(0, 1), rat(0, 1)], vec![rat(1, 2), rat(1, 1)]).unwrap()]);
    }

    #[test]
    fn witness_sets() {
        let d = witness_set_height2(1, &rat(1, 2)).unwrap();
        assert_eq!(d.measure().unwrap(), rat(3, 4));
        let d = witness_set_height2(2, &rat(1, 2)).unwrap();
        assert_eq!(d.boxes()[0].hi(), &[rat(1, 4), rat(1, 1)]);
        assert!(witness_set_height2(1, &rat(0, 1)).is_err());
        assert!(witness_set_height2(1, &rat(1, 1)).is_err());
    }

    #[test]
    fn reversal_for_failed_condition() {
        let w = height2_reversal(&part(&[3, 1]), &part(&[2, 2]), 10).unwrap().unwrap();
        assert!(w.phi_p > w.phi_q);
        assert_eq!(w.r, 2);
        assert!(height2_reversal(&part(&[2, 2]), &part(&[3, 1]), 10).unwrap().is_none());
    }

    #[test]
    fn sphere_against_tree() {
        let (g, h) = crate::tree::figure1_trees();
        let f = GrowthFunction::table(vec![2, 2, 2]).unwrap();
        assert!(sphere_dominates_tree(&f, &g).unwrap());
        let f = GrowthFunction::table(vec![1, 3, 1]).unwrap();
        assert!(!sphere_dominates_tree(&f, &h).unwrap());
    }
}
