//! Seeded instance generators. All randomness comes from a ChaCha stream so
//! outputs are identical across platforms for the same seed.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::CnfInstance;
use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, Role};
use crate::ov::{BitVector, OvInstance};
use crate::td::TreeDecomposition;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random OV instance with `n` vectors per side. With `plant`, one
/// uniformly chosen B-vector is zeroed on the support of one uniformly chosen
/// A-vector, which guarantees an orthogonal pair without changing `n` or `d`.
pub fn gen_ov(n: usize, d: usize, plant: bool, seed: u64) -> Result<OvInstance> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidInstance("gen_ov needs n, d >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let random_vec = |rng: &mut ChaCha8Rng| BitVector::new((0..d).map(|_| rng.random::<bool>()).collect());
    let set_a: Vec<BitVector> = (0..n).map(|_| random_vec(&mut rng)).collect();
    let mut set_b: Vec<BitVector> = (0..n).map(|_| random_vec(&mut rng)).collect();
    if plant {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        for c in 0..d {
            if set_a[i].get(c) {
                set_b[j].set(c, false);
            }
        }
    }
    OvInstance::new(d, set_a, set_b)
}

/// Random partial `k`-tree on `n` vertices with its width-`k` decomposition.
///
/// Vertices `0..=k` start as a clique; every later vertex attaches to a
/// uniformly chosen existing `k`-clique and gets a bag holding that clique and
/// itself. A spanning skeleton (a path through the first clique plus one edge
/// per attached vertex) is always kept; every other edge survives with
/// probability `keep_prob`.
pub fn gen_partial_ktree(
    n: usize,
    k: usize,
    keep_prob: f64,
    seed: u64,
) -> Result<(LabeledGraph, TreeDecomposition)> {
    if k == 0 || n < k + 1 {
        return Err(Error::InvalidInstance(format!(
            "partial k-tree needs k >= 1 and n >= k + 1 (n = {n}, k = {k})"
        )));
    }
    if !(0.0..=1.0).contains(&keep_prob) {
        return Err(Error::InvalidInstance(format!("keep probability {keep_prob} outside [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    let root: Vec<usize> = (0..=k).collect();
    let mut bags = vec![root.clone()];
    let mut tree_edges = Vec::new();
    let mut cliques: Vec<(Vec<usize>, usize)> = (0..=k)
        .map(|skip| (root.iter().copied().filter(|&u| u != skip).collect(), 0))
        .collect();

    // (u, v, skeleton)
    let mut edges: Vec<(usize, usize, bool)> = Vec::new();
    for u in 0..=k {
        for v in u + 1..=k {
            edges.push((u, v, v == u + 1));
        }
    }
    for v in k + 1..n {
        let (clique, parent) = cliques[rng.random_range(0..cliques.len())].clone();
        let anchor = clique[rng.random_range(0..clique.len())];
        for &u in &clique {
            edges.push((u, v, u == anchor));
        }
        let bag_id = bags.len();
        let mut bag = clique.clone();
        bag.push(v);
        bags.push(bag);
        tree_edges.push((parent, bag_id));
        for &drop in &clique {
            let mut next: Vec<usize> = clique.iter().copied().filter(|&u| u != drop).collect();
            next.push(v);
            cliques.push((next, bag_id));
        }
    }
    let kept: Vec<(usize, usize)> = edges
        .into_iter()
        .filter(|&(_, _, skeleton)| skeleton || rng.random_bool(keep_prob))
        .map(|(u, v, _)| (u, v))
        .collect();
    let graph = LabeledGraph::new(n, kept.into_iter().map(|(u, v)| (u, v, 1)), vec![Role::Plain; n])?;
    Ok((graph, TreeDecomposition::new(bags, tree_edges)))
}

/// Random `k`-CNF: every clause uses `min(k, n)` distinct variables with
/// independent random signs.
pub fn gen_kcnf(num_vars: usize, num_clauses: usize, k: usize, seed: u64) -> Result<CnfInstance> {
    let mut rng = rng_from_seed(seed);
    let width = k.min(num_vars).max(1);
    let clauses = (0..num_clauses)
        .map(|_| {
            let vars: BTreeSet<usize> = index::sample(&mut rng, num_vars, width).into_iter().collect();
            vars.into_iter()
                .map(|v| {
                    let lit = v as i32 + 1;
                    if rng.random::<bool>() {
                        lit
                    } else {
                        -lit
                    }
                })
                .collect()
        })
        .collect();
    CnfInstance::new(num_vars, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ov::ov_brute;
    use crate::td::validate_td;

    #[test]
    fn gen_ov_is_deterministic() {
        assert_eq!(gen_ov(20, 5, true, 9).unwrap(), gen_ov(20, 5, true, 9).unwrap());
        assert_ne!(gen_ov(20, 5, true, 9).unwrap(), gen_ov(20, 5, true, 10).unwrap());
    }

    #[test]
    fn planting_forces_orthogonal_pair() {
        for seed in 0..50 {
            let inst = gen_ov(30, 12, true, seed).unwrap();
            assert_eq!(inst.n_a(), 30);
            assert_eq!(inst.dim(), 12);
            assert!(ov_brute(&inst).is_some(), "seed {seed}");
        }
    }

    #[test]
    fn ktree_with_k1_full_keep_is_a_tree() {
        let (g, td) = gen_partial_ktree(25, 1, 1.0, 4).unwrap();
        assert_eq!(g.edge_count(), 24);
        assert!(g.is_connected());
        let r = validate_td(&g, &td);
        assert!(r.is_valid(), "{r}");
        assert_eq!(r.width, 1);
    }

    #[test]
    fn ktree_outputs_validate() {
        for seed in 0..40 {
            let k = 1 + (seed as usize % 4);
            let (g, td) = gen_partial_ktree(30 + seed as usize, k, 0.3, seed).unwrap();
            let r = validate_td(&g, &td);
            assert!(r.is_valid(), "seed {seed}: {r}");
            assert!(r.width <= k);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn ktree_rejects_small_n() {
        assert!(gen_partial_ktree(3, 3, 0.5, 0).is_err());
        assert!(gen_partial_ktree(4, 0, 0.5, 0).is_err());
    }

    #[test]
    fn kcnf_shape() {
        let cnf = gen_kcnf(12, 40, 3, 3).unwrap();
        assert_eq!(cnf.num_clauses(), 40);
        assert!(cnf.clauses().iter().all(|c| c.len() == 3));
        assert_eq!(gen_kcnf(2, 5, 3, 1).unwrap().clauses()[0].len(), 2);
    }
}
