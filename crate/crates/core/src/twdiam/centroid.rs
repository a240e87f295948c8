//! Centroid bag of a (sub)tree of a tree decomposition.

use crate::error::{Error, Result};
use crate::td::TreeDecomposition;

/// Bag whose removal leaves components of at most `⌈k/2⌉` of the `k`
/// active bags, preferring the smallest index among optimal choices.
/// `active` must induce a connected subtree.
pub fn centroid_bag(td: &TreeDecomposition, active: &[usize]) -> Result<usize> {
    let &first = active.first().ok_or(Error::NoActiveBags)?;
    let mut is_active = vec![false; td.bag_count()];
    for &b in active {
        is_active[b] = true;
    }
    let adj = td.bag_adjacency();
    let total = active.iter().filter(|&&b| is_active[b]).count();

    // Iterative DFS from `first`, then subtree sizes in reverse order.
    let mut parent = vec![usize::MAX; td.bag_count()];
    let mut order = Vec::with_capacity(total);
    let mut stack = vec![first];
    parent[first] = first;
    while let Some(b) = stack.pop() {
        order.push(b);
        for &c in &adj[b] {
            if is_active[c] && parent[c] == usize::MAX {
                parent[c] = b;
                stack.push(c);
            }
        }
    }
    let mut size = vec![1usize; td.bag_count()];
    let mut heaviest_child = vec![0usize; td.bag_count()];
    for &b in order.iter().rev() {
        if b != first {
            let p = parent[b];
            size[p] += size[b];
            heaviest_child[p] = heaviest_child[p].max(size[b]);
        }
    }
    let reached = order.len();
    order
        .iter()
        .map(|&b| (heaviest_child[b].max(reached - size[b]), b))
        .min()
        .map(|(_, b)| b)
        .ok_or(Error::NoActiveBags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::rng_from_seed;
    use rand::Rng;

    fn path(k: usize) -> TreeDecomposition {
        TreeDecomposition::new((0..k).map(|i| vec![i]).collect(), (1..k).map(|i| (i - 1, i)).collect())
    }

    /// Largest component left after removing `bag`, by explicit search.
    fn worst_component(td: &TreeDecomposition, bag: usize) -> usize {
        let adj = td.bag_adjacency();
        let mut seen = vec![false; td.bag_count()];
        seen[bag] = true;
        let mut worst = 0;
        for start in 0..td.bag_count() {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let mut count = 0;
            while let Some(b) = stack.pop() {
                count += 1;
                for &c in &adj[b] {
                    if !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
            worst = worst.max(count);
        }
        worst
    }

    #[test]
    fn path_of_three_picks_middle() {
        let td = path(3);
        assert_eq!(centroid_bag(&td, &[0, 1, 2]).unwrap(), 1);
    }

    #[test]
    fn single_bag() {
        let td = path(4);
        assert_eq!(centroid_bag(&td, &[2]).unwrap(), 2);
    }

    #[test]
    fn even_path_prefers_smaller_index() {
        assert_eq!(centroid_bag(&path(4), &[0, 1, 2, 3]).unwrap(), 1);
    }

    #[test]
    fn empty_active_set() {
        assert!(matches!(centroid_bag(&path(2), &[]), Err(Error::NoActiveBags)));
    }

    #[test]
    fn active_subtree_only() {
        let td = path(7);
        assert_eq!(centroid_bag(&td, &[4, 5, 6]).unwrap(), 5);
    }

    #[test]
    fn random_tree_matches_exhaustive_search() {
        let mut rng = rng_from_seed(5);
        let k = 31;
        let edges: Vec<(usize, usize)> = (1..k).map(|i| (rng.random_range(0..i), i)).collect();
        let td = TreeDecomposition::new((0..k).map(|i| vec![i]).collect(), edges);
        let all: Vec<usize> = (0..k).collect();
        let c = centroid_bag(&td, &all).unwrap();
        let best = (0..k).map(|b| worst_component(&td, b)).min().unwrap();
        let first_best = (0..k).find(|&b| worst_component(&td, b) == best).unwrap();
        assert_eq!(c, first_best);
        assert!(worst_component(&td, c) <= 16);
    }
}
