//! Exact diameter by separator recursion over a tree decomposition.
//!
//! Each recursion node holds a graph `H` whose distances between its own
//! vertices equal those of the input graph, plus a decomposition of `H` in
//! which a portal set is present in every bag. The centroid bag `S`
//! separates `H`; pairs touching `S` are read off single-source searches,
//! pairs in different components of `H - S` go through [`cross_pair_max`],
//! and each component `C` recurses on `H[C ∪ S]` with `S` turned into a
//! clique weighted by true distances.

use std::borrow::Cow;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::centroid::centroid_bag;
use super::cross::{cross_pair_max, CrossConfig, CrossMethod};
use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, Role};
use crate::paths::shortest_paths;
use crate::td::{validate_td, TreeDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub cross: CrossConfig,
    /// Graphs with at most `max(2·(width+1), base_min)` vertices are solved
    /// by all-sources search.
    pub base_min: usize,
    /// Recurse into sibling components on the rayon pool.
    pub parallel: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            cross: CrossConfig::default(),
            base_min: 16,
            parallel: true,
        }
    }
}

/// Counters gathered over one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub nodes: usize,
    pub base_cases: usize,
    pub max_depth: usize,
    /// Separator size to number of recursion nodes that used it.
    pub separator_sizes: BTreeMap<usize, usize>,
    pub cross_calls: usize,
    pub dominance_calls: usize,
    pub small_fallbacks: usize,
    pub dim_cap_fallbacks: usize,
}

impl EngineStats {
    fn absorb(&mut self, other: EngineStats) {
        self.nodes += other.nodes;
        self.base_cases += other.base_cases;
        self.max_depth = self.max_depth.max(other.max_depth);
        for (k, v) in other.separator_sizes {
            *self.separator_sizes.entry(k).or_default() += v;
        }
        self.cross_calls += other.cross_calls;
        self.dominance_calls += other.dominance_calls;
        self.small_fallbacks += other.small_fallbacks;
        self.dim_cap_fallbacks += other.dim_cap_fallbacks;
    }

    fn record(&mut self, method: CrossMethod) {
        self.cross_calls += 1;
        match method {
            CrossMethod::Empty => {}
            CrossMethod::SmallNaive => self.small_fallbacks += 1,
            CrossMethod::DimCapNaive => self.dim_cap_fallbacks += 1,
            CrossMethod::Dominance => self.dominance_calls += 1,
        }
    }
}

/// What an observer sees at each recursion node.
pub struct NodeView<'a> {
    pub depth: usize,
    pub graph: &'a LabeledGraph,
    /// Input-graph vertex of each local vertex.
    pub global: &'a [usize],
    /// Local ids of the portals.
    pub portals: &'a [usize],
}

pub type Observer<'a> = &'a (dyn Fn(&NodeView<'_>) + Sync);

/// Exact diameter of a connected graph given a valid tree decomposition.
pub fn diameter_td(graph: &LabeledGraph, td: &TreeDecomposition) -> Result<u64> {
    diameter_td_with(graph, td, &EngineConfig::default()).map(|(d, _)| d)
}

pub fn diameter_td_with(graph: &LabeledGraph, td: &TreeDecomposition, config: &EngineConfig) -> Result<(u64, EngineStats)> {
    run(graph, td, config, None)
}

/// Like [`diameter_td_with`], calling `observer` on every recursion node.
pub fn diameter_td_observed(
    graph: &LabeledGraph,
    td: &TreeDecomposition,
    config: &EngineConfig,
    observer: Observer<'_>,
) -> Result<(u64, EngineStats)> {
    run(graph, td, config, Some(observer))
}

fn run(graph: &LabeledGraph, td: &TreeDecomposition, config: &EngineConfig, observer: Option<Observer<'_>>) -> Result<(u64, EngineStats)> {
    if graph.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let report = validate_td(graph, td);
    if !report.is_valid() {
        return Err(Error::InvalidDecomposition(Box::new(report)));
    }
    if !graph.is_connected() {
        return Err(Error::InfiniteDiameter);
    }
    let root = Node {
        graph: Cow::Borrowed(graph),
        td: Cow::Borrowed(td),
        global: (0..graph.vertex_count()).collect(),
        portals: 0,
    };
    Ok(solve(root, 0, config, observer))
}

struct Node<'a> {
    graph: Cow<'a, LabeledGraph>,
    td: Cow<'a, TreeDecomposition>,
    global: Vec<usize>,
    /// Local ids `0..portals` are the portals.
    portals: usize,
}

fn solve(node: Node<'_>, depth: usize, config: &EngineConfig, observer: Option<Observer<'_>>) -> (u64, EngineStats) {
    let mut stats = EngineStats {
        nodes: 1,
        max_depth: depth,
        ..EngineStats::default()
    };
    let graph = node.graph.as_ref();
    let td = node.td.as_ref();
    if let Some(obs) = observer {
        let portals: Vec<usize> = (0..node.portals).collect();
        obs(&NodeView {
            depth,
            graph,
            global: &node.global,
            portals: &portals,
        });
    }

    let n = graph.vertex_count();
    let all_sources = |stats: &mut EngineStats| {
        stats.base_cases += 1;
        let all: Vec<usize> = (0..n).collect();
        shortest_paths(graph, &all).max().unwrap_or(0)
    };
    if n <= (2 * (td.width() + 1)).max(config.base_min) {
        return (all_sources(&mut stats), stats);
    }

    let active: Vec<usize> = (0..td.bag_count()).collect();
    let center = centroid_bag(td, &active).expect("decomposition has bags");
    let mut sep: Vec<usize> = (0..node.portals).chain(td.bag(center).iter().copied()).collect();
    sep.sort_unstable();
    sep.dedup();
    if sep.len() == node.portals {
        // The bag adds nothing beyond the portals, so it separates nothing new.
        return (all_sources(&mut stats), stats);
    }
    *stats.separator_sizes.entry(sep.len()).or_default() += 1;

    let table = shortest_paths(graph, &sep);
    let mut best = table.max().unwrap_or(0);

    let mut in_sep = vec![false; n];
    for &s in &sep {
        in_sep[s] = true;
    }
    let (comp_of, comps) = components(graph, &in_sep);
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|v| if in_sep[v] { Vec::new() } else { (0..sep.len()).map(|i| table.distance(i, v)).collect() })
        .collect();
    best = best.max(cross_halves(&comps, &rows, config, &mut stats));

    let children = build_children(&node, &sep, &table, &comp_of, &comps);
    let results: Vec<(u64, EngineStats)> = if config.parallel && children.len() > 1 {
        children.into_par_iter().map(|c| solve(c, depth + 1, config, observer)).collect()
    } else {
        children.into_iter().map(|c| solve(c, depth + 1, config, observer)).collect()
    };
    for (d, s) in results {
        best = best.max(d);
        stats.absorb(s);
    }
    (best, stats)
}

/// Connected components of `graph` minus the marked vertices.
fn components(graph: &LabeledGraph, removed: &[bool]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = graph.vertex_count();
    let mut comp_of = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if removed[start] || comp_of[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        comp_of[start] = id;
        let mut i = 0;
        while i < members.len() {
            let u = members[i];
            i += 1;
            for &(v, _) in graph.neighbors(u) {
                if !removed[v] && comp_of[v] == usize::MAX {
                    comp_of[v] = id;
                    members.push(v);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    (comp_of, comps)
}

/// Max over pairs in distinct components: pairs across the two halves of
/// the component list, then each half on its own.
fn cross_halves(comps: &[Vec<usize>], rows: &[Vec<u64>], config: &EngineConfig, stats: &mut EngineStats) -> u64 {
    if comps.len() < 2 {
        return 0;
    }
    let mid = comps.len() / 2;
    let side = |part: &[Vec<usize>]| -> Vec<&[u64]> { part.iter().flatten().map(|&v| rows[v].as_slice()).collect() };
    let out = cross_pair_max(&side(&comps[..mid]), &side(&comps[mid..]), config.cross);
    stats.record(out.method);
    out.value
        .max(cross_halves(&comps[..mid], rows, config, stats))
        .max(cross_halves(&comps[mid..], rows, config, stats))
}

/// Subproblems for components with at least two vertices. Singletons need
/// none: their pairs with `S` and with other components are already done.
fn build_children<'a>(
    node: &Node<'_>,
    sep: &[usize],
    table: &crate::paths::DistanceTable,
    comp_of: &[usize],
    comps: &[Vec<usize>],
) -> Vec<Node<'a>> {
    let graph = node.graph.as_ref();
    let td = node.td.as_ref();
    let n = graph.vertex_count();
    let mut bags_of = vec![Vec::new(); n];
    for (b, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            bags_of[v].push(b);
        }
    }
    let bag_adj = td.bag_adjacency();
    let k = sep.len();
    let mut local = vec![usize::MAX; n];
    let mut bag_local = vec![usize::MAX; td.bag_count()];
    let mut clique = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for (i, &s) in sep.iter().enumerate() {
        local[s] = i;
        for (j, &t) in sep.iter().enumerate().skip(i + 1) {
            clique.push((i, j, table.distance(i, t)));
        }
    }

    let mut children = Vec::new();
    for (id, comp) in comps.iter().enumerate() {
        if comp.len() < 2 {
            continue;
        }
        for (i, &v) in comp.iter().enumerate() {
            local[v] = k + i;
        }
        let mut edges = clique.clone();
        for &v in comp {
            for &(w, weight) in graph.neighbors(v) {
                if local[w] != usize::MAX && (comp_of[w] != id || v < w) {
                    edges.push((local[v], local[w], weight));
                }
            }
        }
        let size = k + comp.len();
        let sub = LabeledGraph::new(size, edges, vec![Role::Plain; size]).expect("subgraph of a valid graph");

        let mut chosen = Vec::new();
        for &v in comp {
            for &b in &bags_of[v] {
                if bag_local[b] == usize::MAX {
                    bag_local[b] = chosen.len();
                    chosen.push(b);
                }
            }
        }
        let bags = chosen
            .iter()
            .map(|&b| {
                (0..k)
                    .chain(td.bag(b).iter().filter(|&&x| comp_of[x] == id).map(|&x| local[x]))
                    .collect()
            })
            .collect();
        let mut tree = Vec::new();
        for &b in &chosen {
            for &c in &bag_adj[b] {
                if b < c && bag_local[c] != usize::MAX {
                    tree.push((bag_local[b], bag_local[c]));
                }
            }
        }
        for &b in &chosen {
            bag_local[b] = usize::MAX;
        }
        for &v in comp {
            local[v] = usize::MAX;
        }

        let global = sep.iter().chain(comp).map(|&v| node.global[v]).collect();
        children.push(Node {
            graph: Cow::Owned(sub),
            td: Cow::Owned(TreeDecomposition::new(bags, tree)),
            global,
            portals: k,
        });
    }
    children
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_partial_ktree;
    use crate::ov::OvInstance;
    use crate::paths::diameter_brute;
    use crate::reductions::{ov_graph_decomposition, ov_to_diameter};

    fn small_base() -> EngineConfig {
        EngineConfig {
            base_min: 0,
            ..EngineConfig::default()
        }
    }

    #[test]
    fn path_of_four() {
        let g = LabeledGraph::unweighted(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2], vec![2, 3]], vec![(0, 1), (1, 2)]);
        assert_eq!(diameter_td(&g, &td).unwrap(), 3);
        assert_eq!(diameter_td_with(&g, &td, &small_base()).unwrap().0, 3);
    }

    #[test]
    fn ov_graph_with_orthogonal_pair() {
        let inst = OvInstance::from_strs(&["10"], &["01"]).unwrap();
        let (g, _) = ov_to_diameter(&inst);
        let td = ov_graph_decomposition(&inst);
        assert_eq!(diameter_td_with(&g, &td, &small_base()).unwrap().0, 3);
    }

    #[test]
    fn long_path_recurses() {
        let n = 200;
        let g = LabeledGraph::unweighted(n, (1..n).map(|i| (i - 1, i))).unwrap();
        let td = TreeDecomposition::new((1..n).map(|i| vec![i - 1, i]).collect(), (1..n - 1).map(|i| (i - 1, i)).collect());
        let (d, stats) = diameter_td_with(&g, &td, &EngineConfig::default()).unwrap();
        assert_eq!(d, (n - 1) as u64);
        assert!(stats.nodes > 1);
        assert!(stats.max_depth >= 3);
    }

    #[test]
    fn refusals() {
        let g = LabeledGraph::unweighted(3, [(0, 1)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![2]], vec![(0, 1)]);
        assert!(matches!(diameter_td(&g, &td), Err(Error::InfiniteDiameter)));
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![]);
        assert!(matches!(diameter_td(&g, &td), Err(Error::InvalidDecomposition(_))));
        let empty = LabeledGraph::unweighted(0, []).unwrap();
        assert!(matches!(diameter_td(&empty, &TreeDecomposition::new(vec![vec![]], vec![])), Err(Error::EmptyGraph)));
    }

    #[test]
    fn partial_ktrees_match_brute() {
        for seed in 0..60 {
            let (g, td) = gen_partial_ktree(20 + seed as usize * 2, 1 + seed as usize % 4, 0.5, seed).unwrap();
            let want = diameter_brute(&g).unwrap();
            for config in [EngineConfig::default(), small_base()] {
                assert_eq!(diameter_td_with(&g, &td, &config).unwrap().0, want, "seed {seed}");
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let (g, td) = gen_partial_ktree(120, 3, 0.6, 4).unwrap();
        let seq = EngineConfig {
            parallel: false,
            ..small_base()
        };
        assert_eq!(diameter_td_with(&g, &td, &seq).unwrap(), diameter_td_with(&g, &td, &small_base()).unwrap());
    }

    #[test]
    fn portal_exactness() {
        use std::sync::Mutex;
        let (g, td) = gen_partial_ktree(60, 2, 0.7, 13).unwrap();
        let full = shortest_paths(&g, &(0..g.vertex_count()).collect::<Vec<_>>());
        let checked = Mutex::new(0usize);
        let observer = |view: &NodeView<'_>| {
            if view.depth > 3 {
                return;
            }
            let local = shortest_paths(view.graph, &(0..view.graph.vertex_count()).collect::<Vec<_>>());
            for (a, &ga) in view.global.iter().enumerate() {
                for (b, &gb) in view.global.iter().enumerate() {
                    assert_eq!(local.distance(a, b), full.distance(ga, gb), "depth {}", view.depth);
                }
            }
            *checked.lock().unwrap() += 1;
        };
        diameter_td_observed(&g, &td, &small_base(), &observer).unwrap();
        assert!(*checked.lock().unwrap() > 3);
    }
}
