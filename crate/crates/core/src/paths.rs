//! Exact shortest paths and the all-pairs diameter oracle.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

/// Distance to an unreachable vertex.
pub const INF: u64 = u64::MAX;

// Below this much work (sources × vertices) the rayon fan-out costs more than it saves.
const PARALLEL_WORK: usize = 1 << 16;

/// `distance(i, v)` is the distance from `sources()[i]` to `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceTable {
    sources: Vec<usize>,
    rows: Vec<Vec<u64>>,
}

impl DistanceTable {
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn distance(&self, i: usize, v: usize) -> u64 {
        self.rows[i][v]
    }

    /// Largest entry, `INF` if any pair is unreachable, `None` if empty.
    pub fn max(&self) -> Option<u64> {
        self.rows.iter().flatten().copied().max()
    }
}

/// Distances from every source. Unit-weight graphs use breadth-first search,
/// weighted graphs Dijkstra; rows are computed in parallel for large inputs
/// and always returned in source order.
pub fn shortest_paths(graph: &LabeledGraph, sources: &[usize]) -> DistanceTable {
    let work = sources.len().saturating_mul(graph.vertex_count() + graph.edge_count());
    let rows = if sources.len() > 1 && work >= PARALLEL_WORK {
        sources.par_iter().map(|&s| single_source(graph, s)).collect()
    } else {
        sources.iter().map(|&s| single_source(graph, s)).collect()
    };
    DistanceTable {
        sources: sources.to_vec(),
        rows,
    }
}

pub fn single_source(graph: &LabeledGraph, source: usize) -> Vec<u64> {
    if graph.is_unit_weight() {
        bfs(graph, source)
    } else {
        dijkstra(graph, source)
    }
}

fn bfs(graph: &LabeledGraph, source: usize) -> Vec<u64> {
    let mut dist = vec![INF; graph.vertex_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &(v, _) in graph.neighbors(u) {
            if dist[v] == INF {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn dijkstra(graph: &LabeledGraph, source: usize) -> Vec<u64> {
    let mut dist = vec![INF; graph.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in graph.neighbors(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Exact diameter from all-sources shortest paths.
pub fn diameter_brute(graph: &LabeledGraph) -> Result<u64> {
    if graph.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let all: Vec<usize> = (0..graph.vertex_count()).collect();
    match shortest_paths(graph, &all).max() {
        Some(INF) => Err(Error::InfiniteDiameter),
        Some(d) => Ok(d),
        None => Err(Error::EmptyGraph),
    }
}
