//! Tree decompositions, their validation, and the PACE `.td` format.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Bags are stored sorted and deduplicated. No validity check happens
    /// here; see [`validate_td`].
    pub fn new(bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, tree_edges }
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, i: usize) -> &[usize] {
        &self.bags[i]
    }

    pub fn bag_count(&self) -> usize {
        self.bags.len()
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    /// Adjacency lists of the bag tree. Out-of-range edges are skipped.
    pub fn bag_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            if a < self.bags.len() && b < self.bags.len() && a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }
}

/// A failed decomposition property together with its witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoBags,
    TreeEdgeOutOfRange { edge: (usize, usize) },
    TreeCycle { edge: (usize, usize) },
    TreeDisconnected { bags: usize, edges: usize },
    BagVertexOutOfRange { bag: usize, vertex: usize },
    UncoveredVertex(usize),
    UncoveredEdge(usize, usize),
    DisconnectedOccurrences { vertex: usize, bags: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoBags => f.write_str("decomposition has no bags"),
            Violation::TreeEdgeOutOfRange { edge } => {
                write!(f, "tree edge {edge:?} references a missing bag or is a loop")
            }
            Violation::TreeCycle { edge } => write!(f, "tree edge {edge:?} closes a cycle"),
            Violation::TreeDisconnected { bags, edges } => {
                write!(f, "{edges} tree edges cannot connect {bags} bags")
            }
            Violation::BagVertexOutOfRange { bag, vertex } => {
                write!(f, "bag {bag} contains unknown vertex {vertex}")
            }
            Violation::UncoveredVertex(v) => write!(f, "vertex {v} is in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge ({u}, {v}) is in no bag"),
            Violation::DisconnectedOccurrences { vertex, bags } => {
                write!(f, "bags {bags:?} containing vertex {vertex} are not connected")
            }
        }
    }
}

pub type Check = std::result::Result<(), Violation>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdReport {
    pub tree: Check,
    pub vertex_coverage: Check,
    pub edge_coverage: Check,
    pub connectivity: Check,
    pub width: usize,
}

impl TdReport {
    pub fn is_valid(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn failures(&self) -> impl Iterator<Item = (&'static str, &Violation)> {
        [
            ("tree", &self.tree),
            ("vertex coverage", &self.vertex_coverage),
            ("edge coverage", &self.edge_coverage),
            ("connectivity", &self.connectivity),
        ]
        .into_iter()
        .filter_map(|(name, c)| c.as_ref().err().map(|v| (name, v)))
    }
}

impl fmt::Display for TdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid, width {}", self.width);
        }
        let mut first = true;
        for (name, v) in self.failures() {
            if !first {
                f.write_str("; ")?;
            }
            first = false;
            write!(f, "{name}: {v}")?;
        }
        Ok(())
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

fn sorted_intersects(a: &[usize], b: &[usize]) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().any(|x| large.binary_search(x).is_ok())
}

/// Checks the four decomposition properties independently and reports a
/// witness for each failure.
pub fn validate_td(graph: &LabeledGraph, td: &TreeDecomposition) -> TdReport {
    let n = graph.vertex_count();
    let nb = td.bag_count();

    let tree = check_tree(td);

    // occurrences[v] = sorted bag indices containing v
    let mut occurrences = vec![Vec::new(); n];
    let mut vertex_coverage = Ok(());
    for (b, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                if vertex_coverage.is_ok() {
                    vertex_coverage = Err(Violation::BagVertexOutOfRange { bag: b, vertex: v });
                }
            } else {
                occurrences[v].push(b);
            }
        }
    }
    if vertex_coverage.is_ok() {
        if let Some(v) = occurrences.iter().position(Vec::is_empty) {
            vertex_coverage = Err(Violation::UncoveredVertex(v));
        }
    }

    let edge_coverage = graph
        .edges()
        .iter()
        .find(|e| !sorted_intersects(&occurrences[e.u], &occurrences[e.v]))
        .map_or(Ok(()), |e| Err(Violation::UncoveredEdge(e.u, e.v)));

    // Per vertex: union its bags along tree edges whose both ends contain it.
    let mut shared_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(a, b) in &td.tree_edges {
        if a >= nb || b >= nb || a == b {
            continue;
        }
        let (ba, bb) = (&td.bags[a], &td.bags[b]);
        let (mut i, mut j) = (0, 0);
        while i < ba.len() && j < bb.len() {
            match ba[i].cmp(&bb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if ba[i] < n {
                        shared_edges[ba[i]].push((a, b));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    let mut connectivity = Ok(());
    for v in 0..n {
        let occ = &occurrences[v];
        if occ.len() <= 1 {
            continue;
        }
        let local = |bag: usize| occ.binary_search(&bag).expect("shared edge endpoint holds v");
        let mut dsu = Dsu::new(occ.len());
        let mut components = occ.len();
        for &(a, b) in &shared_edges[v] {
            if dsu.union(local(a), local(b)) {
                components -= 1;
            }
        }
        if components > 1 {
            connectivity = Err(Violation::DisconnectedOccurrences {
                vertex: v,
                bags: occ.clone(),
            });
            break;
        }
    }

    TdReport {
        tree,
        vertex_coverage,
        edge_coverage,
        connectivity,
        width: td.width(),
    }
}

fn check_tree(td: &TreeDecomposition) -> Check {
    let nb = td.bag_count();
    if nb == 0 {
        return Err(Violation::NoBags);
    }
    let mut dsu = Dsu::new(nb);
    for &(a, b) in &td.tree_edges {
        if a >= nb || b >= nb || a == b {
            return Err(Violation::TreeEdgeOutOfRange { edge: (a, b) });
        }
        if !dsu.union(a, b) {
            return Err(Violation::TreeCycle { edge: (a, b) });
        }
    }
    if td.tree_edges.len() != nb - 1 {
        return Err(Violation::TreeDisconnected {
            bags: nb,
            edges: td.tree_edges.len(),
        });
    }
    Ok(())
}

const TD_FORMAT: &str = "td";

/// Reads PACE `.td`: `s td numBags maxBagSize n`, one `b id v1 v2 ...` line
/// per bag, then `i j` bag-tree edges; everything 1-indexed.
pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(TD_FORMAT, line_no, format!("bad number {s:?}")))
        };
        if f[0] == "s" {
            if header.is_some() {
                return Err(Error::parse(TD_FORMAT, line_no, "duplicate header"));
            }
            if f.len() != 5 || f[1] != "td" {
                return Err(Error::parse(TD_FORMAT, line_no, "expected `s td bags maxBag n`"));
            }
            let h = (num(f[2])?, num(f[3])?, num(f[4])?);
            bags = vec![None; h.0];
            header = Some(h);
            continue;
        }
        let Some((nb, max_bag, n)) = header else {
            return Err(Error::parse(TD_FORMAT, line_no, "content before `s td` header"));
        };
        let bag_id = |s: &str| -> Result<usize> {
            let b = num(s)?;
            if b == 0 || b > nb {
                return Err(Error::parse(TD_FORMAT, line_no, format!("bag {b} out of range 1..={nb}")));
            }
            Ok(b - 1)
        };
        if f[0] == "b" {
            if f.len() < 2 {
                return Err(Error::parse(TD_FORMAT, line_no, "bag line without id"));
            }
            let id = bag_id(f[1])?;
            if bags[id].is_some() {
                return Err(Error::parse(TD_FORMAT, line_no, format!("bag {} declared twice", id + 1)));
            }
            let mut verts = Vec::with_capacity(f.len() - 2);
            for s in &f[2..] {
                let v = num(s)?;
                if v == 0 || v > n {
                    return Err(Error::parse(TD_FORMAT, line_no, format!("vertex {v} out of range 1..={n}")));
                }
                verts.push(v - 1);
            }
            if verts.len() > max_bag {
                return Err(Error::parse(TD_FORMAT, line_no, "bag exceeds declared max bag size"));
            }
            bags[id] = Some(verts);
        } else if f.len() == 2 {
            edges.push((bag_id(f[0])?, bag_id(f[1])?));
        } else {
            return Err(Error::parse(TD_FORMAT, line_no, "unrecognized line"));
        }
    }
    if header.is_none() {
        return Err(Error::parse(TD_FORMAT, last_line, "missing header"));
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::parse(TD_FORMAT, last_line, format!("bag {} never declared", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeDecomposition::new(bags, edges))
}

/// `n` is the vertex count of the decomposed graph.
pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = format!("s td {} {} {}\n", td.bag_count(), td.max_bag_size(), n);
    for (i, bag) in td.bags().iter().enumerate() {
        out.push_str(&format!("b {}", i + 1));
        for v in bag {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
    }
    for &(a, b) in td.tree_edges() {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}
