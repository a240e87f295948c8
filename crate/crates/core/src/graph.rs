//! Undirected, positively weighted graphs with vertex role labels, and the
//! PACE-style edge-list format extended with weights and labels.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Weight = u64;

/// Role of a vertex inside an OV reduction graph. Indices are 0-based here and
/// written 1-based in files.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    A(usize),
    B(usize),
    C(usize),
    X,
    Y,
    #[default]
    Plain,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::A(i) => write!(f, "a{}", i + 1),
            Role::B(i) => write!(f, "b{}", i + 1),
            Role::C(i) => write!(f, "c{}", i + 1),
            Role::X => f.write_str("x"),
            Role::Y => f.write_str("y"),
            Role::Plain => f.write_str("plain"),
        }
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "x" => return Ok(Role::X),
            "y" => return Ok(Role::Y),
            "plain" => return Ok(Role::Plain),
            _ => {}
        }
        let (head, tail) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        let idx: usize = tail
            .parse()
            .ok()
            .filter(|&i| i >= 1)
            .ok_or_else(|| format!("unknown role {s:?}"))?;
        match head {
            "a" => Ok(Role::A(idx - 1)),
            "b" => Ok(Role::B(idx - 1)),
            "c" => Ok(Role::C(idx - 1)),
            _ => Err(format!("unknown role {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    /// Always `u < v`.
    pub u: usize,
    pub v: usize,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    labels: Vec<Role>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, Weight)>>,
    unit_weight: bool,
}

impl LabeledGraph {
    /// Builds a graph from weighted edges. Parallel edges collapse to the
    /// smallest weight. Self-loops, zero weights and out-of-range endpoints
    /// are rejected.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, Weight)>,
        labels: Vec<Role>,
    ) -> Result<Self> {
        if labels.len() != vertex_count {
            return Err(Error::InvalidInstance(format!(
                "{} labels for {vertex_count} vertices",
                labels.len()
            )));
        }
        for role in [Role::X, Role::Y] {
            if labels.iter().filter(|&&r| r == role).count() > 1 {
                return Err(Error::InvalidInstance(format!("role {role} used twice")));
            }
        }
        let mut list = Vec::new();
        for (u, v, weight) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop at vertex {u}")));
            }
            if weight == 0 {
                return Err(Error::InvalidInstance(format!("edge ({u}, {v}) has weight 0")));
            }
            list.push(Edge {
                u: u.min(v),
                v: u.max(v),
                weight,
            });
        }
        list.sort_unstable();
        list.dedup_by(|next, kept| next.u == kept.u && next.v == kept.v);

        let mut adj = vec![Vec::new(); vertex_count];
        for e in &list {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        let unit_weight = list.iter().all(|e| e.weight == 1);
        Ok(LabeledGraph {
            labels,
            edges: list,
            adj,
            unit_weight,
        })
    }

    /// Unlabeled, unit-weight graph.
    pub fn unweighted(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        LabeledGraph::new(
            vertex_count,
            edges.into_iter().map(|(u, v)| (u, v, 1)),
            vec![Role::Plain; vertex_count],
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, Weight)] {
        &self.adj[v]
    }

    pub fn label(&self, v: usize) -> Role {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Role] {
        &self.labels
    }

    pub fn find_role(&self, role: Role) -> Option<usize> {
        self.labels.iter().position(|&r| r == role)
    }

    pub fn is_unit_weight(&self) -> bool {
        self.unit_weight
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_weight(u, v).is_some()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<Weight> {
        let (u, v) = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&(u, v)))
            .ok()
            .map(|i| self.edges[i].weight)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}

const GRAPH_FORMAT: &str = "graph";

/// Reads the edge-list format: `p tw n m`, then `u v` (unit weight) or
/// `w u v weight` edge lines and optional `l v role` label lines, all
/// 1-indexed. Lines starting with `c` are comments. `m` counts edge lines.
pub fn parse_graph(text: &str) -> Result<LabeledGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut labels = Vec::new();
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
                .map_err(|_| Error::parse(GRAPH_FORMAT, line_no, format!("bad number {s:?}")))
        };
        if f[0] == "p" {
            if header.is_some() {
                return Err(Error::parse(GRAPH_FORMAT, line_no, "duplicate header"));
            }
            if f.len() != 4 || f[1] != "tw" {
                return Err(Error::parse(GRAPH_FORMAT, line_no, "expected `p tw n m`"));
            }
            header = Some((num(f[2])?, num(f[3])?));
            labels = vec![Role::Plain; num(f[2])?];
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(GRAPH_FORMAT, line_no, "content before `p tw` header"));
        };
        let vertex = |s: &str| -> Result<usize> {
            let v = num(s)?;
            if v == 0 || v > n {
                return Err(Error::parse(
                    GRAPH_FORMAT,
                    line_no,
                    format!("vertex {v} out of range 1..={n}"),
                ));
            }
            Ok(v - 1)
        };
        match (f[0], f.len()) {
            ("w", 4) => {
                let w = num(f[3])? as Weight;
                edges.push((vertex(f[1])?, vertex(f[2])?, w, line_no));
            }
            ("l", 3) => {
                let v = vertex(f[1])?;
                labels[v] = f[2]
                    .parse()
                    .map_err(|e: String| Error::parse(GRAPH_FORMAT, line_no, e))?;
            }
            (_, 2) => edges.push((vertex(f[0])?, vertex(f[1])?, 1, line_no)),
            _ => return Err(Error::parse(GRAPH_FORMAT, line_no, "unrecognized line")),
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(GRAPH_FORMAT, last_line, "missing header"))?;
    if edges.len() != m {
        return Err(Error::parse(
            GRAPH_FORMAT,
            last_line,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    for &(u, v, w, line_no) in &edges {
        if u == v || w == 0 {
            return Err(Error::parse(GRAPH_FORMAT, line_no, "self-loop or zero weight"));
        }
    }
    LabeledGraph::new(n, edges.into_iter().map(|(u, v, w, _)| (u, v, w)), labels)
        .map_err(|e| Error::parse(GRAPH_FORMAT, last_line, e.to_string()))
}

pub fn write_graph(graph: &LabeledGraph) -> String {
    let mut out = format!("p tw {} {}\n", graph.vertex_count(), graph.edge_count());
    for e in graph.edges() {
        if e.weight == 1 {
            out.push_str(&format!("{} {}\n", e.u + 1, e.v + 1));
        } else {
            out.push_str(&format!("w {} {} {}\n", e.u + 1, e.v + 1, e.weight));
        }
    }
    for (v, role) in graph.labels().iter().enumerate() {
        if *role != Role::Plain {
            out.push_str(&format!("l {} {role}\n", v + 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_edges_keep_min_weight() {
        let g = LabeledGraph::new(3, [(0, 1, 5), (1, 0, 2), (1, 2, 1)], vec![Role::Plain; 3]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight(1, 0), Some(2));
        assert!(!g.is_unit_weight());
    }

    #[test]
    fn rejects_self_loops_and_zero_weights() {
        assert!(LabeledGraph::unweighted(2, [(1, 1)]).is_err());
        assert!(LabeledGraph::new(2, [(0, 1, 0)], vec![Role::Plain; 2]).is_err());
        assert!(LabeledGraph::unweighted(2, [(0, 2)]).is_err());
    }

    #[test]
    fn rejects_duplicate_x() {
        assert!(LabeledGraph::new(2, [], vec![Role::X, Role::X]).is_err());
    }

    #[test]
    fn role_text() {
        for r in [Role::A(0), Role::B(4), Role::C(11), Role::X, Role::Y, Role::Plain] {
            assert_eq!(r.to_string().parse::<Role>().unwrap(), r);
        }
        assert!("a0".parse::<Role>().is_err());
        assert!("q3".parse::<Role>().is_err());
    }

    #[test]
    fn format_round_trip() {
        let g = LabeledGraph::new(
            4,
            [(0, 1, 1), (1, 2, 3), (2, 3, 1)],
            vec![Role::X, Role::A(0), Role::Plain, Role::Y],
        )
        .unwrap();
        let text = write_graph(&g);
        assert_eq!(text, "p tw 4 3\n1 2\nw 2 3 3\n3 4\nl 1 x\nl 2 a1\nl 4 y\n");
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn parse_errors_name_lines() {
        let err = parse_graph("p tw 2 1\n1 3\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_graph("p tw 2 2\n1 2\n").is_err());
        assert!(parse_graph("1 2\n").is_err());
        assert!(parse_graph("p tw 2 1\n1 1\n").is_err());
    }
}
