//! Static layered range tree answering "max value among points that
//! dominate a threshold vector".

use crate::error::{Error, Result};

/// Below this many points a node scans instead of splitting.
const SCAN: usize = 16;

type Point = (Vec<i64>, i64);

/// Immutable once built; queries take `&self` and may run concurrently.
#[derive(Clone, Debug)]
pub struct DominanceIndex {
    dim: usize,
    len: usize,
    root: Option<Node>,
}

#[derive(Clone, Debug)]
enum Node {
    /// Brute-force over the remaining coordinates.
    Scan(Vec<Point>),
    /// Final coordinate: sorted keys with suffix maxima.
    Last { keys: Vec<i64>, suffix_max: Vec<i64> },
    /// Points sorted by the current coordinate; `seg` covers that order.
    Split { keys: Vec<i64>, seg: Box<Seg> },
}

#[derive(Clone, Debug)]
struct Seg {
    lo: usize,
    hi: usize,
    sub: Node,
    kids: Option<(Box<Seg>, Box<Seg>)>,
}

impl DominanceIndex {
    /// Builds the index. Points with identical coordinates collapse to the
    /// largest value.
    pub fn new(dim: usize, points: impl IntoIterator<Item = (Vec<i64>, i64)>) -> Result<Self> {
        let mut pts: Vec<Point> = Vec::new();
        for (coords, value) in points {
            if coords.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: coords.len(),
                });
            }
            pts.push((coords, value));
        }
        pts.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        pts.dedup_by(|next, kept| next.0 == kept.0);
        let len = pts.len();
        let root = (!pts.is_empty()).then(|| build(pts, 0, dim));
        Ok(DominanceIndex { dim, len, root })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct coordinate tuples stored.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Max value over points with `coords[c] >= thresholds[c]` for every `c`.
    pub fn query(&self, thresholds: &[i64]) -> Result<Option<i64>> {
        if thresholds.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: thresholds.len(),
            });
        }
        Ok(self.root.as_ref().and_then(|r| r.query(thresholds, 0)))
    }
}

/// Max value among points whose coordinate `c` is `>= thresholds[c]`, or
/// `> thresholds[c]` where `strict[c]` is set.
pub fn dominance_max_query(index: &DominanceIndex, thresholds: &[i64], strict: &[bool]) -> Result<Option<i64>> {
    if strict.len() != thresholds.len() {
        return Err(Error::DimensionMismatch {
            expected: thresholds.len(),
            got: strict.len(),
        });
    }
    let t: Vec<i64> = thresholds.iter().zip(strict).map(|(&t, &s)| if s { t + 1 } else { t }).collect();
    index.query(&t)
}

fn build(mut pts: Vec<Point>, k: usize, dim: usize) -> Node {
    if k == dim || pts.len() <= SCAN {
        return Node::Scan(pts);
    }
    pts.sort_by_key(|p| p.0[k]);
    let keys: Vec<i64> = pts.iter().map(|p| p.0[k]).collect();
    if k + 1 == dim {
        let mut suffix_max: Vec<i64> = pts.iter().map(|p| p.1).collect();
        for i in (0..suffix_max.len().saturating_sub(1)).rev() {
            suffix_max[i] = suffix_max[i].max(suffix_max[i + 1]);
        }
        return Node::Last { keys, suffix_max };
    }
    let seg = build_seg(&pts, 0, pts.len(), k, dim);
    Node::Split { keys, seg: Box::new(seg) }
}

fn build_seg(pts: &[Point], lo: usize, hi: usize, k: usize, dim: usize) -> Seg {
    let sub = build(pts[lo..hi].to_vec(), k + 1, dim);
    let kids = (hi - lo > SCAN).then(|| {
        let mid = lo + (hi - lo) / 2;
        (Box::new(build_seg(pts, lo, mid, k, dim)), Box::new(build_seg(pts, mid, hi, k, dim)))
    });
    Seg { lo, hi, sub, kids }
}

impl Node {
    fn query(&self, t: &[i64], k: usize) -> Option<i64> {
        match self {
            Node::Scan(pts) => pts
                .iter()
                .filter(|(c, _)| c[k..].iter().zip(&t[k..]).all(|(x, y)| x >= y))
                .map(|p| p.1)
                .max(),
            Node::Last { keys, suffix_max } => {
                let pos = keys.partition_point(|&x| x < t[k]);
                suffix_max.get(pos).copied()
            }
            Node::Split { keys, seg } => {
                let pos = keys.partition_point(|&x| x < t[k]);
                seg.query(pos, t, k)
            }
        }
    }
}

impl Seg {
    /// Max over positions `>= pos` of this segment.
    fn query(&self, pos: usize, t: &[i64], k: usize) -> Option<i64> {
        if self.hi <= pos {
            return None;
        }
        if self.lo >= pos {
            return self.sub.query(t, k + 1);
        }
        match &self.kids {
            Some((l, r)) => l.query(pos, t, k).max(r.query(pos, t, k)),
            // Small segment holding a mix: the scan node re-checks coordinate k.
            None => match &self.sub {
                Node::Scan(pts) => pts
                    .iter()
                    .filter(|(c, _)| c[k..].iter().zip(&t[k..]).all(|(x, y)| x >= y))
                    .map(|p| p.1)
                    .max(),
                _ => unreachable!("leaf segments hold scan nodes"),
            },
        }
    }
}
