//! Maximum over cross pairs of `min_s dL[u][s] + dR[v][s]`.

use super::dominance::DominanceIndex;

/// Switches between the dominance method and the direct double loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossConfig {
    /// Largest index dimension (`|S| - 1`) the dominance method accepts.
    pub max_dim: usize,
    /// Pair counts below this use the double loop.
    pub crossover_pairs: usize,
}

impl Default for CrossConfig {
    fn default() -> Self {
        CrossConfig {
            max_dim: 7,
            crossover_pairs: 4096,
        }
    }
}

/// How one [`cross_pair_max`] call was answered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CrossOutcome {
    pub value: u64,
    /// Distinct rows on each side after deduplication.
    pub rows: (usize, usize),
    pub method: CrossMethod,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CrossMethod {
    #[default]
    Empty,
    /// Double loop because the pair count is under the crossover.
    SmallNaive,
    /// Double loop because `|S| - 1` exceeds the dimension cap.
    DimCapNaive,
    Dominance,
}

/// Rows are indexed by vertex, columns by separator vertex. All entries
/// must be finite. An empty side contributes 0.
pub fn cross_pair_max<L: AsRef<[u64]>, R: AsRef<[u64]>>(d_left: &[L], d_right: &[R], config: CrossConfig) -> CrossOutcome {
    let left = distinct_rows(d_left);
    let right = distinct_rows(d_right);
    let rows = (left.len(), right.len());
    if left.is_empty() || right.is_empty() {
        return CrossOutcome {
            value: 0,
            rows,
            method: CrossMethod::Empty,
        };
    }
    let p = left[0].len();
    let method = if left.len().saturating_mul(right.len()) < config.crossover_pairs {
        CrossMethod::SmallNaive
    } else if p.saturating_sub(1) > config.max_dim {
        CrossMethod::DimCapNaive
    } else {
        CrossMethod::Dominance
    };
    let value = match method {
        CrossMethod::Dominance => by_minimizer(&left, &right),
        _ => naive(&left, &right),
    };
    CrossOutcome { value, rows, method }
}

/// Direct `O(|L|·|R|·|S|)` evaluation.
pub fn cross_pair_max_naive<L: AsRef<[u64]>, R: AsRef<[u64]>>(d_left: &[L], d_right: &[R]) -> u64 {
    naive(&distinct_rows(d_left), &distinct_rows(d_right))
}

fn distinct_rows<T: AsRef<[u64]>>(rows: &[T]) -> Vec<&[u64]> {
    let mut out: Vec<&[u64]> = rows.iter().map(AsRef::as_ref).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn naive(left: &[&[u64]], right: &[&[u64]]) -> u64 {
    let mut best = 0;
    for l in left {
        for r in right {
            let d = l.iter().zip(r.iter()).map(|(a, b)| a + b).min().unwrap_or(0);
            best = best.max(d);
        }
    }
    best
}

/// Index of the first separator vertex attaining `min_s a[s] + b[s]`.
pub fn canonical_minimizer(a: &[u64], b: &[u64]) -> usize {
    let mut best = 0;
    for s in 1..a.len() {
        if a[s] + b[s] < a[best] + b[best] {
            best = s;
        }
    }
    best
}

/// Whether `(a, b)` falls in minimizer class `i`, phrased as the dominance
/// constraints the index answers.
pub fn in_minimizer_class(a: &[u64], b: &[u64], i: usize) -> bool {
    (0..a.len()).filter(|&j| j != i).all(|j| {
        let coord = b[j] as i64 - b[i] as i64;
        let threshold = a[i] as i64 - a[j] as i64;
        if j < i {
            coord > threshold
        } else {
            coord >= threshold
        }
    })
}

fn by_minimizer(left: &[&[u64]], right: &[&[u64]]) -> u64 {
    let p = left[0].len();
    let mut best = 0;
    let mut thresholds = Vec::with_capacity(p - 1);
    for i in 0..p {
        let points = right.iter().map(|r| {
            let coords = (0..p).filter(|&j| j != i).map(|j| r[j] as i64 - r[i] as i64).collect();
            (coords, r[i] as i64)
        });
        let index = DominanceIndex::new(p - 1, points).expect("coordinates have dimension p - 1");
        for l in left {
            thresholds.clear();
            // Ties go to the smaller index: strict below i, inclusive above.
            thresholds.extend((0..p).filter(|&j| j != i).map(|j| {
                let t = l[i] as i64 - l[j] as i64;
                if j < i {
                    t + 1
                } else {
                    t
                }
            }));
            if let Some(v) = index.query(&thresholds).expect("threshold dimension") {
                best = best.max(l[i] + v as u64);
            }
        }
    }
    best
}
