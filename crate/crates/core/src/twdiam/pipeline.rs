//! OV decided through the diameter of its reduction graph.

use std::time::Instant;

use serde::Serialize;

use super::engine::{diameter_td_with, EngineConfig, EngineStats};
use crate::error::{Error, Result};
use crate::ov::OvInstance;
use crate::reductions::{ov_graph_decomposition, ov_to_diameter};

pub const DEFAULT_MAX_D: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Largest dimension accepted.
    pub max_d: usize,
    pub engine: EngineConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_d: DEFAULT_MAX_D,
            engine: EngineConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub orthogonal: bool,
    pub diameter: u64,
    pub width: usize,
    pub reduce_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
    pub stats: EngineStats,
}

/// Builds the reduction graph and its decomposition, then reports an
/// orthogonal pair iff the diameter is 3.
pub fn solve_ov_via_diameter(instance: &OvInstance, options: &SolveOptions) -> Result<SolveReport> {
    let d = instance.dim();
    if d > options.max_d {
        return Err(Error::CapExceeded {
            what: "dimension d",
            value: d,
            cap: options.max_d,
            hint: "; solve time grows like log^d n, raise the cap to override",
        });
    }
    let start = Instant::now();
    let (graph, _) = ov_to_diameter(instance);
    let td = ov_graph_decomposition(instance);
    let reduced = Instant::now();
    let (diameter, stats) = diameter_td_with(&graph, &td, &options.engine)?;
    let done = Instant::now();
    let ms = |a: Instant, b: Instant| (b - a).as_secs_f64() * 1e3;
    Ok(SolveReport {
        orthogonal: diameter == 3,
        diameter,
        width: td.width(),
        reduce_ms: ms(start, reduced),
        solve_ms: ms(reduced, done),
        total_ms: ms(start, done),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_ov;
    use crate::ov::ov_brute;

    #[test]
    fn planted_instance() {
        let inst = gen_ov(200, 4, true, 1).unwrap();
        let r = solve_ov_via_diameter(&inst, &SolveOptions::default()).unwrap();
        assert!(r.orthogonal);
        assert_eq!(r.diameter, 3);
        assert_eq!(r.width, 5);
    }

    #[test]
    fn all_ones_has_no_pair() {
        let inst = OvInstance::from_strs(&["1"], &["1"]).unwrap();
        let r = solve_ov_via_diameter(&inst, &SolveOptions::default()).unwrap();
        assert!(!r.orthogonal);
        assert_eq!(r.diameter, 2);
    }

    #[test]
    fn dimension_cap() {
        let inst = gen_ov(10, 9, false, 0).unwrap();
        assert!(matches!(
            solve_ov_via_diameter(&inst, &SolveOptions::default()),
            Err(Error::CapExceeded { value: 9, cap: 8, .. })
        ));
        let opts = SolveOptions {
            max_d: 9,
            ..SolveOptions::default()
        };
        let r = solve_ov_via_diameter(&inst, &opts).unwrap();
        assert_eq!(r.orthogonal, ov_brute(&inst).is_some());
    }

    #[test]
    fn agrees_with_brute() {
        for seed in 0..40 {
            let inst = gen_ov(5 + seed as usize * 7, 1 + seed as usize % 5, seed % 3 == 0, seed).unwrap();
            let r = solve_ov_via_diameter(&inst, &SolveOptions::default()).unwrap();
            assert_eq!(r.orthogonal, ov_brute(&inst).is_some(), "seed {seed}");
        }
    }
}
