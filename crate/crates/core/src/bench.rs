//! Runtime scaling measurements for OV solvers.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::gen_ov;
use crate::ov::{ov_brute, OvInstance};
use crate::twdiam::{solve_ov_via_diameter, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OvEngine {
    /// Scan of all pairs.
    Brute,
    /// Reduction to diameter and the treewidth engine.
    Diam,
}

impl fmt::Display for OvEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OvEngine::Brute => "brute",
            OvEngine::Diam => "diam",
        })
    }
}

impl FromStr for OvEngine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "brute" => Ok(OvEngine::Brute),
            "diam" => Ok(OvEngine::Diam),
            other => Err(format!("unknown engine `{other}` (expected brute or diam)")),
        }
    }
}

pub const CSV_HEADER: &str = "n,d,engine,answer,reduce_ms,solve_ms,total_ms,seed";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub d: usize,
    pub engine: OvEngine,
    pub answer: bool,
    pub reduce_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
    pub seed: u64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:.3},{:.3},{:.3},{}",
            self.n, self.d, self.engine, self.answer, self.reduce_ms, self.solve_ms, self.total_ms, self.seed
        )
    }
}

/// One timed solve: `(answer, reduce_ms, solve_ms)`.
pub fn time_ov(engine: OvEngine, instance: &OvInstance, options: &SolveOptions) -> Result<(bool, f64, f64)> {
    match engine {
        OvEngine::Brute => {
            let start = Instant::now();
            let found = ov_brute(instance).is_some();
            Ok((found, 0.0, start.elapsed().as_secs_f64() * 1e3))
        }
        OvEngine::Diam => {
            let r = solve_ov_via_diameter(instance, options)?;
            Ok((r.orthogonal, r.reduce_ms, r.solve_ms))
        }
    }
}

/// For each `n`, times each engine `reps` times on the planted instance
/// `gen_ov(n, d, true, seed)` and keeps the run with the median total.
pub fn ov_scaling(d: usize, n_list: &[usize], reps: usize, seed: u64, engines: &[OvEngine], options: &SolveOptions) -> Result<Vec<BenchRow>> {
    if reps == 0 {
        return Err(Error::InvalidInstance("repetitions must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for &n in n_list {
        let instance = gen_ov(n, d, true, seed)?;
        for &engine in engines {
            let mut runs = Vec::with_capacity(reps);
            for _ in 0..reps {
                let (answer, reduce_ms, solve_ms) = time_ov(engine, &instance, options)?;
                runs.push(BenchRow {
                    n,
                    d,
                    engine,
                    answer,
                    reduce_ms,
                    solve_ms,
                    total_ms: reduce_ms + solve_ms,
                    seed,
                });
            }
            runs.sort_by(|a, b| a.total_ms.total_cmp(&b.total_ms));
            rows.push(runs.swap_remove(reps / 2));
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`. Needs two distinct `x`
/// and positive values.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (logs.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

/// Slope of total time against `n` for one engine's rows.
pub fn engine_slope(rows: &[BenchRow], engine: OvEngine) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.engine == engine).map(|r| (r.n as f64, r.total_ms)).collect();
    loglog_slope(&pts)
}
