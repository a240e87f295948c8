//! Structured result records, one per command run.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use pfgr_core::twdiam::EngineStats;
use serde::Serialize;

#[derive(Clone, Debug, Default, Serialize)]
pub struct InputSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub reduce_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Fallbacks {
    pub small_pairs: usize,
    pub dim_cap: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub command: String,
    pub input: InputSummary,
    pub answer: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    pub timings: Timings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallbacks: Option<Fallbacks>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separator_sizes: Option<std::collections::BTreeMap<usize, usize>>,
}

impl ResultRecord {
    pub fn new(command: &str, answer: impl Into<serde_json::Value>) -> Self {
        ResultRecord {
            command: command.to_string(),
            input: InputSummary::default(),
            answer: answer.into(),
            engine: None,
            timings: Timings::default(),
            seed: None,
            fallbacks: None,
            separator_sizes: None,
        }
    }

    pub fn with_stats(mut self, stats: &EngineStats) -> Self {
        self.fallbacks = Some(Fallbacks {
            small_pairs: stats.small_fallbacks,
            dim_cap: stats.dim_cap_fallbacks,
        });
        self.separator_sizes = Some(stats.separator_sizes.clone());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    /// Appends one JSON line to `path`.
    pub fn append_to(&self, path: &Path) -> Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening record file {}", path.display()))?;
        writeln!(file, "{}", self.to_json()).with_context(|| format!("writing {}", path.display()))
    }
}
