//! Executable reductions: OV to diameter with its tree decomposition, and
//! CNF-SAT to OV by split-and-list. Also evaluates parameter mappings.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::calculus::{shipped_ledger, CalcError, Formula};
use crate::cnf::{CnfInstance, MAX_BRUTE_VARS};
use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, Role};
use crate::ov::{BitVector, OvInstance};
use crate::td::TreeDecomposition;

const OV2DIAM_FORMULA: &str = "nodes = nA + nB + d + 2; treewidthBound = d + 1";
const SAT2OV_FORMULA: &str = "nA = 2^ceil(n/2); nB = 2^floor(n/2); d = m";

/// Sizes and parameters on both sides of one reduction run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MappingRecord {
    pub reduction_id: String,
    pub source_params: BTreeMap<String, u64>,
    pub target_params: BTreeMap<String, u64>,
    pub call_count: u64,
    /// `name = formula` assignments separated by `;`.
    pub formula: String,
}

impl MappingRecord {
    /// Target parameters recomputed from `formula` and the source parameters.
    pub fn reevaluate(&self) -> Result<BTreeMap<String, u64>> {
        evaluate(&self.formula, &self.source_params, &BTreeMap::new())
    }
}

fn evaluate(formula: &str, source: &BTreeMap<String, u64>, constants: &BTreeMap<String, f64>) -> Result<BTreeMap<String, u64>> {
    let mut env: BTreeMap<String, f64> = source.iter().map(|(k, &v)| (k.clone(), v as f64)).collect();
    env.extend(constants.iter().map(|(k, &v)| (k.clone(), v)));
    let mut out = BTreeMap::new();
    for part in formula.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (lhs, rhs) = part
            .split_once('=')
            .ok_or_else(|| CalcError::Unsupported(format!("`{part}` is not an assignment")))?;
        let value = eval_count(&Formula::parse(rhs.trim())?, &env)?;
        out.insert(lhs.trim().to_string(), value);
    }
    Ok(out)
}

/// Evaluates to a nonnegative integer, rounding up.
fn eval_count(f: &Formula, env: &BTreeMap<String, f64>) -> Result<u64> {
    let v = f.eval(env).map_err(|e| match e {
        CalcError::Unbound(name) => Error::MissingParameter(name),
        other => Error::Calc(other),
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(CalcError::Unsupported(format!("`{f}` evaluates to {v}")).into());
    }
    // Absorb float noise such as 2^5 = 32.000000000000004.
    let rounded = v.round();
    Ok(if (v - rounded).abs() < 1e-9 { rounded } else { v.ceil() } as u64)
}

fn params(pairs: &[(&str, usize)]) -> BTreeMap<String, u64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v as u64)).collect()
}

/// Graph whose diameter is 3 if the instance has an orthogonal pair and 2
/// otherwise. Vertices are laid out as `a_1..a_nA`, `b_1..b_nB`, `c_1..c_d`,
/// `x`, `y`.
pub fn ov_to_diameter(instance: &OvInstance) -> (LabeledGraph, MappingRecord) {
    let (na, nb, d) = (instance.n_a(), instance.n_b(), instance.dim());
    let (b0, c0) = (na, na + nb);
    let x = c0 + d;
    let y = x + 1;
    let n = y + 1;

    let mut labels = Vec::with_capacity(n);
    labels.extend((0..na).map(Role::A));
    labels.extend((0..nb).map(Role::B));
    labels.extend((0..d).map(Role::C));
    labels.extend([Role::X, Role::Y]);

    let mut edges = Vec::with_capacity(instance.ones_a() + instance.ones_b() + na + nb + 2 * d + 1);
    for (i, v) in instance.set_a().iter().enumerate() {
        edges.extend(v.ones_indices().map(|j| (i, c0 + j, 1)));
        edges.push((x, i, 1));
    }
    for (i, v) in instance.set_b().iter().enumerate() {
        edges.extend(v.ones_indices().map(|j| (b0 + i, c0 + j, 1)));
        edges.push((y, b0 + i, 1));
    }
    for j in 0..d {
        edges.push((x, c0 + j, 1));
        edges.push((y, c0 + j, 1));
    }
    edges.push((x, y, 1));

    let graph = LabeledGraph::new(n, edges, labels).expect("construction yields a simple labeled graph");
    let source = params(&[("nA", na), ("nB", nb), ("d", d)]);
    let record = MappingRecord {
        reduction_id: "ov2diam".into(),
        target_params: evaluate(OV2DIAM_FORMULA, &source, &BTreeMap::new()).expect("fixed formula"),
        source_params: source,
        call_count: 1,
        formula: OV2DIAM_FORMULA.into(),
    };
    (graph, record)
}

/// Star-shaped decomposition of the [`ov_to_diameter`] graph: one bag
/// `{a_i, x} ∪ C` per A-vector, one bag `{b_j, y} ∪ C` per B-vector, and a
/// central bag `{x, y} ∪ C` adjacent to all of them. Width is `d + 1`.
pub fn ov_graph_decomposition(instance: &OvInstance) -> TreeDecomposition {
    let (na, nb, d) = (instance.n_a(), instance.n_b(), instance.dim());
    let c0 = na + nb;
    let (x, y) = (c0 + d, c0 + d + 1);
    let with_c = |extra: [usize; 2]| -> Vec<usize> { extra.into_iter().chain(c0..c0 + d).collect() };
    let mut bags: Vec<Vec<usize>> = Vec::with_capacity(na + nb + 1);
    bags.extend((0..na).map(|i| with_c([i, x])));
    bags.extend((0..nb).map(|j| with_c([na + j, y])));
    let center = bags.len();
    bags.push(with_c([x, y]));
    let tree = (0..center).map(|i| (i, center)).collect();
    TreeDecomposition::new(bags, tree)
}

/// Split-and-list reduction. The first `⌈n/2⌉` variables are enumerated
/// into A and the rest into B, in increasing binary order with bit `i` of
/// the counter giving the `i`-th variable of the half. Coordinate `j` is 0
/// when the half-assignment satisfies clause `j`.
pub fn sat_to_ov(cnf: &CnfInstance) -> Result<(OvInstance, MappingRecord)> {
    let n = cnf.num_vars();
    if n > MAX_BRUTE_VARS {
        return Err(Error::CapExceeded {
            what: "variable count",
            value: n,
            cap: MAX_BRUTE_VARS,
            hint: "",
        });
    }
    let m = cnf.num_clauses();
    if m == 0 {
        return Err(Error::InvalidInstance("formula has no clauses, so the OV dimension would be 0".into()));
    }
    let first = n.div_ceil(2);
    let half = |offset: usize, len: usize| -> Vec<BitVector> {
        (0u64..1 << len)
            .map(|mask| {
                let sat = |lit: i32| {
                    let v = lit.unsigned_abs() as usize - 1;
                    v >= offset && v < offset + len && ((mask >> (v - offset)) & 1 == 1) == (lit > 0)
                };
                BitVector::new(cnf.clauses().iter().map(|c| !c.iter().any(|&l| sat(l))).collect())
            })
            .collect()
    };
    let instance = OvInstance::new(m, half(0, first), half(first, n - first))?;
    let source = params(&[("n", n), ("m", m)]);
    let record = MappingRecord {
        reduction_id: "sat2ov".into(),
        target_params: evaluate(SAT2OV_FORMULA, &source, &BTreeMap::new())?,
        source_params: source,
        call_count: 1,
        formula: SAT2OV_FORMULA.into(),
    };
    Ok((instance, record))
}

/// Evaluates a reduction's parameter mapping. `ov2diam` accepts `n` for
/// `nA = nB = n`. Rows without an executable reduction are evaluated from
/// the shipped ledger.
pub fn mapping_report(reduction_id: &str, source: &BTreeMap<String, u64>) -> Result<MappingRecord> {
    let mut source = source.clone();
    let mut constants = BTreeMap::new();
    let (formula, call_count) = match reduction_id {
        "ov2diam" => {
            if let Some(&n) = source.get("n") {
                source.entry("nA".into()).or_insert(n);
                source.entry("nB".into()).or_insert(n);
            }
            (OV2DIAM_FORMULA.to_string(), 1)
        }
        "sat2ov" => (SAT2OV_FORMULA.to_string(), 1),
        other => {
            let row = shipped_ledger()
                .into_iter()
                .find(|r| r.name == other)
                .ok_or_else(|| Error::UnknownReduction(other.to_string()))?;
            constants = row
                .param_map
                .constants()
                .iter()
                .map(|(k, v)| (k.clone(), *v.numer() as f64 / *v.denom() as f64))
                .collect();
            let mut env: BTreeMap<String, f64> = source.iter().map(|(k, &v)| (k.clone(), v as f64)).collect();
            env.extend(constants.clone());
            (row.mapping_lines().join("; "), eval_count(&row.calls, &env)?)
        }
    };
    Ok(MappingRecord {
        reduction_id: reduction_id.to_string(),
        target_params: evaluate(&formula, &source, &constants)?,
        source_params: source,
        call_count,
        formula,
    })
}
