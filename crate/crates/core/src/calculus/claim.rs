//! Claims of parameterized improvement and their composition along reductions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use serde::Serialize;

use super::expr::{to_affine, Binding, RuntimeExpr, Scope, Q, SIZE_VAR};
use super::formula::Formula;
use super::CalcError;

/// Symbolic positive exponent such as ε or δ. `value` is set only when a
/// concrete number is known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Slack {
    pub symbol: String,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_q")]
    pub value: Option<Q>,
}

fn ser_q<S: serde::Serializer>(v: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_none(),
    }
}

impl Slack {
    pub fn symbolic(symbol: &str) -> Self {
        Slack {
            symbol: symbol.to_string(),
            value: None,
        }
    }

    pub fn with_value(symbol: &str, value: Q) -> Result<Self, CalcError> {
        if !value.is_positive() {
            return Err(CalcError::InvalidClaim(format!("slack {symbol} = {value} must be positive")));
        }
        Ok(Slack {
            symbol: symbol.to_string(),
            value: Some(value),
        })
    }
}

impl fmt::Display for Slack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "{} = {v}", self.symbol),
            None => f.write_str(&self.symbol),
        }
    }
}

/// A problem is solvable within `bound`, which beats `base_bound` by a
/// polynomial factor governed by `improvement` at the cost of a factor in
/// `parameters` alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpiClaim {
    pub problem: String,
    pub base_bound: Option<RuntimeExpr>,
    pub improvement: Slack,
    pub bound: RuntimeExpr,
    pub parameters: BTreeSet<String>,
}

impl FpiClaim {
    pub fn new(problem: &str, parameters: &[&str], bound: RuntimeExpr, improvement: Slack) -> Self {
        FpiClaim {
            problem: problem.to_string(),
            base_bound: None,
            improvement,
            bound,
            parameters: parameters.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Factors of the bound that do not involve `n`, shared by every term.
    pub fn param_factor(&self) -> RuntimeExpr {
        let terms = self.bound.terms();
        let Some(first) = terms.first() else {
            return RuntimeExpr::one();
        };
        let atoms = first
            .atoms()
            .iter()
            .filter(|a| !RuntimeExpr::atom((*a).clone()).depends_on_n())
            .filter(|a| terms.iter().all(|t| t.atoms().contains(a)))
            .cloned()
            .fold(RuntimeExpr::one(), |acc, a| acc.mul(&RuntimeExpr::atom(a)));
        atoms
    }
}

impl fmt::Display for FpiClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<&str> = self.parameters.iter().map(String::as_str).collect();
        write!(f, "{} [{}]: O({})", self.problem, params.join(", "), self.bound)
    }
}

/// Images of target parameters as formulas over source parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamMap {
    entries: BTreeMap<String, Formula>,
    constants: BTreeMap<String, Q>,
    source_size: String,
}

impl ParamMap {
    pub fn new(entries: BTreeMap<String, Formula>) -> Self {
        ParamMap {
            entries,
            constants: BTreeMap::new(),
            source_size: SIZE_VAR.to_string(),
        }
    }

    pub fn with_scope(entries: BTreeMap<String, Formula>, constants: BTreeMap<String, Q>, source_size: &str) -> Self {
        ParamMap {
            entries,
            constants,
            source_size: source_size.to_string(),
        }
    }

    pub fn get(&self, target: &str) -> Option<&Formula> {
        self.entries.get(target)
    }

    pub fn entries(&self) -> &BTreeMap<String, Formula> {
        &self.entries
    }

    pub fn constants(&self) -> &BTreeMap<String, Q> {
        &self.constants
    }

    fn scope(&self) -> Scope {
        Scope {
            size: Some(self.source_size.clone()),
            constants: self.constants.clone(),
        }
    }

    /// Source parameters appearing in the image of `target`.
    pub fn support(&self, target: &str) -> Result<BTreeSet<String>, CalcError> {
        let f = self.get(target).ok_or_else(|| CalcError::Unmapped(target.to_string()))?;
        Ok(f.vars()
            .into_iter()
            .filter(|v| *v != self.source_size && !self.constants.contains_key(v))
            .collect())
    }

    fn binding(&self, target: &str) -> Result<Binding, CalcError> {
        let f = self.get(target).ok_or_else(|| CalcError::Unmapped(target.to_string()))?;
        let scope = self.scope();
        Ok(Binding {
            expr: RuntimeExpr::from_formula(f, &scope)?,
            affine: to_affine(f, &scope, false).ok(),
            support: self.support(target)?,
            is_identity: *f == Formula::Var(target.to_string()),
        })
    }
}

/// Union of the supports of the images of `targets`.
pub fn minimum_necessary_set(map: &ParamMap, targets: &BTreeSet<String>) -> Result<BTreeSet<String>, CalcError> {
    let mut out = BTreeSet::new();
    for t in targets {
        out.extend(map.support(t)?);
    }
    Ok(out)
}

/// A reduction from `source` to `target` as data: how target sizes and
/// parameters follow from the source, how many target calls are made and
/// what the reduction itself costs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionDescriptor {
    pub name: String,
    pub source: String,
    pub target: String,
    pub source_params: Vec<String>,
    pub source_bound: Option<RuntimeExpr>,
    /// Target size variable and its image over the source.
    pub size: (String, Formula),
    pub param_map: ParamMap,
    pub calls: Formula,
    pub reduction_time: Formula,
    pub slack: Slack,
    pub citation: String,
    pub executable: bool,
}

impl ReductionDescriptor {
    /// The reduction of a problem to itself, which passes claims through.
    pub fn identity_for(claim: &FpiClaim) -> Self {
        let entries = claim
            .bound
            .params()
            .into_iter()
            .chain(claim.parameters.iter().cloned())
            .map(|p| (p.clone(), Formula::Var(p)))
            .collect();
        ReductionDescriptor {
            name: "identity".into(),
            source: claim.problem.clone(),
            target: claim.problem.clone(),
            source_params: claim.parameters.iter().cloned().collect(),
            source_bound: claim.base_bound.clone(),
            size: (SIZE_VAR.into(), Formula::Var(SIZE_VAR.into())),
            param_map: ParamMap::new(entries),
            calls: Formula::Num(Q::from_integer(1)),
            reduction_time: Formula::Num(Q::from_integer(0)),
            slack: claim.improvement.clone(),
            citation: String::new(),
            executable: true,
        }
    }

    /// Size of each target instance, over the source size and parameters.
    pub fn query_size(&self) -> Result<RuntimeExpr, CalcError> {
        RuntimeExpr::from_formula(&self.size.1, &self.param_map.scope())
    }

    pub fn call_count(&self) -> Result<RuntimeExpr, CalcError> {
        RuntimeExpr::from_formula(&self.calls, &self.param_map.scope())
    }

    pub fn reduction_cost(&self) -> Result<RuntimeExpr, CalcError> {
        RuntimeExpr::from_formula(&self.reduction_time, &self.param_map.scope())
    }

    /// Every `lhs = rhs` mapping line, size first.
    pub fn mapping_lines(&self) -> Vec<String> {
        std::iter::once((&self.size.0, &self.size.1))
            .chain(self.param_map.entries())
            .map(|(k, v)| format!("{k} = {v}"))
            .collect()
    }
}

/// Derives a claim for `red.source` from a claim for `red.target`: the
/// target bound at the query size and mapped parameters, times the call
/// count, plus the reduction's own cost.
pub fn compose_closure(red: &ReductionDescriptor, claim: &FpiClaim) -> Result<FpiClaim, CalcError> {
    if claim.problem != red.target {
        return Err(CalcError::ProblemMismatch {
            claim: claim.problem.clone(),
            target: red.target.clone(),
        });
    }
    for p in claim.bound.params().iter().chain(&claim.parameters) {
        if red.param_map.get(p).is_none() {
            return Err(CalcError::Unmapped(p.clone()));
        }
    }
    let size = red.query_size()?;
    let per_call = claim.bound.substitute(&size, &|p| red.param_map.binding(p))?;
    let bound = red.call_count()?.mul(&per_call).add(&red.reduction_cost()?);
    Ok(FpiClaim {
        problem: red.source.clone(),
        base_bound: red.source_bound.clone(),
        improvement: red.slack.clone(),
        bound,
        parameters: minimum_necessary_set(&red.param_map, &claim.parameters)?,
    })
}
