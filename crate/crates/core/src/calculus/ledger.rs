//! TOML encoding of reduction descriptors and claims.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::claim::{FpiClaim, ParamMap, ReductionDescriptor, Slack};
use super::expr::{RuntimeExpr, Q};
use super::formula::Formula;
use super::CalcError;

/// The reduction ledger shipped with the crate.
pub const LEDGER: &str = include_str!("../../data/ledger.toml");

/// Claim for diameter parameterized by treewidth.
pub const DIAMETER_CLAIM: &str = include_str!("../../data/diameter_claim.toml");

#[derive(Deserialize)]
struct LedgerFile {
    #[serde(default)]
    reduction: Vec<toml::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    name: String,
    source: String,
    target: String,
    source_size: String,
    #[serde(default)]
    source_params: Vec<String>,
    source_bound: Option<String>,
    #[serde(default)]
    constants: BTreeMap<String, i64>,
    size: String,
    mapping: Vec<String>,
    calls: String,
    #[serde(default = "zero")]
    reduction_time: String,
    #[serde(default = "delta")]
    slack: String,
    citation: String,
    #[serde(default)]
    executable: bool,
}

fn zero() -> String {
    "0".into()
}

fn delta() -> String {
    "δ".into()
}

/// Parses a ledger. Errors carry the 1-based row number.
pub fn parse_ledger(text: &str) -> Result<Vec<ReductionDescriptor>, CalcError> {
    let file: LedgerFile = toml::from_str(text).map_err(|e| CalcError::Ledger {
        row: 0,
        message: e.message().to_string(),
    })?;
    file.reduction
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let row = i + 1;
            let fail = |message: String| CalcError::Ledger { row, message };
            let raw: Row = value.try_into().map_err(|e: toml::de::Error| fail(e.message().to_string()))?;
            descriptor(raw).map_err(|e| fail(e.to_string()))
        })
        .collect()
}

fn descriptor(row: Row) -> Result<ReductionDescriptor, CalcError> {
    let mut size = None;
    let mut entries = BTreeMap::new();
    for line in &row.mapping {
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| CalcError::Unsupported(format!("mapping `{line}` is not of the form `name = formula`")))?;
        let lhs = lhs.trim();
        let rhs = Formula::parse(rhs.trim())?;
        if lhs == row.size {
            size = Some((lhs.to_string(), rhs));
        } else if entries.insert(lhs.to_string(), rhs).is_some() {
            return Err(CalcError::Unsupported(format!("`{lhs}` is mapped twice")));
        }
    }
    let size = size.ok_or_else(|| CalcError::Unsupported(format!("no mapping for size `{}`", row.size)))?;
    let constants = row.constants.into_iter().map(|(k, v)| (k, Q::from_integer(v))).collect();
    let param_map = ParamMap::with_scope(entries, constants, &row.source_size);
    let descriptor = ReductionDescriptor {
        name: row.name,
        source: row.source,
        target: row.target,
        source_params: row.source_params,
        source_bound: row.source_bound.as_deref().map(RuntimeExpr::parse).transpose()?,
        size,
        param_map,
        calls: Formula::parse(&row.calls)?,
        reduction_time: Formula::parse(&row.reduction_time)?,
        slack: Slack::symbolic(&row.slack),
        citation: row.citation,
        executable: row.executable,
    };
    descriptor.call_count()?;
    descriptor.reduction_cost()?;
    Ok(descriptor)
}

pub fn shipped_ledger() -> Vec<ReductionDescriptor> {
    parse_ledger(LEDGER).expect("shipped ledger parses")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClaimFile {
    problem: String,
    #[serde(default)]
    parameters: Vec<String>,
    base_bound: Option<String>,
    improvement: String,
    bound: String,
}

pub fn parse_claim(text: &str) -> Result<FpiClaim, CalcError> {
    let raw: ClaimFile = toml::from_str(text).map_err(|e| CalcError::InvalidClaim(e.message().to_string()))?;
    Ok(FpiClaim {
        problem: raw.problem,
        base_bound: raw.base_bound.as_deref().map(RuntimeExpr::parse).transpose()?,
        improvement: Slack::symbolic(&raw.improvement),
        bound: RuntimeExpr::parse(&raw.bound)?,
        parameters: raw.parameters.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::compose_closure;
    use super::*;

    fn row<'a>(ledger: &'a [ReductionDescriptor], name: &str) -> &'a ReductionDescriptor {
        ledger.iter().find(|r| r.name == name).unwrap()
    }

    #[test]
    fn shipped_rows_load() {
        let ledger = shipped_ledger();
        assert_eq!(ledger.len(), 7);
        let executable: Vec<&str> = ledger.iter().filter(|r| r.executable).map(|r| r.name.as_str()).collect();
        assert_eq!(executable, ["sat2ov", "ov2diam"]);
    }

    #[test]
    fn sat_row_mapping() {
        let ledger = shipped_ledger();
        let sat = row(&ledger, "sat2ov");
        assert_eq!(sat.query_size().unwrap().to_string(), "2^(n/2)");
        assert_eq!(sat.param_map.get("d").unwrap().to_string(), "m");
        assert_eq!(sat.citation, "Wil05");
    }

    #[test]
    fn apsp_row_calls() {
        let ledger = shipped_ledger();
        let r = row(&ledger, "apsp2mpprod");
        assert_eq!(r.calls.to_string(), "ceil(log(n))");
        assert_eq!(r.call_count().unwrap().to_string(), "log(n)");
    }

    #[test]
    fn apnt_row_calls_simplify() {
        let ledger = shipped_ledger();
        assert_eq!(row(&ledger, "apnt2negtr").call_count().unwrap().to_string(), "n^(8/3)");
    }

    #[test]
    fn malformed_row_is_named() {
        let text = LEDGER.replacen("calls = \"ceil(log(n))\"", "calls = \"ceil(log(n)\"", 1);
        match parse_ledger(&text) {
            Err(CalcError::Ledger { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        let text = LEDGER.replacen("citation = \"AGW15\"", "", 1);
        match parse_ledger(&text) {
            Err(CalcError::Ledger { row, message }) => {
                assert_eq!(row, 5);
                assert!(message.contains("citation"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ov_claim_from_diameter_claim() {
        let ledger = shipped_ledger();
        let claim = parse_claim(DIAMETER_CLAIM).unwrap();
        let ov = compose_closure(row(&ledger, "ov2diam"), &claim).unwrap();
        assert_eq!(ov.bound.to_string(), "d^2 * (n + d) * log^d(n + d)");
        assert_eq!(ov.bound, RuntimeExpr::parse("d^2*(n+d)*log^d(n+d)").unwrap());
        assert_eq!(ov.problem, "OV");
        assert_eq!(ov.parameters.iter().collect::<Vec<_>>(), ["d"]);
        assert_eq!(ov.improvement.symbol, "δ");
        assert_eq!(ov.base_bound.as_ref().unwrap().to_string(), "n^2");

        let sat = compose_closure(row(&ledger, "sat2ov"), &ov).unwrap();
        assert_eq!(sat.bound.to_string(), "m^2 * (2^(n/2) + m) * log^m(2^(n/2) + m)");
        assert_eq!(sat.parameters.iter().collect::<Vec<_>>(), ["m"]);
    }
}
