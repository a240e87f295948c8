//! CNF formulas in DIMACS form and the exhaustive satisfiability oracle.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Largest variable count the exhaustive oracles accept.
pub const MAX_BRUTE_VARS: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfInstance {
    /// Literals are nonzero integers in `[-num_vars, num_vars]`. Repeated
    /// literals inside a clause are collapsed; clause order is preserved.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidInstance("CNF needs at least one variable".into()));
        }
        let mut out = Vec::with_capacity(clauses.len());
        for (idx, clause) in clauses.into_iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidInstance(format!("clause {idx} is empty")));
            }
            let mut seen = BTreeSet::new();
            let mut lits = Vec::with_capacity(clause.len());
            for lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::InvalidInstance(format!(
                        "clause {idx} has literal {lit} outside [-{num_vars}, {num_vars}]"
                    )));
                }
                if seen.insert(lit) {
                    lits.push(lit);
                }
            }
            out.push(lits);
        }
        Ok(CnfInstance {
            num_vars,
            clauses: out,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// `assignment[v]` is the value of variable `v + 1`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&lit| assignment[lit.unsigned_abs() as usize - 1] == (lit > 0))
        })
    }
}

const DIMACS: &str = "dimacs";

/// Reads DIMACS CNF: `c` comment lines, a `p cnf n m` header, then clauses
/// terminated by `0` (a clause may span several lines).
pub fn parse_dimacs(text: &str) -> Result<CnfInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(DIMACS, line_no, "duplicate header"));
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 || f[0] != "p" || f[1] != "cnf" {
                return Err(Error::parse(DIMACS, line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let n = f[2]
                .parse()
                .map_err(|_| Error::parse(DIMACS, line_no, "bad variable count"))?;
            let m = f[3]
                .parse()
                .map_err(|_| Error::parse(DIMACS, line_no, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(DIMACS, line_no, "clause before `p cnf` header"));
        };
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| Error::parse(DIMACS, line_no, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::parse(DIMACS, line_no, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n {
                return Err(Error::parse(
                    DIMACS,
                    line_no,
                    format!("literal {lit} exceeds declared variable count {n}"),
                ));
            } else {
                current.push(lit);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(DIMACS, last_line.max(1), "missing header"))?;
    if !current.is_empty() {
        return Err(Error::parse(DIMACS, last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            DIMACS,
            last_line,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    CnfInstance::new(n, clauses).map_err(|e| Error::parse(DIMACS, last_line, e.to_string()))
}

pub fn write_dimacs(cnf: &CnfInstance) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for lit in c {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Tries every assignment in increasing binary order, where bit `v` of the
/// counter is the value of variable `v + 1`, and returns the first satisfying
/// one.
pub fn sat_brute(cnf: &CnfInstance) -> Result<Option<Vec<bool>>> {
    let n = cnf.num_vars;
    if n > MAX_BRUTE_VARS {
        return Err(Error::CapExceeded {
            what: "variable count",
            value: n,
            cap: MAX_BRUTE_VARS,
            hint: "",
        });
    }
    // Clause masks: a clause is satisfied by `x` iff x & pos != 0 or !x & neg != 0.
    let masks: Vec<(u32, u32)> = cnf
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(p, q), &lit| {
                let bit = 1u32 << (lit.unsigned_abs() - 1);
                if lit > 0 {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    for x in 0u64..(1u64 << n) {
        let x = x as u32;
        if masks.iter().all(|&(p, q)| x & p != 0 || !x & q != 0) {
            return Ok(Some((0..n).map(|v| x >> v & 1 == 1).collect()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_positive_clause() {
        let cnf = CnfInstance::new(1, vec![vec![1]]).unwrap();
        assert_eq!(sat_brute(&cnf).unwrap(), Some(vec![true]));
    }

    #[test]
    fn contradiction_is_unsat() {
        let cnf = CnfInstance::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(sat_brute(&cnf).unwrap(), None);
    }

    #[test]
    fn first_assignment_in_binary_order() {
        // (x1 or x2) and (not x1): counter 2 = x2 true, x1 false.
        let cnf = CnfInstance::new(2, vec![vec![1, 2], vec![-1]]).unwrap();
        assert_eq!(sat_brute(&cnf).unwrap(), Some(vec![false, true]));
    }

    #[test]
    fn refuses_over_cap() {
        let cnf = CnfInstance::new(31, vec![vec![31]]).unwrap();
        assert!(matches!(sat_brute(&cnf), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(CnfInstance::new(2, vec![vec![3]]).is_err());
        assert!(CnfInstance::new(2, vec![vec![0]]).is_err());
        assert!(CnfInstance::new(2, vec![vec![]]).is_err());
    }

    #[test]
    fn duplicate_literals_collapse() {
        let cnf = CnfInstance::new(2, vec![vec![1, 1, -2]]).unwrap();
        assert_eq!(cnf.clauses()[0], vec![1, -2]);
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c example\np cnf 3 2\n1 -2\n 3 0\n-1 0\n";
        let cnf = parse_dimacs(text).unwrap();
        assert_eq!(cnf.clauses(), &[vec![1, -2, 3], vec![-1]]);
        assert_eq!(parse_dimacs(&write_dimacs(&cnf)).unwrap(), cnf);
    }

    #[test]
    fn dimacs_errors_name_lines() {
        let err = parse_dimacs("p cnf 2 1\n1 5 0\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2\n").is_err());
    }
}
