//! Running-time bounds, reduction descriptors and closure composition.

mod claim;
mod expr;
mod formula;
mod ledger;

pub use claim::{compose_closure, minimum_necessary_set, FpiClaim, ParamMap, ReductionDescriptor, Slack};
pub use expr::{dominates, expr_compare, Affine, Atom, Comparison, Monomial, RuntimeExpr, Scope, Q, SIZE_VAR};
pub use formula::Formula;
pub use ledger::{parse_claim, parse_ledger, shipped_ledger, DIAMETER_CLAIM, LEDGER};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("syntax error at offset {pos} in `{input}`: {message}")]
    Syntax { input: String, pos: usize, message: String },

    #[error("unbound variable `{0}`")]
    Unbound(String),

    #[error("parameter `{0}` has no image under the parameter map")]
    Unmapped(String),

    #[error("unsupported form: {0}")]
    Unsupported(String),

    #[error("claim is for `{claim}` but the reduction targets `{target}`")]
    ProblemMismatch { claim: String, target: String },

    #[error("ledger row {row}: {message}")]
    Ledger { row: usize, message: String },

    #[error("invalid claim: {0}")]
    InvalidClaim(String),
}
