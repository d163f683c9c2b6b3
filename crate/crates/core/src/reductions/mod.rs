//! Generators for example presentations and lower-bound constructions.

pub mod builtins;
pub(crate) mod encoding;
pub mod expspace;
pub mod machine;
pub(crate) mod regex;
pub mod two_expspace;

use serde::Serialize;

pub use builtins::{builtin, BUILTIN_NAMES};
pub use machine::{tiny_machines, Move, Transition, TuringMachine};

use crate::logic::{power_path_formula, unary_path_formula, Formula};
use crate::presentation::Presentation;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReductionMetadata {
    pub construction: String,
    pub input: String,
    /// Input length.
    pub n: usize,
    /// Number of rotation steps (`2ⁿ` unless overridden).
    pub m: usize,
    /// Tape cells available to the machine.
    pub cells: usize,
}

pub struct ReductionOutput {
    pub presentation: Presentation,
    pub sentence: Formula,
    pub metadata: ReductionMetadata,
}

/// `r^m(x, y)`: the succinct formula when `m = 2^exponent`, a plain path
/// otherwise.
pub(crate) fn power(r: &str, m: usize, exponent: Option<usize>, x: &str, y: &str) -> Formula {
    match exponent {
        Some(k) => power_path_formula(r, k, x, y),
        None => unary_path_formula(r, m, x, y),
    }
}
