//! First-order formulas: syntax, parsing, and structural analysis.

pub mod formula;
pub mod parse;
pub mod paths;
pub mod prenex;

pub use formula::{Formula, FragmentClass, Quantifier};
pub use parse::parse_formula;
pub use paths::{power_path_formula, unary_path_formula};
pub use prenex::{prenex, Prenex};
