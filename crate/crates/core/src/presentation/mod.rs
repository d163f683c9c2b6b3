//! Presentations of automatic structures and operations on them.

pub mod canonize;
pub mod degree;
pub mod gaifman;
pub mod growth;
pub mod model;
pub mod validate;

pub use canonize::{canonize, canonize_unchecked};
pub use degree::{max_degree, max_degree_by_search, DegreeResult, DEFAULT_DEGREE_CAP};
pub use gaifman::{gaifman_automaton, neighbors};
pub use growth::{growth, growth_series, GrowthResult};
pub use model::{Presentation, PresentationJson, Relation, RelationJson};
pub use validate::{validate, Check, Finding, ValidationReport};
