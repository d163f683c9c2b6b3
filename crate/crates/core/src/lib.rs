//! Model checking first-order logic over string automatic structures.

pub mod automata;
pub mod checker;
pub mod error;
pub mod fragments;
pub mod logic;
pub mod presentation;
pub mod reductions;

pub use error::{Error, Result};
