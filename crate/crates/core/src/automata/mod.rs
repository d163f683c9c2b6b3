//! Multi-track automata over convolutions of words.

pub mod alphabet;
pub mod explore;
pub mod guard;
pub mod image;
pub mod nfa;
pub mod ops;
pub mod word;

pub use alphabet::{Alphabet, Symbol, SymbolSet};
pub use guard::Cube;
pub use nfa::{AutomatonJson, Nfa, StateId};
pub use word::{convolve, ConvWord};
