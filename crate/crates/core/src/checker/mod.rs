//! Model checkers for first-order sentences.

pub mod classic;
pub mod local;

pub use classic::{decide_classic, ClassicChecker, ClassicOptions, ClassicStats, Definable};
pub use local::{decide_local, LocalChecker, LocalOptions, LocalStats};
