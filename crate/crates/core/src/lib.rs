pub mod cli;
pub mod dense;
pub mod error;
pub mod graph;
pub mod lu;
pub mod measures;
pub mod optimizer;
pub mod pauli;
pub mod statstest;

pub use error::{Error, Result};
