//! Network-based multi-objective evolutionary algorithms, run serially or as
//! an island model distributed over a master-worker runtime.

pub mod distribution;
pub mod emo_strategy;
pub mod engine;
pub mod error;
pub mod harness;
pub mod objective;
pub mod operators;
pub mod problems;
pub mod strategy;
pub mod topology;

pub use error::{Error, Result};
