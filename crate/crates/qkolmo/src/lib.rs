//! Exact simulation of small quantum Turing machines, their halting subspaces,
//! prefix and standard compression, a universal encode/decode construction,
//! complexity bounds and typical-subspace experiments.

pub mod brudno;
pub mod caps;
pub mod cli;
pub mod coding;
pub mod error;
pub mod halting;
pub mod linalg;
pub mod pipeline;
pub mod qtm;

pub use caps::Caps;
pub use error::{Error, Result};
