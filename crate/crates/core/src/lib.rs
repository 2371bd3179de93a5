//! Class memory automata and their relatives over flat and nested data words.

pub mod cca;
pub mod cli;
pub mod cma;
pub mod coverability;
pub mod data;
pub mod dataaut;
pub mod error;
pub mod format;
pub mod homca;
pub mod hra;
pub mod ndcma;
pub mod petrinet;
pub mod sample;
pub mod saturation;
pub mod tree;
pub mod wsts;

pub use error::{Error, Result};
