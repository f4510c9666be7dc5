//! Lattices, simplex triangulations, toric fans and stacky invariants.

pub mod cli;
pub mod error;
#[allow(clippy::needless_range_loop)]
mod exact;
pub mod fan;
pub mod glue;
pub mod lattice;
pub mod mckay;
mod placing;
pub mod render;
pub mod simplex;
pub mod symmetric;
pub mod tower;
pub mod triangulation;

pub use error::{Error, Result};
