//! Statistical experiments with seeded, reproducible reports.

pub mod checks;
mod experiments;
pub mod stats;
pub mod walk;

pub use experiments::*;
pub use stats::{chi_square_uniform, Histogram};
pub use walk::{abstract_walk_tau, WalkVariant};
