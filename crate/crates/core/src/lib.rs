//! Exact uniform sampling of sink-free orientations by sink popping, with
//! cycle popping for directed spanning trees, exact Markov-chain oracles for
//! small graphs, and a seeded experiment harness.
//!
//! ```
//! use sinkpop::graph::GraphKind;
//! use sinkpop::popper::{sample_fast, ChoiceRule, PopperConfig};
//!
//! let g = GraphKind::Theta(3).build().unwrap();
//! let run = sample_fast(&g, 42, ChoiceRule::QueueFifo, &PopperConfig::default()).unwrap();
//! assert!(run.sfo.is_sink_free(&g));
//! ```

pub mod cli;
pub mod cycle;
pub mod error;
pub mod format;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod popper;
pub mod stacks;

pub use error::{Error, Result};
