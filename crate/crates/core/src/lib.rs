//! Joint estimation of a time-varying graph signal with missing entries and
//! the weighted graph Laplacian that makes its temporal increments smooth.
//!
//! The [`solver`] alternates a closed-form majorize-minimize step on the
//! signal with a multiplicative step on the edge weights. [`synth`] and
//! [`metrics`] provide the synthetic benchmark pipeline, and [`io`],
//! [`config`] and [`commands`] back the `graphfill` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod objective;
pub mod signal;
pub mod solver;
pub mod synth;
pub mod temporal;

pub use error::{Error, Result};
pub use graph::{EdgeWeights, LaplacianMatrix};
pub use objective::Hyperparams;
pub use signal::{Mask, SignalMatrix};
pub use solver::{solve, SolverConfig, SolverResult, Termination};
