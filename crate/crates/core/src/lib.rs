//! Food–energy–water nexus (FEWN) many-objective optimization.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`nexus`]: the FEWN problem (topology, flow encoding, intensity objectives),
//! - [`evo`]: dominance, non-dominated sorting, reference vectors, variation
//!   operators and reference-vector environmental selection,
//! - [`solvers`]: reference-guided, reformulated-DVA and inverse-model solver
//!   variants plus a random-search baseline behind a single [`solvers::run`] driver,
//! - [`indicators`]: exact and Monte Carlo hypervolume, normalization and the
//!   rank-sum comparison used for result tables.
//!
//! IO, configuration files and the command-line runner live in the `nexus-opt`
//! companion crate.

#![no_std]

extern crate alloc;

mod error;
pub mod evo;
pub mod indicators;
pub mod linalg;
pub mod nexus;
pub mod problem;
pub mod solvers;

pub use error::{Error, Result};
pub use problem::{Bounds, Problem};
