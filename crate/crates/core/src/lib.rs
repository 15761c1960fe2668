//! Geometrized SARAH: variance-reduced stochastic optimization for non-convex
//! finite sums.
//!
//! The crate is organised bottom-up:
//!
//! - [`data`]: sparse LibSVM datasets and a seeded synthetic generator.
//! - [`objective`]: the finite-sum interface and the non-convexly regularized
//!   logistic loss used by the benchmarks.
//! - [`random`]: splittable seeded streams, geometric epoch lengths, subset
//!   sampling and the tail-randomized output law.
//! - [`schedules`]: per-epoch step size and batch size rules.
//! - [`optimizers`]: the Geom-SARAH engine, the baselines and IFO accounting.
//! - [`bench`]: experiment orchestration, CSV/SVG output and the self-test
//!   suite behind `geom-sarah check`.
//!
//! Replicate-level work (method × seed grids, Monte-Carlo checks) fans out
//! through [`par`], which uses rayon when the `parallel` feature is enabled
//! and a plain loop otherwise. Results are always collected in index order,
//! so output is identical in both modes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod data;
mod error;
pub mod numfmt;
pub mod objective;
pub mod optimizers;
pub mod par;
pub mod random;
pub mod schedules;

pub use error::{Error, Result};
