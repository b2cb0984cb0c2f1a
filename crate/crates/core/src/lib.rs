//! Solvers for the uniform 2-dimensional vector multiple knapsack problem (2VMK).
//!
//! An instance is a set of items, each with a weight in `[0,1]^2` and a
//! nonnegative profit, together with `m` unit bins. A solution assigns to
//! every bin a configuration (a subset of items whose weight is at most
//! `(1,1)` in both coordinates); the profit of a solution counts every
//! distinct packed item once.
//!
//! The crate is organised around the pipeline of the hybrid algorithm:
//!
//! * [`model`] holds instances, configurations, solutions and their file formats.
//! * [`pricing`] is the 2-D knapsack oracle used to generate columns.
//! * [`clp`] solves the configuration LP by column generation on top of
//!   the dense revised simplex in [`simplex`], and samples configurations
//!   distributed by the fractional solution.
//! * [`mk`] covers everything one-dimensional: associated multiple knapsack
//!   instances, configuration splitting, exact and heuristic MK solvers, and
//!   2-D First-Fit.
//! * [`solvers`] contains the top-level algorithms (hybrid, sampling
//!   baseline, reduction, the ε-nice wrapper, the multiple-choice reduction
//!   and an exact oracle).
//! * [`bench`] generates instances and runs ratio, marginal-profit and
//!   concentration experiments.

pub mod bench;
pub mod clp;
pub mod error;
pub mod mk;
pub mod model;
pub mod pricing;
pub mod rng;
pub mod simplex;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{Configuration, Item, Vmk2Instance, Vmk2Solution};
