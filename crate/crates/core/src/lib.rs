//! Design and analysis machinery for order-of-addition experiments whose
//! component orders are restricted by group precedence and within-group
//! pairwise constraints.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, data ingestion and
//! the command-line front end live in the companion `oofa` crate.
//!
//! Module map:
//!
//! - [`perm`]: orders, constraint systems, feasible-set enumeration and counts.
//! - [`model`]: which pairwise-ordering (PWO) terms survive a constraint system.
//! - [`criteria`]: moment matrices, A/D/G values, closed forms, efficiencies.
//! - [`blocks`]: block designs and moment-equivalent component designs.
//! - [`constructions`]: the systematic fractional design constructions.
//! - [`measure_opt`]: D-optimal approximate measures and exact rounding.
//! - [`linalg`]: small dense float and exact-rational matrix kernels.

#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod blocks;
pub mod constructions;
pub mod criteria;
mod error;
pub mod linalg;
pub mod measure_opt;
pub mod model;
pub mod perm;

pub use error::{Error, Result};
pub use perm::{ConstraintSystem, FeasibleSet, GroupPartition, Label, Order, PairwiseConstraint};
pub use model::{ModelSpec, ModelVector};
