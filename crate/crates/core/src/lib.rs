//! Transfer operators of piecewise expanding interval maps.
//!
//! The crate computes the growth sums `Theta^k(beta)` and topological
//! pressure, constructs eigenfunctions of the transfer operator from kernel
//! observables, evaluates p-variation and atomic Besov bounds, and reports
//! lower bounds for the essential spectral radius.

pub mod error;
pub mod fixtures;
pub mod function_norms;
pub mod interval_maps;
pub mod numeric;
pub mod observables;
pub mod transfer_operator;
pub mod registry;
pub mod spectral_bounds;
pub mod eigen_lab;

pub use error::{Error, Result};
