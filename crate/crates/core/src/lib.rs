//! Robin-Laplacian eigenvalues and optimal multiphase partitions on
//! Cartesian grids.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod eigen;
pub mod energy;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod optimizer;

pub use error::{Error, Result};
pub use field::PhaseField;
