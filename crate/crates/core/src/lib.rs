//! Integral-geometric invariants of minimal submanifolds in Euclidean space.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod ends;
pub mod error;
pub mod geom;
pub mod integral_geom;
pub mod invariants;
pub mod numeric;
pub mod stats;
pub mod vector;

pub use error::{Error, Result};
pub use vector::AmbientVector;
