//! Convex hulls of Gaussian sequences and their normalized limit sets.
//!
//! The hull of `X_1, …, X_n` is tracked through its support function on a
//! fixed direction grid ([`tracker`]), normalized by `b(n) = sqrt(2 ln n)` or
//! another [`normalizers::Normalizer`], and compared with a limit set
//! (concentration ellipsoid, symmetric polytope or interval) by Hausdorff
//! distance ([`geometry`]). [`experiments`] runs many seeded paths of the
//! generators in [`sequences`] and aggregates the resulting curves.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod normalizers;
pub mod par;
pub mod rng;
pub mod sequences;
pub mod tracker;

pub use error::{Error, Result};
