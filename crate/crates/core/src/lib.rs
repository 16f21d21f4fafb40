//! Spectral gaps, Cheeger constants, distances and random-walk mixing on
//! planar graphs built from subdivided binary trees with level paths.
//!
//! The crate is organised around four pieces:
//!
//! - [`graph`]: weighted graphs, the hat-tree family and its level quotients,
//!   planarity testing and text formats;
//! - [`spectral`]: the vertex-weighted Laplacian, its smallest non-zero
//!   eigenvalue (dense and iterative), Cheeger constants;
//! - [`walk`]: hop distances and the lazy simple random walk;
//! - [`certify`]: numeric certificates for the gap bound on hat trees and
//!   the distance/eigenvalue product on planar graphs.

pub mod certify;
pub mod error;
pub mod graph;
pub mod rng;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};

/// Library version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
