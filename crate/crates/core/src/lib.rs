//! Perturbation bounds for low-rank matrix approximation.
//!
//! The crate is layered bottom-up:
//!
//! - [`dense`]: column-major matrices, one-sided Jacobi SVD, QR, pseudoinverse,
//!   best rank-k truncation and orthogonal complements.
//! - [`schatten`]: Schatten p-norms for integer p and p = ∞.
//! - [`subspaces`]: orthogonal projectors, principal angles and the
//!   block dimensions of the CS decomposition.
//! - [`generate`]: seeded test-instance factories.
//! - [`checkers`]: one function per bound, each returning a [`checkers::BoundReport`].
//! - [`harness`]: batch runs over a JSON suite configuration with CSV/JSONL reports.

pub mod dense;
mod error;

pub use error::{Error, Result};
pub mod schatten;
pub mod subspaces;
pub mod generate;
pub mod checkers;
pub mod harness;
