//! Affine preferential attachment trees and seed recognition.
//!
//! Trees grow by attaching each new vertex to an existing vertex `u` with
//! probability proportional to `deg(u) - 1 + α`. The crate samples such
//! trees, counts decorated-subtree observables exactly, evaluates their
//! expectations by an exact recurrence, and builds observables whose
//! distributions separate two different seed trees.

pub mod alpha;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod growth;
pub mod moments;
pub mod observables;
pub mod rng;
pub mod seedtest;
pub mod trees;

pub use alpha::AlphaParam;
pub use error::{Error, Result};
