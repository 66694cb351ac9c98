//! Exact interval-set constructions of sequences whose limsup sets cannot be
//! told apart by finitely many intersection measures, together with
//! verifiers for the identities they satisfy and evaluators for classical
//! Borel–Cantelli style lower bounds.
//!
//! Everything is computed with exact rationals. Sets are finite unions of
//! half-open intervals in `[0,1)`.

pub mod bc_bounds;
pub mod block_family;
pub mod caps;
pub mod error;
pub mod exact_sets;
pub mod incl_excl;
pub mod nested_family;
pub mod parity_family;
pub mod t12_family;
pub mod tuples;

pub use error::{Error, Result};
pub use exact_sets::{rat, Interval, IntervalSet, Rational};
