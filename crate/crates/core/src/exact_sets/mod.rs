//! Exact rational arithmetic and the algebra of finite unions of half-open
//! intervals in `[0,1)`. Every set built elsewhere in the crate is an
//! [`IntervalSet`].

pub mod big_decimal;
mod interval_set;
pub mod random;
mod rational;

pub use interval_set::{Interval, IntervalSet};
pub use rational::{rat, Rational};

#[cfg(test)]
mod proptests;
