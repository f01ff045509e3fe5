//! Exact extremal k-wise independent distributions for boolean functions.
//!
//! The crate computes the largest and smallest probability that a boolean
//! function outputs 1 under any k-wise independent distribution with a given
//! marginal, using an exact rational simplex method. Optima come with witness
//! distributions and dual polynomial certificates. The crate also evaluates
//! moment-problem bounds against those optima and builds k-wise independent
//! sample spaces from linear codes.

pub mod boolfn;
pub mod caps;
pub mod codes;
pub mod dist;
pub mod error;
pub mod extremal;
pub mod lp;
pub mod moments;
pub mod rational;
pub mod sweep;

pub use error::{Error, Result};
pub use rational::Rational;
