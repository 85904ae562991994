//! Exact arithmetic kernels: rationals and truncated profinite integers.

mod profinite;
mod rational;

pub use profinite::{factorial, ProfiniteInt, DEFAULT_DEPTH, MAX_DEPTH};
pub use rational::Rational;
