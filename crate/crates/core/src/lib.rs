//! Computation on the universal one-dimensional solenoid and Poincaré rotation
//! theory for its homeomorphisms isotopic to translations.
//!
//! * [`numbers`]: exact rationals and truncated profinite integers.
//! * [`solenoid`]: points, characters, the invariant metric and irrationality tests.
//! * [`dynamics`]: maps `R_alpha o (id + phi)`, orbits, rotation elements, BMV and semiconjugacy.
//! * [`suspension`]: the suspension flow, character cocycles and the homomorphism `H`.
//! * [`diagnostics`]: minimal-set probe, Weyl sums, circle oracle, conjugation harness.
//! * [`registry`]: name-keyed displacement kinds and rotation estimators.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod numbers;
pub mod registry;
pub mod solenoid;
pub mod suspension;

pub use error::{Error, Result};
