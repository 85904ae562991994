//! Solenoid homeomorphisms isotopic to translations and their rotation theory.

pub mod bmv;
pub mod denjoy;
pub mod displacement;
pub mod fixed;
pub mod map;
pub mod orbit;
pub mod rotation;

pub use bmv::{
    bmv_deviations, conjugacy_defect, least_squares_slope, semiconjugacy_sup, BmvReport,
    SemiconjugacyPoint,
};
pub use denjoy::DenjoyDisplacement;
pub use displacement::{CharacterPolynomial, Displacement, LevelPeriodicTable, PolyTerm};
pub use fixed::find_fixed_point;
pub use map::{ConjugatedDisplacement, SolenoidMap};
pub use orbit::{iterate, orbit_segment, DisplacementSum, Orbit, OrbitRecord};
pub use rotation::{
    rotation_element_birkhoff, rotation_element_dirac, rotation_element_exact_haar,
    rotation_element_for_measure, rotation_interval, MeasureSpec, RotationEstimate,
    RotationInterval,
};
