//! Rotation-element estimation.
//!
//! The rotation element of `f = R_alpha o (id + phi)` with respect to an
//! invariant measure `mu` is `alpha + sigma(r)` with `r = integral of phi dmu`.
//! Measures are realized operationally: Birkhoff averages along an orbit,
//! Dirac masses at fixed points, and Haar measure for rotations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::map::SolenoidMap;
use crate::dynamics::orbit::Orbit;
use crate::error::{Error, Result};
use crate::numbers::Rational;
use crate::solenoid::{is_irrational, SolenoidPoint, CHARACTER_TOLERANCE};

/// Tolerance for accepting a Dirac mass as a fixed point.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationEstimate {
    /// Leafwise part: the rotation element is `alpha + sigma(r)`.
    pub r: f64,
    pub alpha_fiber: SolenoidPoint,
    pub n_iterates: u64,
    /// Max deviation of partial averages over the last tenth of the orbit.
    pub ci_halfwidth: f64,
    pub method: String,
}

impl RotationEstimate {
    /// The rotation element `alpha + sigma(r)` as a point of the solenoid.
    pub fn element(&self) -> SolenoidPoint {
        self.alpha_fiber
            .shift_along_leaf(self.r)
            .expect("finite estimate")
    }

    /// Small-denominator rational equal to `r` as a double, if any.
    pub fn exact_r(&self) -> Option<Rational> {
        Rational::recover_from_f64(self.r, 1_000_000)
    }
}

/// Invariant-measure specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureSpec {
    Birkhoff { seed: SolenoidPoint, n: u64 },
    Dirac { point: SolenoidPoint },
    Haar,
}

/// `r = D_n / n` along the orbit of `z0`.
pub fn rotation_element_birkhoff(
    f: &SolenoidMap,
    z0: &SolenoidPoint,
    n: u64,
) -> Result<RotationEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Birkhoff estimate needs n >= 1".into(),
        ));
    }
    if let Some(c) = f.phi().constant_value() {
        // Every summand equals c.
        return Ok(RotationEstimate {
            r: c,
            alpha_fiber: f.alpha().clone(),
            n_iterates: n,
            ci_halfwidth: 0.0,
            method: "birkhoff".into(),
        });
    }
    let tail_start = ((0.9 * n as f64).ceil() as u64).max(1);
    let mut tail = Vec::with_capacity((n - tail_start + 1) as usize);
    let mut orbit = Orbit::new(f, z0.clone());
    while orbit.index() < n {
        orbit.advance();
        if orbit.index() >= tail_start {
            tail.push(orbit.displacement() / orbit.index() as f64);
        }
    }
    let r = orbit.displacement() / n as f64;
    let ci = tail.iter().map(|a| (a - r).abs()).fold(0.0, f64::max);
    Ok(RotationEstimate {
        r,
        alpha_fiber: f.alpha().clone(),
        n_iterates: n,
        ci_halfwidth: ci,
        method: "birkhoff".into(),
    })
}

/// Exact rotation element for maps whose displacement is constant, where
/// Haar measure is invariant.
pub fn rotation_element_exact_haar(f: &SolenoidMap) -> Result<RotationEstimate> {
    let c = f.phi().constant_value().ok_or(Error::HaarNotInvariant)?;
    Ok(RotationEstimate {
        r: c,
        alpha_fiber: f.alpha().clone(),
        n_iterates: 0,
        ci_halfwidth: 0.0,
        method: "haar".into(),
    })
}

/// Dirac mass at a fixed point of a map isotopic to the identity.
pub fn rotation_element_dirac(f: &SolenoidMap, point: &SolenoidPoint) -> Result<RotationEstimate> {
    if !f.is_isotopic_to_identity() {
        return Err(Error::NotIsotopicToIdentity);
    }
    let phi = f.displacement(point);
    if phi.abs() > FIXED_POINT_TOLERANCE {
        return Err(Error::NotFixed(phi));
    }
    Ok(RotationEstimate {
        r: phi,
        alpha_fiber: f.alpha().clone(),
        n_iterates: 1,
        ci_halfwidth: 0.0,
        method: "dirac".into(),
    })
}

pub fn rotation_element_for_measure(f: &SolenoidMap, mu: &MeasureSpec) -> Result<RotationEstimate> {
    match mu {
        MeasureSpec::Birkhoff { seed, n } => rotation_element_birkhoff(f, seed, *n),
        MeasureSpec::Dirac { point } => rotation_element_dirac(f, point),
        MeasureSpec::Haar => rotation_element_exact_haar(f),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationInterval {
    pub r_min: f64,
    pub r_max: f64,
    pub per_seed: Vec<RotationEstimate>,
    pub is_pseudo_irrational: bool,
    /// Denominator bound and depth used for the irrationality certificate.
    pub denominator_bound: u64,
    pub depth: u32,
    pub n: u64,
}

impl RotationInterval {
    pub fn width(&self) -> f64 {
        self.r_max - self.r_min
    }

    pub fn contains(&self, r: f64) -> bool {
        self.r_min <= r && r <= self.r_max
    }

    /// Estimate whose average is farthest from `tau`.
    pub fn extreme_seed(&self, tau: f64) -> Option<&RotationEstimate> {
        self.per_seed
            .iter()
            .max_by(|a, b| (a.r - tau).abs().total_cmp(&(b.r - tau).abs()))
    }
}

/// Min/max of Birkhoff estimates over `seeds`, with the pseudo-irrationality
/// flag `width < tolerance` and the left endpoint's element irrational up to
/// `denominator_bound` (clamped to the working depth).
pub fn rotation_interval(
    f: &SolenoidMap,
    seeds: &[SolenoidPoint],
    n: u64,
    tolerance: f64,
    denominator_bound: u64,
) -> Result<RotationInterval> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument(
            "rotation interval needs at least one seed".into(),
        ));
    }
    let per_seed = seeds
        .par_iter()
        .map(|z| rotation_element_birkhoff(f, z, n))
        .collect::<Result<Vec<_>>>()?;
    let r_min = per_seed.iter().map(|e| e.r).fold(f64::INFINITY, f64::min);
    let r_max = per_seed
        .iter()
        .map(|e| e.r)
        .fold(f64::NEG_INFINITY, f64::max);
    let depth = f.depth();
    let d = denominator_bound.min(depth as u64).max(1);
    let element = f.alpha().shift_along_leaf(r_min)?;
    let irrational = is_irrational(&element, d, CHARACTER_TOLERANCE)?.irrational;
    Ok(RotationInterval {
        r_min,
        r_max,
        per_seed,
        is_pseudo_irrational: (r_max - r_min) < tolerance && irrational,
        denominator_bound: d,
        depth,
        n,
    })
}
