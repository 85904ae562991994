//! Leafwise displacement functions `phi` with `f = R_alpha o (id + phi)`.
//!
//! Every kind implements [`Displacement`] and is constructed by name through
//! [`crate::registry::DisplacementRegistry`].

use std::f64::consts::TAU;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::numbers::{factorial, Rational};
use crate::solenoid::{Character, SolenoidPoint};

/// A continuous real function on the solenoid used as a leafwise shift.
pub trait Displacement: Debug + Send + Sync {
    /// Registry name of this kind.
    fn kind(&self) -> &'static str;

    fn eval(&self, z: &SolenoidPoint) -> f64;

    /// Smallest level `j` such that `phi` only depends on the level-`j`
    /// coordinate of the point, if such a level exists.
    fn factor_level(&self) -> Option<u32>;

    /// `phi` as a `j!`-periodic function of the level coordinate `u`, for any
    /// `j` at or above [`Displacement::factor_level`].
    fn eval_level(&self, level: u32, u: f64) -> Result<f64>;

    /// `Some(c)` when `phi` is identically `c`.
    fn constant_value(&self) -> Option<f64> {
        None
    }

    /// Part of `phi` that is constant; orbit sums accumulate it by
    /// multiplication so that pure rotations are exact.
    fn constant_part(&self) -> f64 {
        0.0
    }

    /// Integral against Haar measure, when known in closed form.
    fn haar_mean(&self) -> Option<f64> {
        None
    }

    /// Upper bound for `sup |phi|`.
    fn sup_abs(&self) -> f64;

    /// Continuity and leafwise-monotonicity checks at depth `depth`.
    fn validate(&self, depth: u32) -> Result<()>;

    fn to_json(&self) -> Value;
}

/// `ceil` of the level needed to resolve a denominator `b`: smallest `j` with `b | j!`.
pub fn level_for_denominator(b: &BigInt) -> u32 {
    let b = b.magnitude();
    let mut j = 1;
    while !(factorial(j) % b).is_zero() {
        j += 1;
    }
    j
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub q: Rational,
    #[serde(rename = "A", alias = "a", default)]
    pub cos: f64,
    #[serde(rename = "B", alias = "b", default)]
    pub sin: f64,
}

#[derive(Clone, Debug)]
struct TermCache {
    q: f64,
    numer: BigInt,
    denom: BigInt,
    denom_u64: Option<u64>,
    numer_mod: u64,
}

/// `phi(z) = c + sum_j [A_j cos(2 pi theta_j(z)) + B_j sin(2 pi theta_j(z))]`
/// with `theta_j` the phase of the character `chi_{q_j}`.
#[derive(Clone, Debug)]
pub struct CharacterPolynomial {
    constant: f64,
    terms: Vec<PolyTerm>,
    cache: Vec<TermCache>,
}

impl CharacterPolynomial {
    pub fn new(constant: f64, terms: Vec<PolyTerm>) -> Result<Self> {
        if !constant.is_finite()
            || terms
                .iter()
                .any(|t| !t.cos.is_finite() || !t.sin.is_finite())
        {
            return Err(Error::InvalidDisplacement("non-finite coefficient".into()));
        }
        let cache = terms
            .iter()
            .map(|t| {
                let denom = t.q.denom().clone();
                let denom_u64 = denom.to_u64();
                let numer_mod = denom_u64
                    .map(|b| {
                        t.q.numer()
                            .mod_floor(&BigInt::from(b))
                            .to_u64()
                            .unwrap_or(0)
                    })
                    .unwrap_or(0);
                TermCache {
                    q: t.q.to_f64(),
                    numer: t.q.numer().clone(),
                    denom,
                    denom_u64,
                    numer_mod,
                }
            })
            .collect();
        Ok(CharacterPolynomial {
            constant,
            terms,
            cache,
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(c, Vec::new())
    }

    pub fn terms(&self) -> &[PolyTerm] {
        &self.terms
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    fn phase(&self, k: usize, z: &SolenoidPoint) -> f64 {
        let c = &self.cache[k];
        let fiber = match c.denom_u64 {
            Some(b) => {
                let r = z.t().residue_mod_u64(b) as u128;
                ((c.numer_mod as u128 * r) % b as u128) as f64 / b as f64
            }
            None => {
                let r = BigInt::from(z.t().residue_mod(c.denom.magnitude()));
                let num = (&c.numer * r).mod_floor(&c.denom);
                num.to_f64().unwrap_or(0.0) / c.denom.to_f64().unwrap_or(f64::INFINITY)
            }
        };
        c.q * z.x() + fiber
    }

    fn derivative_bound(&self) -> f64 {
        self.terms
            .iter()
            .zip(&self.cache)
            .map(|(t, c)| TAU * c.q.abs() * (t.cos.abs() + t.sin.abs()))
            .sum()
    }
}

impl Displacement for CharacterPolynomial {
    fn kind(&self) -> &'static str {
        "poly"
    }

    fn eval(&self, z: &SolenoidPoint) -> f64 {
        let mut acc = 0.0;
        for (k, t) in self.terms.iter().enumerate() {
            if t.cos == 0.0 && t.sin == 0.0 {
                continue;
            }
            let (s, c) = (TAU * self.phase(k, z)).sin_cos();
            acc += t.cos * c + t.sin * s;
        }
        self.constant + acc
    }

    fn factor_level(&self) -> Option<u32> {
        Some(
            self.cache
                .iter()
                .map(|c| level_for_denominator(&c.denom))
                .max()
                .unwrap_or(1),
        )
    }

    fn eval_level(&self, level: u32, u: f64) -> Result<f64> {
        if self.factor_level().is_some_and(|j| level < j) {
            return Err(Error::DoesNotFactor(level));
        }
        Ok(self.constant
            + self
                .terms
                .iter()
                .zip(&self.cache)
                .map(|(t, c)| {
                    let (s, co) = (TAU * c.q * u).sin_cos();
                    t.cos * co + t.sin * s
                })
                .sum::<f64>())
    }

    fn constant_value(&self) -> Option<f64> {
        self.terms
            .iter()
            .all(|t| t.cos == 0.0 && t.sin == 0.0)
            .then_some(self.constant)
    }

    fn constant_part(&self) -> f64 {
        self.constant
    }

    fn haar_mean(&self) -> Option<f64> {
        // Nontrivial characters integrate to zero; q = 0 terms are constants.
        let extra: f64 = self
            .terms
            .iter()
            .filter(|t| t.q.is_zero())
            .map(|t| t.cos)
            .sum();
        Some(self.constant + extra)
    }

    fn sup_abs(&self) -> f64 {
        self.constant.abs()
            + self
                .terms
                .iter()
                .map(|t| t.cos.abs() + t.sin.abs())
                .sum::<f64>()
    }

    fn validate(&self, depth: u32) -> Result<()> {
        for t in &self.terms {
            Character::new(t.q.clone()).check_resolvable(depth)?;
        }
        let bound = self.derivative_bound();
        if bound >= 1.0 {
            return Err(Error::InvalidDisplacement(format!(
                "leafwise monotonicity not guaranteed: sum 2 pi |q| (|A| + |B|) = {bound} >= 1"
            )));
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        serde_json::json!({
            "kind": "poly",
            "c": self.constant,
            "terms": self.terms,
        })
    }
}

/// `phi(z) = psi(level_project(z, j) / j!)` with `psi` the piecewise-linear
/// interpolation of `M + 1` samples on `[0, 1]` whose endpoints agree.
#[derive(Clone, Debug)]
pub struct LevelPeriodicTable {
    level: u32,
    samples: Vec<f64>,
    period: f64,
}

/// Endpoint mismatch allowed for a table.
pub const TABLE_ENDPOINT_TOLERANCE: f64 = 1e-12;

impl LevelPeriodicTable {
    pub fn new(level: u32, samples: Vec<f64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidDisplacement(
                "table level must be >= 1".into(),
            ));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidDisplacement(
                "table needs at least two samples".into(),
            ));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDisplacement("non-finite table sample".into()));
        }
        let period = factorial(level)
            .to_f64()
            .ok_or_else(|| Error::InvalidDisplacement("table level too large".into()))?;
        Ok(LevelPeriodicTable {
            level,
            samples,
            period,
        })
    }

    /// Samples `psi` at `M + 1` equally spaced points of `[0, 1]`.
    pub fn from_fn(level: u32, m: usize, psi: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..=m).map(|k| psi(k as f64 / m as f64)).collect();
        Self::new(level, samples)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn interpolate(&self, s: f64) -> f64 {
        let m = self.samples.len() - 1;
        let s = s.rem_euclid(1.0);
        let pos = s * m as f64;
        let k = (pos.floor() as usize).min(m - 1);
        let w = pos - k as f64;
        self.samples[k] * (1.0 - w) + self.samples[k + 1] * w
    }
}

impl Displacement for LevelPeriodicTable {
    fn kind(&self) -> &'static str {
        "table"
    }

    fn eval(&self, z: &SolenoidPoint) -> f64 {
        let u = z
            .level_project(self.level)
            .expect("table level validated against depth");
        self.interpolate(u / self.period)
    }

    fn factor_level(&self) -> Option<u32> {
        Some(self.level)
    }

    fn eval_level(&self, level: u32, u: f64) -> Result<f64> {
        if level < self.level {
            return Err(Error::DoesNotFactor(level));
        }
        Ok(self.interpolate(u / self.period))
    }

    fn sup_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    fn validate(&self, depth: u32) -> Result<()> {
        if self.level > depth {
            return Err(Error::CannotRefine {
                requested: self.level,
                depth,
            });
        }
        let first = self.samples[0];
        let last = *self.samples.last().expect("nonempty");
        if (first - last).abs() > TABLE_ENDPOINT_TOLERANCE {
            return Err(Error::InvalidDisplacement(format!(
                "table endpoints differ: psi(0) = {first}, psi(1) = {last}"
            )));
        }
        let m = (self.samples.len() - 1) as f64;
        let min_slope = self
            .samples
            .windows(2)
            .map(|w| (w[1] - w[0]) * m / self.period)
            .fold(f64::INFINITY, f64::min);
        if 1.0 + min_slope <= 0.0 {
            return Err(Error::InvalidDisplacement(format!(
                "leaf map not increasing: min slope 1 + psi' = {}",
                1.0 + min_slope
            )));
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        serde_json::json!({
            "kind": "table",
            "level": self.level,
            "samples": self.samples,
        })
    }
}
