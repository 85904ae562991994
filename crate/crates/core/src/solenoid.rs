//! The universal one-dimensional solenoid `S = (R x Zhat) / Z`.
//!
//! A point is stored in canonical form `(x, t)` with `x` in `[0, 1)` and `t`
//! a depth-`K` profinite integer. The integer `g` acts by `(x + g, t - g)`.

use std::f64::consts::TAU;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::{factorial, ProfiniteInt, Rational};

/// Default tolerance below which a character value counts as `1`.
pub const CHARACTER_TOLERANCE: f64 = 1e-9;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SolenoidPoint {
    x: f64,
    t: ProfiniteInt,
}

impl SolenoidPoint {
    /// Moves `(x, t)` along its `Z`-orbit so that the leaf coordinate lands in `[0, 1)`.
    pub fn canonicalize(x: f64, t: ProfiniteInt) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let mut g = x.floor();
        let mut rem = x - g;
        // x slightly below an integer can round up to exactly 1.
        if rem >= 1.0 {
            rem = 0.0;
            g += 1.0;
        }
        let t = if g == 0.0 {
            t
        } else if g.abs() < 9.0e15 {
            t.add_integer(g as i64)
        } else {
            let big = BigInt::from_f64(g).ok_or(Error::NonFinite(x))?;
            t.add(&ProfiniteInt::new(t.depth(), big)?)?
        };
        Ok(SolenoidPoint { x: rem, t })
    }

    pub fn identity(depth: u32) -> Result<Self> {
        Ok(SolenoidPoint {
            x: 0.0,
            t: ProfiniteInt::zero(depth)?,
        })
    }

    /// Image of `r` under the embedding of the base leaf `R -> S`.
    pub fn base_leaf(r: f64, depth: u32) -> Result<Self> {
        Self::canonicalize(r, ProfiniteInt::zero(depth)?)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn t(&self) -> &ProfiniteInt {
        &self.t
    }

    pub fn depth(&self) -> u32 {
        self.t.depth()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0.0 && self.t.is_zero()
    }

    /// Whether the point lies on the base leaf at the working depth.
    pub fn on_base_leaf(&self) -> bool {
        self.t.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let t = self.t.add(&other.t)?;
        Self::canonicalize(self.x + other.x, t)
    }

    pub fn neg(&self) -> Self {
        Self::canonicalize(-self.x, self.t.neg()).expect("finite by invariant")
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Moves the point a signed distance `dx` along its leaf.
    pub fn shift_along_leaf(&self, dx: f64) -> Result<Self> {
        Self::canonicalize(self.x + dx, self.t.clone())
    }

    /// Coordinate on the level-`j` covering circle `R / j!Z`.
    pub fn level_project(&self, j: u32) -> Result<f64> {
        if j > self.depth() {
            return Err(Error::CannotRefine {
                requested: j,
                depth: self.depth(),
            });
        }
        let m = factorial(j);
        let r = self.t.residue_mod(m);
        let r = r.to_f64().unwrap_or(f64::INFINITY);
        let m = m.to_f64().unwrap_or(f64::INFINITY);
        // x + r < m already, since x < 1 and r <= m - 1.
        Ok((self.x + r) % m)
    }

    /// Translation-invariant distance at the working depth.
    ///
    /// `d(z, w) = min over g in {-1, 0, 1} of |z.x - w.x + g| + dZ(z.t - w.t - g)`
    /// where `dZ(u) = 2^-max{j <= K : j! | u}` and `dZ(0) = 0`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let dt = self.t.sub(&other.t)?;
        let dx = self.x - other.x;
        let best = [-1i64, 0, 1]
            .iter()
            .map(|&g| (dx + g as f64).abs() + profinite_distance(&dt.add_integer(-g)))
            .fold(f64::INFINITY, f64::min);
        Ok(best)
    }

    /// Checks the leaf coordinate and fiber against another point within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other).map(|d| d <= tol).unwrap_or(false)
    }
}

impl fmt::Display for SolenoidPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.t)
    }
}

/// Ultrametric norm on the depth-`K` profinite integers.
pub fn profinite_distance(u: &ProfiniteInt) -> f64 {
    match u.factorial_valuation() {
        None => 0.0,
        Some(j) => 0.5f64.powi(j as i32),
    }
}

/// A character `chi_q` of the solenoid, indexed by a rational `q = a/b`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character {
    pub q: Rational,
}

impl Character {
    pub fn new(q: Rational) -> Self {
        Character { q }
    }

    pub fn trivial() -> Self {
        Character {
            q: Rational::zero(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_resolvable(&self, depth: u32) -> bool {
        let b = self.q.denom_unsigned();
        (factorial(depth) % &b).is_zero()
    }

    pub fn check_resolvable(&self, depth: u32) -> Result<()> {
        if self.is_resolvable(depth) {
            Ok(())
        } else {
            Err(Error::Unresolvable(self.q.to_string(), depth))
        }
    }

    /// Fiber part of the phase, `a * (t mod b) / b` reduced to `[0, 1)` exactly.
    fn fiber_phase(&self, t: &ProfiniteInt) -> BigRational {
        let b: BigUint = self.q.denom_unsigned();
        let a = self.q.numer();
        let r = BigInt::from(t.residue_mod(&b));
        let bi = BigInt::from(b);
        let num = (a * r).mod_floor(&bi);
        BigRational::new(num, bi)
    }

    /// Phase `theta` in `[0, 1)` with `chi_q(z) = exp(2 pi i theta)`.
    pub fn phase(&self, z: &SolenoidPoint) -> Result<f64> {
        self.check_resolvable(z.depth())?;
        let fiber = self.fiber_phase(z.t()).to_f64().unwrap_or(0.0);
        let leaf = (self.q.to_f64() * z.x()).rem_euclid(1.0);
        Ok((leaf + fiber).rem_euclid(1.0))
    }

    /// Exact phase, treating the double `z.x` as the dyadic rational it is.
    pub fn exact_phase(&self, z: &SolenoidPoint) -> Result<Rational> {
        self.check_resolvable(z.depth())?;
        let x = BigRational::from_float(z.x()).ok_or(Error::NonFinite(z.x()))?;
        let total = self.q.as_big() * x + self.fiber_phase(z.t());
        Ok(Rational::from_big(&total - total.floor()))
    }

    pub fn eval(&self, z: &SolenoidPoint) -> Result<Complex64> {
        Ok(Complex64::from_polar(1.0, TAU * self.phase(z)?))
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi[{}]", self.q)
    }
}

/// Outcome of an irrationality (monothetic generator) test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrrationalityReport {
    pub irrational: bool,
    /// First `q` (ordered by denominator, then numerator) with `chi_q(z) = 1`.
    pub witness: Option<Rational>,
    pub denominator_bound: u64,
    pub depth: u32,
}

/// Certifies that no character `chi_q` with `q = a/b`, `1 <= b <= D`,
/// `0 < a <= b * D`, takes the value `1` at `z` (within `tol`).
///
/// Only positive numerators are scanned since `chi_{-q}` is the conjugate of
/// `chi_q`. The result is a certification up to `(D, K)`, not a proof of density.
pub fn is_irrational(
    z: &SolenoidPoint,
    denominator_bound: u64,
    tol: f64,
) -> Result<IrrationalityReport> {
    if denominator_bound == 0 {
        return Err(Error::InvalidArgument(
            "denominator bound must be positive".into(),
        ));
    }
    let depth = z.depth();
    let x = BigRational::from_float(z.x()).ok_or(Error::NonFinite(z.x()))?;
    for b in 1..=denominator_bound {
        let chi_b = Character::new(Rational::new(1, b as i64)?);
        chi_b.check_resolvable(depth)?;
        for a in 1..=b * denominator_bound {
            if a.gcd(&b) != 1 {
                continue;
            }
            let q = Rational::new(a as i64, b as i64)?;
            let chi = Character::new(q.clone());
            let phase = q.as_big() * &x + chi.fiber_phase(z.t());
            let frac = &phase - phase.floor();
            let dist = frac
                .to_f64()
                .unwrap_or(0.5)
                .min(1.0 - frac.to_f64().unwrap_or(0.5));
            if frac.is_zero() || dist.abs() < tol {
                return Ok(IrrationalityReport {
                    irrational: false,
                    witness: Some(q),
                    denominator_bound,
                    depth,
                });
            }
        }
    }
    Ok(IrrationalityReport {
        irrational: true,
        witness: None,
        denominator_bound,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, k: u32, r: i64) -> SolenoidPoint {
        SolenoidPoint::canonicalize(x, ProfiniteInt::new(k, r).unwrap()).unwrap()
    }

    fn chi(a: i64, b: i64) -> Character {
        Character::new(Rational::new(a, b).unwrap())
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(pt(1.25, 3, 0), pt(0.25, 3, 1));
        assert_eq!(pt(0.5, 3, 2).t().residue(), &BigUint::from(2u32));
        let z = pt(-0.25, 3, 0);
        assert_eq!(z.x(), 0.75);
        assert_eq!(z.t().residue(), &BigUint::from(5u32));
        assert!(SolenoidPoint::canonicalize(f64::NAN, ProfiniteInt::zero(3).unwrap()).is_err());
    }

    #[test]
    fn canonicalize_tiny_negative() {
        let z = pt(-1e-20, 3, 0);
        assert!(z.x() >= 0.0 && z.x() < 1.0);
    }

    #[test]
    fn add_examples() {
        let a = pt(0.75, 3, 0);
        assert_eq!(a.add(&a).unwrap(), pt(0.5, 3, 1));
        let id = SolenoidPoint::identity(3).unwrap();
        assert_eq!(a.add(&id).unwrap(), a);
        let b = pt(0.5, 3, 3);
        assert_eq!(b.add(&b).unwrap(), pt(0.0, 3, 1));
        assert!(a.add(&pt(0.1, 4, 0)).is_err());
    }

    #[test]
    fn base_leaf_examples() {
        assert!(SolenoidPoint::base_leaf(0.0, 3).unwrap().is_identity());
        assert_eq!(SolenoidPoint::base_leaf(2.5, 3).unwrap(), pt(0.5, 3, 2));
    }

    #[test]
    fn char_eval_examples() {
        let z = SolenoidPoint::base_leaf(1.0, 3).unwrap();
        let v = chi(1, 2).eval(&z).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let id = SolenoidPoint::identity(3).unwrap();
        assert_eq!(chi(5, 6).eval(&id).unwrap(), Complex64::new(1.0, 0.0));
        let w = pt(0.0, 3, 1);
        let expect = Complex64::from_polar(1.0, TAU / 6.0);
        assert!((chi(1, 6).eval(&w).unwrap() - expect).norm() < 1e-15);
        assert!((chi(1, 6).eval(&z).unwrap() - expect).norm() < 1e-15);
    }

    #[test]
    fn unresolvable_character() {
        let z = pt(0.1, 3, 0);
        let err = chi(1, 7).eval(&z).unwrap_err();
        assert!(err.to_string().contains("not resolvable at this depth"));
        assert!(chi(1, 4).eval(&z).is_err());
        assert!(chi(1, 4).eval(&pt(0.1, 4, 0)).is_ok());
    }

    #[test]
    fn metric_examples() {
        let z = pt(0.3, 3, 4);
        assert_eq!(z.distance(&z).unwrap(), 0.0);
        // d((0,0),(0.5,0)): g=0 -> 0.5 + 0; g=+-1 -> 0.5 + dZ(-+1) = 0.5 + 0.5.
        let o = SolenoidPoint::identity(3).unwrap();
        assert_eq!(o.distance(&pt(0.5, 3, 0)).unwrap(), 0.5);
        // d((0.9,0),(0.1,0)): g=-1 -> 0.2 + dZ(1) = 0.7; g=0 -> 0.8.
        let d = pt(0.9, 3, 0).distance(&pt(0.1, 3, 0)).unwrap();
        assert!((d - 0.7).abs() < 1e-15);
        // Same leaf across the wrap: (0.9, 0) and (0.1, 1) are 0.2 apart.
        let d = pt(0.9, 3, 0).distance(&pt(0.1, 3, 1)).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
    }

    #[test]
    fn level_project_examples() {
        let z = pt(0.25, 3, 5);
        assert_eq!(z.level_project(1).unwrap(), 0.25);
        assert_eq!(z.level_project(3).unwrap(), 5.25);
        assert!(z.level_project(4).is_err());
    }

    #[test]
    fn irrationality_examples() {
        let s2 = SolenoidPoint::base_leaf(2f64.sqrt(), 11).unwrap();
        let rep = is_irrational(&s2, 12, CHARACTER_TOLERANCE).unwrap();
        assert!(rep.irrational, "{rep:?}");

        let half = SolenoidPoint::base_leaf(0.5, 3).unwrap();
        let rep = is_irrational(&half, 2, CHARACTER_TOLERANCE).unwrap();
        assert!(!rep.irrational);
        assert_eq!(rep.witness, Some(Rational::integer(2)));

        let id = SolenoidPoint::identity(3).unwrap();
        let rep = is_irrational(&id, 3, CHARACTER_TOLERANCE).unwrap();
        assert_eq!(rep.witness, Some(Rational::integer(1)));

        // A bound whose denominators do not divide K! is rejected.
        assert!(is_irrational(&s2, 13, CHARACTER_TOLERANCE).is_err());
    }

    #[test]
    fn fiber_elements_can_be_irrational() {
        // alpha = (0, 1): chi_q(alpha) = exp(2 pi i a/b) != 1 for b > 1, and
        // chi_n(alpha) = 1 for integers n: not a generator.
        let a = pt(0.0, 4, 1);
        let rep = is_irrational(&a, 4, CHARACTER_TOLERANCE).unwrap();
        assert_eq!(rep.witness, Some(Rational::integer(1)));
        // (sqrt2 - 1, 1) avoids every resolvable character in range.
        let b = pt(2f64.sqrt() - 1.0, 4, 1);
        assert!(
            is_irrational(&b, 4, CHARACTER_TOLERANCE)
                .unwrap()
                .irrational
        );
    }

    #[test]
    fn exact_phase_matches_float_phase() {
        let z = pt(0.375, 4, 7);
        let c = chi(5, 12);
        let e = c.exact_phase(&z).unwrap().to_f64();
        assert!((e - c.phase(&z).unwrap()).abs() < 1e-15);
    }
}
