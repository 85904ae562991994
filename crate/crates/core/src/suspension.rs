//! The suspension `Sigma_f(S) = S x [0,1] / (z,1) ~ (f(z),0)`, its flow, and
//! the 1-cocycles attached to its characters `chi_{q,n}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::map::SolenoidMap;
use crate::dynamics::orbit::orbit_segment;
use crate::dynamics::rotation::{rotation_element_for_measure, MeasureSpec, RotationEstimate};
use crate::error::{Error, Result};
use crate::numbers::Rational;
use crate::solenoid::{Character, SolenoidPoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuspensionPoint {
    pub z: SolenoidPoint,
    pub s: f64,
}

impl SuspensionPoint {
    pub fn new(z: SolenoidPoint, s: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!(
                "suspension height {s} not in [0, 1)"
            )));
        }
        Ok(SuspensionPoint { z, s })
    }
}

/// `chi_{q,n}(z, s) = chi_q(z) exp(2 pi i n s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SuspensionCharacter {
    pub q: Rational,
    pub n: i64,
}

impl SuspensionCharacter {
    pub fn new(q: Rational, n: i64) -> Self {
        SuspensionCharacter { q, n }
    }

    pub fn restricted(&self) -> Character {
        Character::new(self.q.clone())
    }

    pub fn eval(&self, p: &SuspensionPoint) -> Result<Complex64> {
        let base = self.restricted().eval(&p.z)?;
        Ok(base * Complex64::from_polar(1.0, TAU * (self.n as f64 * p.s).rem_euclid(1.0)))
    }

    /// Sum of characters in `Q x Z`.
    pub fn add(&self, other: &Self) -> Self {
        SuspensionCharacter {
            q: &self.q + &other.q,
            n: self.n + other.n,
        }
    }
}

/// Number of return-map steps and remaining height for flowing `s` by `t`.
fn steps(t: f64, s: f64) -> Result<(u64, f64)> {
    if !t.is_finite() {
        return Err(Error::NonFinite(t));
    }
    let total = t + s;
    let m = total.floor();
    if m < 0.0 {
        return Err(Error::NegativeTime);
    }
    let mut rest = total - m;
    let mut m = m as u64;
    if rest >= 1.0 {
        rest = 0.0;
        m += 1;
    }
    Ok((m, rest))
}

/// `phi_t(z, s) = (f^m(z), t + s - m)` with `m = floor(t + s) >= 0`.
pub fn flow(f: &SolenoidMap, p: &SuspensionPoint, t: f64) -> Result<SuspensionPoint> {
    let (m, s) = steps(t, p.s)?;
    let (z, _) = orbit_segment(f, &p.z, m);
    Ok(SuspensionPoint { z, s })
}

/// `C(t, (z, s)) = q D_m(z) + m theta_q(alpha) + n t`.
///
/// `D_m` is the leafwise displacement over `m` steps and `theta_q(alpha)` the
/// phase of `chi_q` at the translation part; for maps isotopic to the identity
/// the middle term vanishes and this is `q (f^m(z) - z) + n t`.
pub fn cocycle(
    f: &SolenoidMap,
    chi: &SuspensionCharacter,
    t: f64,
    p: &SuspensionPoint,
) -> Result<f64> {
    let restricted = chi.restricted();
    restricted.check_resolvable(f.depth())?;
    let (m, _) = steps(t, p.s)?;
    if chi.q.is_zero() {
        return Ok(chi.n as f64 * t);
    }
    let (_, d) = orbit_segment(f, &p.z, m);
    let alpha_phase = if f.alpha().is_identity() {
        0.0
    } else {
        restricted.phase(f.alpha())?
    };
    Ok(chi.q.to_f64() * d + m as f64 * alpha_phase + chi.n as f64 * t)
}

/// `|C(t+u, p) - C(u, phi_t(p)) - C(t, p)|`.
pub fn cocycle_identity_defect(
    f: &SolenoidMap,
    chi: &SuspensionCharacter,
    t: f64,
    u: f64,
    p: &SuspensionPoint,
) -> Result<f64> {
    if t < 0.0 || u < 0.0 {
        return Err(Error::NegativeTime);
    }
    let whole = cocycle(f, chi, t + u, p)?;
    let later = cocycle(f, chi, u, &flow(f, p, t)?)?;
    let first = cocycle(f, chi, t, p)?;
    Ok((whole - later - first).abs())
}

/// `|chi(phi_t(p)) - exp(2 pi i C(t, p)) chi(p)|`.
pub fn character_cocycle_defect(
    f: &SolenoidMap,
    chi: &SuspensionCharacter,
    t: f64,
    p: &SuspensionPoint,
) -> Result<f64> {
    let lhs = chi.eval(&flow(f, p, t)?)?;
    let c = cocycle(f, chi, t, p)?;
    let rhs = Complex64::from_polar(1.0, TAU * c.rem_euclid(1.0)) * chi.eval(p)?;
    Ok((lhs - rhs).norm())
}

/// Exact value of `H_{f,mu}(chi_{q,n}) = q r + n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HValue {
    pub exact: Rational,
    pub q: Rational,
    pub n: i64,
}

impl HValue {
    pub fn value(&self) -> f64 {
        self.exact.to_f64()
    }

    /// Phase of `exp(2 pi i H)` in `[0, 1)`, exact.
    pub fn phase(&self) -> Rational {
        self.exact.fract()
    }
}

/// `H(chi_{q,n})` from an already computed rotation estimate.
pub fn h_from_estimate(estimate: &RotationEstimate, chi: &SuspensionCharacter) -> Result<HValue> {
    let r = Rational::from_f64_exact(estimate.r)?;
    Ok(HValue {
        exact: &chi.q * &r + Rational::from(chi.n),
        q: chi.q.clone(),
        n: chi.n,
    })
}

/// `H_{f,mu}(chi_{q,n}) = q integral(phi dmu) + n`.
pub fn h_hom(f: &SolenoidMap, mu: &MeasureSpec, chi: &SuspensionCharacter) -> Result<HValue> {
    chi.restricted().check_resolvable(f.depth())?;
    let estimate = rotation_element_for_measure(f, mu)?;
    h_from_estimate(&estimate, chi)
}

/// Rotation element as the character of characters `q -> exp(2 pi i H(chi_{q,0}))`.
///
/// Checks that the phase does not depend on the circle component `n` and
/// returns an estimate whose `r` is `H(chi_{1,0})`.
pub fn rotation_element_from_h(f: &SolenoidMap, mu: &MeasureSpec) -> Result<RotationEstimate> {
    let estimate = rotation_element_for_measure(f, mu)?;
    let one = Rational::integer(1);
    let base = h_from_estimate(&estimate, &SuspensionCharacter::new(one.clone(), 0))?;
    for n in -2..=2 {
        let h = h_from_estimate(&estimate, &SuspensionCharacter::new(one.clone(), n))?;
        assert_eq!(h.phase(), base.phase(), "rotation phase depends on n");
    }
    Ok(RotationEstimate {
        r: base.value(),
        method: format!("cocycle/{}", estimate.method),
        ..estimate
    })
}

/// Quotient distance on the suspension:
/// `min_k d(z, f^k z') + |s - s' + k|` over `|k| <= 3`, using forward iterates
/// on whichever side `k` requires.
pub fn suspension_metric(
    f: &SolenoidMap,
    p: &SuspensionPoint,
    p2: &SuspensionPoint,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mut zi = p.z.clone();
    let mut wi = p2.z.clone();
    for k in 0..=3i64 {
        // (z, s) against (f^k z', s' - k)
        let a = p.z.distance(&wi)? + (p.s - p2.s + k as f64).abs();
        // (f^k z, s - k) against (z', s')
        let b = zi.distance(&p2.z)? + (p.s - p2.s - k as f64).abs();
        best = best.min(a).min(b);
        wi = f.apply(&wi);
        zi = f.apply(&zi);
    }
    Ok(best)
}

/// `|d(phi_t p, phi_t p') - d(p, p')|` for a translation.
pub fn isometry_defect(
    f: &SolenoidMap,
    p: &SuspensionPoint,
    p2: &SuspensionPoint,
    t: f64,
) -> Result<f64> {
    if f.translation_element().is_none() {
        return Err(Error::NotTranslation);
    }
    let before = suspension_metric(f, p, p2)?;
    let after = suspension_metric(f, &flow(f, p, t)?, &flow(f, p2, t)?)?;
    Ok((after - before).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub check: String,
    pub samples: usize,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl PropertyReport {
    pub fn from_defects(
        check: &str,
        defects: impl IntoIterator<Item = f64>,
        tolerance: f64,
    ) -> Self {
        let mut samples = 0;
        let mut max_defect = 0.0f64;
        for d in defects {
            samples += 1;
            max_defect = if d.is_nan() {
                f64::INFINITY
            } else {
                max_defect.max(d)
            };
        }
        PropertyReport {
            check: check.to_string(),
            samples,
            max_defect,
            tolerance,
            pass: max_defect < tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::dynamics::displacement::{CharacterPolynomial, PolyTerm};
    use crate::dynamics::fixed::find_fixed_point;
    use crate::numbers::ProfiniteInt;

    fn sp(x: f64, r: i64, s: f64) -> SuspensionPoint {
        let z = SolenoidPoint::canonicalize(x, ProfiniteInt::new(3, r).unwrap()).unwrap();
        SuspensionPoint::new(z, s).unwrap()
    }

    fn chi(q: i64, n: i64) -> SuspensionCharacter {
        SuspensionCharacter::new(Rational::integer(q), n)
    }

    fn wobble() -> SolenoidMap {
        let phi = CharacterPolynomial::new(
            0.21,
            vec![
                PolyTerm {
                    q: Rational::integer(1),
                    cos: 0.02,
                    sin: 0.05,
                },
                PolyTerm {
                    q: Rational::new(1, 6).unwrap(),
                    cos: 0.1,
                    sin: 0.0,
                },
            ],
        )
        .unwrap();
        SolenoidMap::isotopic_to_identity(3, Arc::new(phi)).unwrap()
    }

    #[test]
    fn flow_examples() {
        let f = wobble();
        let p = sp(0.4, 2, 0.0);
        assert_eq!(flow(&f, &p, 0.0).unwrap(), p);
        let q = flow(&f, &p, 1.0).unwrap();
        assert_eq!(q, SuspensionPoint::new(f.apply(&p.z), 0.0).unwrap());
        let r = flow(&f, &sp(0.4, 2, 0.5), 0.25).unwrap();
        assert_eq!(r, sp(0.4, 2, 0.75));
        assert!(flow(&f, &p, -0.5).is_err());
    }

    #[test]
    fn flow_law() {
        let f = wobble();
        let p = sp(0.1, 5, 0.3);
        let a = flow(&f, &flow(&f, &p, 1.45).unwrap(), 2.6).unwrap();
        let b = flow(&f, &p, 4.05).unwrap();
        assert_eq!(a.z, b.z);
        assert!((a.s - b.s).abs() < 1e-12);
    }

    #[test]
    fn cocycle_examples() {
        let f = SolenoidMap::rotation(3, 0.3).unwrap();
        let p = sp(0.0, 0, 0.0);
        assert!((cocycle(&f, &chi(2, 1), 1.0, &p).unwrap() - 1.6).abs() < 1e-15);
        assert_eq!(cocycle(&wobble(), &chi(0, 0), 2.7, &p).unwrap(), 0.0);
        assert!((cocycle(&f, &chi(1, 0), 2.0, &p).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn time_one_cocycle_is_q_phi_plus_n() {
        let f = wobble();
        let p = sp(0.77, 4, 0.0);
        let c = cocycle(&f, &chi(3, -2), 1.0, &p).unwrap();
        assert!((c - (3.0 * f.displacement(&p.z) - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn identities_hold() {
        let f = wobble();
        let p = sp(0.33, 1, 0.6);
        let c = SuspensionCharacter::new(Rational::new(5, 6).unwrap(), 3);
        assert_eq!(cocycle_identity_defect(&f, &c, 1.7, 0.0, &p).unwrap(), 0.0);
        assert!(cocycle_identity_defect(&f, &c, 1.7, 2.9, &p).unwrap() < 1e-12);
        assert!(character_cocycle_defect(&f, &c, 3.3, &p).unwrap() < 1e-12);
        assert_eq!(
            character_cocycle_defect(&f, &SuspensionCharacter::new(Rational::zero(), 0), 3.3, &p)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn translation_part_enters_cocycle() {
        let alpha = SolenoidPoint::canonicalize(0.125, ProfiniteInt::new(3, 1).unwrap()).unwrap();
        let f = SolenoidMap::translation(alpha).unwrap();
        let c = SuspensionCharacter::new(Rational::new(1, 3).unwrap(), 0);
        let p = sp(0.5, 2, 0.2);
        assert!(character_cocycle_defect(&f, &c, 2.5, &p).unwrap() < 1e-12);
    }

    #[test]
    fn h_examples() {
        let rot = SolenoidMap::rotation(3, 1.0 / 3.0).unwrap();
        let h = h_hom(&rot, &MeasureSpec::Haar, &chi(3, 0)).unwrap();
        assert_eq!(h.value(), 1.0);

        let f = wobble();
        let mu = MeasureSpec::Birkhoff {
            seed: SolenoidPoint::identity(3).unwrap(),
            n: 100,
        };
        assert_eq!(h_hom(&f, &mu, &chi(0, 4)).unwrap().value(), 4.0);

        let g = SolenoidMap::isotopic_to_identity(
            3,
            Arc::new(
                CharacterPolynomial::new(
                    0.05,
                    vec![PolyTerm {
                        q: Rational::integer(1),
                        cos: -0.05,
                        sin: 0.0,
                    }],
                )
                .unwrap(),
            ),
        )
        .unwrap();
        let fixed = find_fixed_point(&g, 64).unwrap().unwrap();
        let dirac = MeasureSpec::Dirac { point: fixed };
        let h = h_hom(
            &g,
            &dirac,
            &SuspensionCharacter::new(Rational::new(7, 2).unwrap(), -3),
        )
        .unwrap();
        assert!((h.value() + 3.0).abs() < 1e-9);
    }

    #[test]
    fn h_is_additive_and_n_independent() {
        let f = wobble();
        let mu = MeasureSpec::Birkhoff {
            seed: SolenoidPoint::identity(3).unwrap(),
            n: 500,
        };
        let a = SuspensionCharacter::new(Rational::new(1, 2).unwrap(), 3);
        let b = SuspensionCharacter::new(Rational::new(-5, 6).unwrap(), -1);
        let ha = h_hom(&f, &mu, &a).unwrap();
        let hb = h_hom(&f, &mu, &b).unwrap();
        let hab = h_hom(&f, &mu, &a.add(&b)).unwrap();
        assert_eq!(hab.exact, &ha.exact + &hb.exact);
        let e = rotation_element_from_h(&f, &mu).unwrap();
        let direct = rotation_element_for_measure(&f, &mu).unwrap();
        assert_eq!(e.r, direct.r);
    }

    #[test]
    fn metric_and_isometry() {
        let alpha =
            SolenoidPoint::canonicalize(2f64.sqrt() - 1.0, ProfiniteInt::new(3, 1).unwrap())
                .unwrap();
        let f = SolenoidMap::translation(alpha).unwrap();
        let p = sp(0.2, 1, 0.1);
        let q = sp(0.7, 4, 0.8);
        assert_eq!(suspension_metric(&f, &p, &p).unwrap(), 0.0);
        let d1 = suspension_metric(&f, &p, &q).unwrap();
        let d2 = suspension_metric(&f, &q, &p).unwrap();
        assert!((d1 - d2).abs() < 1e-15);
        for t in [0.1, 0.95, 1.5, 2.99] {
            assert!(isometry_defect(&f, &p, &q, t).unwrap() < 1e-12);
        }
        assert!(matches!(
            isometry_defect(&wobble(), &p, &q, 0.5),
            Err(Error::NotTranslation)
        ));
    }
}
