use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_complex::Complex64;
use proptest::prelude::*;

use solenoid_core::numbers::{factorial, ProfiniteInt, Rational};
use solenoid_core::solenoid::{Character, SolenoidPoint};

const K: u32 = 6;
const DENOMINATORS: [i64; 12] = [1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 720];

fn point() -> impl Strategy<Value = SolenoidPoint> {
    (0.0..1.0f64, 0u64..720).prop_map(|(x, r)| {
        SolenoidPoint::canonicalize(x, ProfiniteInt::new(K, r).unwrap()).unwrap()
    })
}

fn resolvable_q() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 0..DENOMINATORS.len())
        .prop_map(|(a, k)| Rational::new(a, DENOMINATORS[k]).unwrap())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..10_000).prop_map(|(a, b)| Rational::new(a, b).unwrap())
}

fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

proptest! {
    #[test]
    fn rational_arithmetic_is_exact(a in small_rational(), c in small_rational()) {
        prop_assert_eq!(&(&a + &c) - &c, a.clone());
        prop_assert_eq!(&(&a * &c) + &(&a * &c), &a * &(&c + &c));
    }

    #[test]
    fn projection_is_a_homomorphism(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000, j in 1u32..=K) {
        let a = ProfiniteInt::new(K, a).unwrap();
        let b = ProfiniteInt::new(K, b).unwrap();
        let lhs = a.add(&b).unwrap().project(j).unwrap();
        let rhs = a.project(j).unwrap().add(&b.project(j).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.neg().project(j).unwrap(), a.project(j).unwrap().neg());
    }

    #[test]
    fn generator_iff_full_additive_orbit(depth in 1u32..=5, seed in 0u64..1_000_000) {
        let m: u64 = factorial(depth).to_string().parse().unwrap();
        let r = seed % m;
        let mut orbit: Vec<u64> = (0..m).map(|k| k * r % m).collect();
        orbit.sort_unstable();
        orbit.dedup();
        let a = ProfiniteInt::new(depth, BigUint::from(r)).unwrap();
        prop_assert_eq!(a.is_monothetic_generator(), orbit.len() as u64 == m);
    }

    #[test]
    fn characters_are_homomorphisms(q in resolvable_q(), z in point(), w in point()) {
        let chi = Character::new(q);
        let lhs = chi.eval(&z.add(&w).unwrap()).unwrap();
        let rhs = chi.eval(&z).unwrap() * chi.eval(&w).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12, "defect {}", (lhs - rhs).norm());
    }

    #[test]
    fn base_leaf_matches_circle_character(q in resolvable_q(), r in -100.0..100.0f64) {
        let chi = Character::new(q.clone());
        let lhs = chi.eval(&SolenoidPoint::base_leaf(r, K).unwrap()).unwrap();
        // q r reduced mod 1 exactly before leaving the rationals.
        let phase = (&q * &Rational::from_f64_exact(r).unwrap()).fract().to_f64();
        let rhs = Complex64::from_polar(1.0, TAU * phase);
        prop_assert!((lhs - rhs).norm() < 1e-12, "defect {}", (lhs - rhs).norm());
    }

    #[test]
    fn canonicalize_is_constant_on_z_orbits(x in -5.0..5.0f64, t in -5000i64..5000, g in -3i64..=3) {
        let t0 = ProfiniteInt::new(K, t).unwrap();
        let z = SolenoidPoint::canonicalize(x, t0.clone()).unwrap();
        let shifted = SolenoidPoint::canonicalize(x + g as f64, t0.add_integer(-g)).unwrap();
        prop_assert!(z.distance(&shifted).unwrap() < 1e-14);
        let again = SolenoidPoint::canonicalize(z.x(), z.t().clone()).unwrap();
        prop_assert_eq!(again, z);
    }

    #[test]
    fn metric_axioms(a in point(), b in point(), c in point()) {
        let d = |u: &SolenoidPoint, v: &SolenoidPoint| u.distance(v).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-15);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        let shifted = d(&a.add(&c).unwrap(), &b.add(&c).unwrap());
        prop_assert!((shifted - d(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn level_project_intertwines_base_leaf(r in -1000.0..1000.0f64, j in 1u32..=K) {
        let period: f64 = factorial(j).to_string().parse().unwrap();
        let u = SolenoidPoint::base_leaf(r, K).unwrap().level_project(j).unwrap();
        let expected = r.rem_euclid(period);
        let gap = (u - expected).abs();
        prop_assert!(gap.min(period - gap) < 1e-12, "{u} vs {expected}");
    }

    #[test]
    fn character_phase_on_translated_leaf(q in resolvable_q(), z in point(), dx in -3.0..3.0f64) {
        let chi = Character::new(q.clone());
        let moved = chi.phase(&z.shift_along_leaf(dx).unwrap()).unwrap();
        let expected = chi.phase(&z).unwrap() + q.to_f64() * dx;
        prop_assert!(circle_gap(moved, expected) < 1e-12);
    }
}
