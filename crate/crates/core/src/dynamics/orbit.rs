use serde::Serialize;

use crate::dynamics::map::SolenoidMap;
use crate::solenoid::SolenoidPoint;

/// Running leafwise displacement `D_m = sum_{j<m} phi(f^j z)`.
///
/// The constant part of `phi` is accumulated as `m * c`, so that pure
/// rotations give `D_m = m * c` with a single rounding; the varying part uses
/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct DisplacementSum {
    steps: u64,
    constant: f64,
    sum: f64,
    comp: f64,
}

impl DisplacementSum {
    pub fn new(constant: f64) -> Self {
        DisplacementSum {
            constant,
            ..Default::default()
        }
    }

    pub fn push(&mut self, phi: f64) {
        self.steps += 1;
        let v = phi - self.constant;
        if v == 0.0 {
            return;
        }
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn value(&self) -> f64 {
        let varying = self.sum + self.comp;
        if self.constant == 0.0 {
            varying
        } else {
            self.steps as f64 * self.constant + varying
        }
    }
}

/// A finite forward orbit with its leafwise displacement partial sums.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub points: Vec<SolenoidPoint>,
    /// `leaf_displacement[m] = D_m`; `D_0 = 0`.
    pub leaf_displacement: Vec<f64>,
}

impl OrbitRecord {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV rows `m,x,t_residue,D_m` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,x,t_residue,D_m\n");
        for (m, (p, d)) in self.points.iter().zip(&self.leaf_displacement).enumerate() {
            out.push_str(&format!("{m},{:?},{},{:?}\n", p.x(), p.t().residue(), d));
        }
        out
    }
}

/// Streaming orbit: yields `(m, f^m(z0), D_m)` for `m = 0, 1, 2, ...`.
#[derive(Clone, Debug)]
pub struct Orbit<'a> {
    map: &'a SolenoidMap,
    current: SolenoidPoint,
    sum: DisplacementSum,
    m: u64,
}

impl<'a> Orbit<'a> {
    pub fn new(map: &'a SolenoidMap, z0: SolenoidPoint) -> Self {
        Orbit {
            map,
            current: z0,
            sum: DisplacementSum::new(map.phi().constant_part()),
            m: 0,
        }
    }

    pub fn point(&self) -> &SolenoidPoint {
        &self.current
    }

    pub fn index(&self) -> u64 {
        self.m
    }

    pub fn displacement(&self) -> f64 {
        self.sum.value()
    }

    /// Advances one step and returns `phi` at the point left behind.
    pub fn advance(&mut self) -> f64 {
        let (next, d) = self.map.step(&self.current);
        self.sum.push(d);
        self.current = next;
        self.m += 1;
        d
    }

    pub fn advance_by(&mut self, n: u64) {
        for _ in 0..n {
            self.advance();
        }
    }
}

/// `f^m(z)` and `D_m(z)` for `m >= 0`.
pub fn orbit_segment(f: &SolenoidMap, z: &SolenoidPoint, m: u64) -> (SolenoidPoint, f64) {
    let mut orbit = Orbit::new(f, z.clone());
    orbit.advance_by(m);
    (orbit.current, orbit.sum.value())
}

/// Stores `n + 1` orbit points and displacement sums.
pub fn iterate(f: &SolenoidMap, z0: &SolenoidPoint, n: usize) -> OrbitRecord {
    let mut points = Vec::with_capacity(n + 1);
    let mut leaf_displacement = Vec::with_capacity(n + 1);
    let mut orbit = Orbit::new(f, z0.clone());
    points.push(orbit.current.clone());
    leaf_displacement.push(0.0);
    for _ in 0..n {
        orbit.advance();
        points.push(orbit.current.clone());
        leaf_displacement.push(orbit.sum.value());
    }
    OrbitRecord {
        points,
        leaf_displacement,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::dynamics::displacement::{Displacement, LevelPeriodicTable};

    #[test]
    fn zero_steps() {
        let f = SolenoidMap::rotation(3, 0.3).unwrap();
        let z = SolenoidPoint::identity(3).unwrap();
        let rec = iterate(&f, &z, 0);
        assert_eq!(rec.points, vec![z]);
        assert_eq!(rec.leaf_displacement, vec![0.0]);
    }

    #[test]
    fn pure_rotation_sum_is_exact() {
        let f = SolenoidMap::rotation(3, 0.3).unwrap();
        let rec = iterate(&f, &SolenoidPoint::identity(3).unwrap(), 10);
        assert_eq!(rec.leaf_displacement[10], 3.0);
        for (m, d) in rec.leaf_displacement.iter().enumerate() {
            assert_eq!(*d, m as f64 * 0.3);
        }
    }

    #[test]
    fn increments_match_phi() {
        let phi: Arc<dyn Displacement> = Arc::new(
            LevelPeriodicTable::from_fn(1, 128, |s| 0.3 + 0.1 * (std::f64::consts::TAU * s).sin())
                .unwrap(),
        );
        let f = SolenoidMap::isotopic_to_identity(3, phi.clone()).unwrap();
        let rec = iterate(&f, &SolenoidPoint::base_leaf(0.1, 3).unwrap(), 1000);
        let (lo, hi) = rec.points[..1000]
            .iter()
            .map(|p| phi.eval(p))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
        for m in 0..1000 {
            let inc = rec.leaf_displacement[m + 1] - rec.leaf_displacement[m];
            assert!((inc - phi.eval(&rec.points[m])).abs() < 1e-12);
        }
        let avg = rec.leaf_displacement[1000] / 1000.0;
        assert!(avg >= lo && avg <= hi);
    }

    #[test]
    fn streaming_is_deterministic() {
        let f = SolenoidMap::rotation(4, 0.1234).unwrap();
        let z = SolenoidPoint::base_leaf(0.5, 4).unwrap();
        let a = orbit_segment(&f, &z, 5000);
        let b = orbit_segment(&f, &z, 5000);
        assert_eq!(a.1.to_bits(), b.1.to_bits());
        assert_eq!(a.0, b.0);
    }
}
