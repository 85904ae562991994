//! Denjoy's circle homeomorphism with wandering intervals, lifted to the solenoid.
//!
//! The orbit `{n tau}` of `0` under the rotation by `tau` is blown up into gaps
//! `I_n` of length `l_n = L rho^|n| / norm`, and the remaining Cantor set of
//! Lebesgue measure `1 - L` is laid out linearly in the rotation coordinate.
//! Gaps map affinely onto their successors; on the Cantor set the map is
//! conjugate to the rotation. Gaps shorter than `1e-18` are dropped, which is
//! below double resolution on `[0, 1)`.

use serde_json::Value;

use crate::dynamics::displacement::Displacement;
use crate::error::{Error, Result};
use crate::solenoid::SolenoidPoint;

const NEGLIGIBLE_GAP: f64 = 1e-18;
const MAX_GAP_INDEX: i64 = 5000;

#[derive(Clone, Debug)]
struct Gap {
    index: i64,
    theta: f64,
    start: f64,
    len: f64,
}

#[derive(Clone, Debug)]
pub struct DenjoyDisplacement {
    tau: f64,
    gap_total: f64,
    ratio: f64,
    n_max: i64,
    /// Sorted by `theta` (equivalently by `start`).
    gaps: Vec<Gap>,
    /// `prefix[k]` = total length of the first `k` sorted gaps.
    prefix: Vec<f64>,
    /// Sorted position of gap `n`, indexed by `n + n_max`.
    position: Vec<usize>,
}

impl DenjoyDisplacement {
    pub fn new(tau: f64, gap_total: f64, ratio: f64) -> Result<Self> {
        let open_unit = |v: f64| v.is_finite() && v > 0.0 && v < 1.0;
        if !open_unit(tau) || !open_unit(gap_total) || !open_unit(ratio) {
            return Err(Error::InvalidDisplacement(
                "denjoy parameters tau, gap_total, ratio must lie in (0, 1)".into(),
            ));
        }
        let mut n_max = 0i64;
        while n_max < MAX_GAP_INDEX && gap_total * ratio.powi(n_max as i32 + 1) >= NEGLIGIBLE_GAP {
            n_max += 1;
        }
        let norm: f64 = (-n_max..=n_max)
            .map(|n| ratio.powi(n.unsigned_abs() as i32))
            .sum();
        let mut thetas = vec![0.0; (2 * n_max + 1) as usize];
        let idx = |n: i64| (n + n_max) as usize;
        for n in 1..=n_max {
            let prev = thetas[idx(n - 1)];
            let next = prev + tau;
            thetas[idx(n)] = if next >= 1.0 { next - 1.0 } else { next };
            let prev = thetas[idx(1 - n)];
            let back = prev - tau;
            thetas[idx(-n)] = if back < 0.0 { back + 1.0 } else { back };
        }
        let mut gaps: Vec<Gap> = (-n_max..=n_max)
            .map(|n| Gap {
                index: n,
                theta: thetas[idx(n)],
                start: 0.0,
                len: gap_total * ratio.powi(n.unsigned_abs() as i32) / norm,
            })
            .collect();
        gaps.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        let cantor = 1.0 - gap_total;
        let mut prefix = Vec::with_capacity(gaps.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for g in gaps.iter_mut() {
            g.start = cantor * g.theta + acc;
            acc += g.len;
            prefix.push(acc);
        }
        let mut position = vec![0; gaps.len()];
        for (k, g) in gaps.iter().enumerate() {
            position[idx(g.index)] = k;
        }
        Ok(DenjoyDisplacement {
            tau,
            gap_total,
            ratio,
            n_max,
            gaps,
            prefix,
            position,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn cantor_measure(&self) -> f64 {
        1.0 - self.gap_total
    }

    /// `(start, length)` of the wandering interval `I_n`, if it is resolved.
    pub fn gap(&self, n: i64) -> Option<(f64, f64)> {
        if n.abs() > self.n_max {
            return None;
        }
        let g = &self.gaps[self.position[(n + self.n_max) as usize]];
        Some((g.start, g.len))
    }

    /// Left-continuous inverse of the collapsing map: the point with rotation
    /// coordinate `theta` in `[0, 1)`. Non-anchor `theta` lands in the Cantor set.
    pub fn point_at(&self, theta: f64) -> f64 {
        let c = self.gaps.partition_point(|g| g.theta < theta);
        self.cantor_measure() * theta + self.prefix[c]
    }

    /// Rotation coordinate of `x` in `[0, 1)`: the collapsing semiconjugacy
    /// to the rotation by `tau` (constant on each gap).
    pub fn rotation_coordinate(&self, x: f64) -> f64 {
        let k = self
            .gaps
            .partition_point(|g| g.start <= x)
            .saturating_sub(1);
        let g = &self.gaps[k];
        if x <= g.start + g.len {
            g.theta
        } else {
            (x - self.prefix[k + 1]) / self.cantor_measure()
        }
    }

    /// Lift of the circle map evaluated at `x` in `[0, 1)`.
    pub fn lift(&self, x: f64) -> f64 {
        let k = self
            .gaps
            .partition_point(|g| g.start <= x)
            .saturating_sub(1);
        let g = &self.gaps[k];
        if x <= g.start + g.len {
            let wrap = if g.theta + self.tau >= 1.0 { 1.0 } else { 0.0 };
            if g.index < self.n_max {
                let next = &self.gaps[self.position[(g.index + 1 + self.n_max) as usize]];
                return next.start + (x - g.start) * (next.len / g.len) + wrap;
            }
            let theta = g.theta + self.tau - wrap;
            return self.point_at(theta) + wrap;
        }
        let theta = (x - self.prefix[k + 1]) / self.cantor_measure() + self.tau;
        let wrap = theta.floor();
        self.point_at(theta - wrap) + wrap
    }

    fn displacement_at(&self, x: f64) -> f64 {
        let x = x.rem_euclid(1.0);
        self.lift(x) - x
    }
}

impl Displacement for DenjoyDisplacement {
    fn kind(&self) -> &'static str {
        "denjoy"
    }

    fn eval(&self, z: &SolenoidPoint) -> f64 {
        self.displacement_at(z.x())
    }

    fn factor_level(&self) -> Option<u32> {
        Some(1)
    }

    fn eval_level(&self, _level: u32, u: f64) -> Result<f64> {
        Ok(self.displacement_at(u))
    }

    fn sup_abs(&self) -> f64 {
        1.0
    }

    fn validate(&self, _depth: u32) -> Result<()> {
        Ok(())
    }

    fn to_json(&self) -> Value {
        serde_json::json!({
            "kind": "denjoy",
            "tau": self.tau,
            "gap_total": self.gap_total,
            "ratio": self.ratio,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn gaps_are_disjoint_and_fill_measure() {
        let d = DenjoyDisplacement::new(golden(), 0.4, 0.5).unwrap();
        let mut total = 0.0;
        for w in d.gaps.windows(2) {
            assert!(w[0].start + w[0].len <= w[1].start + 1e-15);
            total += w[0].len;
        }
        total += d.gaps.last().unwrap().len;
        assert!((total - 0.4).abs() < 1e-12);
        assert_eq!(d.gap(0).unwrap().0, 0.0);
    }

    #[test]
    fn gaps_map_to_successors() {
        let d = DenjoyDisplacement::new(golden(), 0.4, 0.5).unwrap();
        for n in -5..5 {
            let (s, l) = d.gap(n).unwrap();
            let (s1, l1) = d.gap(n + 1).unwrap();
            let mid = d.lift(s + 0.5 * l).rem_euclid(1.0);
            assert!((mid - (s1 + 0.5 * l1)).abs() < 1e-12, "gap {n}");
        }
    }

    #[test]
    fn lift_is_continuous_and_increasing() {
        let d = DenjoyDisplacement::new(golden(), 0.4, 0.5).unwrap();
        let m = 20000;
        let mut prev = d.lift(0.0);
        for k in 1..m {
            let x = k as f64 / m as f64;
            let v = d.lift(x);
            assert!(v >= prev - 1e-12, "not monotone at {x}");
            assert!(v - prev < 0.05, "jump at {x}: {prev} -> {v}");
            prev = v;
        }
        // Degree one.
        assert!((d.lift(1.0 - 1e-12) - (d.lift(0.0) + 1.0)).abs() < 1e-6);
    }

    #[test]
    fn conjugate_to_rotation_on_cantor_set() {
        let d = DenjoyDisplacement::new(golden(), 0.4, 0.5).unwrap();
        let theta = 0.123456789;
        let x = d.point_at(theta);
        let fx = d.lift(x).rem_euclid(1.0);
        let expect = (theta + golden()).rem_euclid(1.0);
        assert!((d.rotation_coordinate(fx) - expect).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DenjoyDisplacement::new(1.5, 0.4, 0.5).is_err());
        assert!(DenjoyDisplacement::new(0.3, 0.0, 0.5).is_err());
        assert!(DenjoyDisplacement::new(0.3, 0.4, 1.0).is_err());
    }
}
