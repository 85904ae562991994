//! Empirical probes: minimal-set classification, Weyl sums, the classical
//! circle rotation number, and the conjugation-invariance harness.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::dynamics::displacement::Displacement;
use crate::dynamics::map::{ConjugatedDisplacement, SolenoidMap};
use crate::dynamics::orbit::Orbit;
use crate::dynamics::rotation::{rotation_element_birkhoff, RotationEstimate};
use crate::error::{Error, Result};
use crate::numbers::factorial;
use crate::solenoid::{Character, SolenoidPoint};

#[derive(Clone, Debug)]
pub struct CoverageGrid {
    x_bins: usize,
    fiber_level: u32,
    fibers: usize,
    visited: Vec<bool>,
    count: usize,
    fiber_seen: Vec<bool>,
}

impl CoverageGrid {
    pub fn new(x_bins: usize, fiber_level: u32) -> Result<Self> {
        if x_bins == 0 {
            return Err(Error::InvalidArgument(
                "grid needs at least one leaf bin".into(),
            ));
        }
        let fibers = factorial(fiber_level)
            .to_usize()
            .filter(|f| f.saturating_mul(x_bins) <= 1 << 28)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("fiber level {fiber_level} too fine for a grid"))
            })?;
        Ok(CoverageGrid {
            x_bins,
            fiber_level,
            fibers,
            visited: vec![false; x_bins * fibers],
            count: 0,
            fiber_seen: vec![false; fibers],
        })
    }

    pub fn mark(&mut self, z: &SolenoidPoint) {
        let bin = ((z.x() * self.x_bins as f64) as usize).min(self.x_bins - 1);
        let fiber = z.t().residue_mod_u64(self.fibers as u64) as usize;
        let cell = fiber * self.x_bins + bin;
        if !self.visited[cell] {
            self.visited[cell] = true;
            self.count += 1;
        }
        self.fiber_seen[fiber] = true;
    }

    pub fn fill_fraction(&self) -> f64 {
        self.count as f64 / self.visited.len() as f64
    }

    pub fn fiber_marginal_full(&self) -> bool {
        self.fiber_seen.iter().all(|&b| b)
    }

    pub fn x_bins(&self) -> usize {
        self.x_bins
    }

    pub fn fiber_level(&self) -> u32 {
        self.fiber_level
    }

    pub fn is_visited(&self, fiber: usize, bin: usize) -> bool {
        self.visited[fiber * self.x_bins + bin]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    FullSolenoid,
    CantorLike,
    FixedOrTrapped,
    /// Neither threshold is met within the schedule.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::FullSolenoid => "FullSolenoid",
            Verdict::CantorLike => "CantorLike",
            Verdict::FixedOrTrapped => "FixedOrTrapped",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimalityParams {
    pub x_bins: usize,
    pub fiber_level: u32,
    pub schedule: Vec<u64>,
    /// Slack `k` in the full-coverage threshold `1 - k / B`.
    pub full_slack: f64,
}

impl MinimalityParams {
    pub fn new(x_bins: usize, fiber_level: u32, schedule: Vec<u64>) -> Self {
        MinimalityParams {
            x_bins,
            fiber_level,
            schedule,
            full_slack: 2.0,
        }
    }

    pub fn full_threshold(&self) -> f64 {
        1.0 - self.full_slack / self.x_bins as f64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityReport {
    pub verdict: Verdict,
    pub fill_curve: Vec<(u64, f64)>,
    pub fiber_marginal_full: bool,
    pub orbit_diameter: f64,
    pub params: MinimalityParams,
}

impl MinimalityReport {
    pub fn fill_curve_csv(&self) -> String {
        let mut out = String::from("n,fill_fraction\n");
        for (n, f) in &self.fill_curve {
            out.push_str(&format!("{n},{f:?}\n"));
        }
        out
    }
}

/// Marks the orbit of `z0` on a leaf-bin x fiber-residue grid at each schedule
/// entry and reads off the minimal-set dichotomy:
///
/// * `FixedOrTrapped`: the orbit never leaves a ball of radius `1/B`.
/// * `FullSolenoid`: final fill `>= 1 - 2/B`, rising at every entry until it gets there.
/// * `CantorLike`: fill unchanged over the last two entries, below `1 - 2/B`,
///   with every fiber residue visited.
pub fn minimality_classify(
    f: &SolenoidMap,
    z0: &SolenoidPoint,
    params: &MinimalityParams,
) -> Result<MinimalityReport> {
    if params.schedule.is_empty() || params.schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "schedule must be nonempty and increasing".into(),
        ));
    }
    if params.fiber_level > f.depth() {
        return Err(Error::CannotRefine {
            requested: params.fiber_level,
            depth: f.depth(),
        });
    }
    let mut grid = CoverageGrid::new(params.x_bins, params.fiber_level)?;
    let mut orbit = Orbit::new(f, z0.clone());
    grid.mark(orbit.point());
    let mut diameter = 0.0f64;
    let mut fill_curve = Vec::with_capacity(params.schedule.len());
    for &target in &params.schedule {
        while orbit.index() < target {
            orbit.advance();
            grid.mark(orbit.point());
            if diameter < 1.0 {
                diameter = diameter.max(orbit.point().distance(z0)?);
            }
        }
        fill_curve.push((target, grid.fill_fraction()));
    }
    let threshold = params.full_threshold();
    let fills: Vec<f64> = fill_curve.iter().map(|(_, v)| *v).collect();
    let last = *fills.last().expect("nonempty schedule");
    let rising = fills.windows(2).all(|w| w[1] > w[0] || w[0] >= threshold);
    let plateau = fills.len() >= 2 && fills[fills.len() - 2] == last;
    let verdict = if diameter < 1.0 / params.x_bins as f64 {
        Verdict::FixedOrTrapped
    } else if last >= threshold && rising {
        Verdict::FullSolenoid
    } else if plateau && last < threshold && grid.fiber_marginal_full() {
        Verdict::CantorLike
    } else {
        Verdict::Inconclusive
    };
    Ok(MinimalityReport {
        verdict,
        fill_curve,
        fiber_marginal_full: grid.fiber_marginal_full(),
        orbit_diameter: diameter,
        params: params.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub n: u64,
    /// `2 / (N |1 - chi_q(beta)|)` for a translation by `beta` with `chi_q(beta) != 1`.
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
}

/// `(1/N) sum_{j<N} chi_q(f^j(z0))`.
pub fn weyl_sum(
    f: &SolenoidMap,
    chi: &Character,
    z0: &SolenoidPoint,
    n: u64,
) -> Result<WeylReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("Weyl sum needs N >= 1".into()));
    }
    chi.check_resolvable(f.depth())?;
    let mut orbit = Orbit::new(f, z0.clone());
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        acc += chi.eval(orbit.point())?;
        orbit.advance();
    }
    let avg = acc / n as f64;
    let bound = match f.translation_element() {
        Some(beta) => {
            let gap = (Complex64::new(1.0, 0.0) - chi.eval(&beta)?).norm();
            (gap > 0.0).then(|| 2.0 / (n as f64 * gap))
        }
        None => None,
    };
    let modulus = avg.norm();
    Ok(WeylReport {
        re: avg.re,
        im: avg.im,
        modulus,
        n,
        bound,
        within_bound: bound.map(|b| modulus <= b),
    })
}

/// A lift `F` of a degree-one circle map of circumference `period`.
#[derive(Clone)]
pub struct CircleLift {
    period: f64,
    level: u32,
    lift: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CircleLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleLift")
            .field("period", &self.period)
            .field("level", &self.level)
            .finish()
    }
}

impl CircleLift {
    pub fn new(level: u32, lift: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let period = factorial(level)
            .to_f64()
            .ok_or_else(|| Error::InvalidArgument("level too large".into()))?;
        Ok(CircleLift {
            period,
            level,
            lift: Arc::new(lift),
        })
    }

    /// The map induced by `f` on the level-`j` circle `R / j!Z`:
    /// `u -> u + alpha_j + phi_j(u)` with `alpha_j = alpha.x + (alpha.t mod j!)`.
    pub fn from_map(f: &SolenoidMap, level: u32) -> Result<Self> {
        match f.phi().factor_level() {
            Some(j) if j <= level && level <= f.depth() => {}
            _ => return Err(Error::DoesNotFactor(level)),
        }
        let shift = f.alpha().level_project(level)?;
        let phi: Arc<dyn Displacement> = f.phi().clone();
        Self::new(level, move |u| {
            u + shift + phi.eval_level(level, u).expect("level checked")
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.lift)(u)
    }
}

/// Classical rotation number `(F^n(x0) - x0) / (n j!)` of a circle map, in
/// units of full turns of the level-`j` circle.
pub fn circle_oracle_rotation_number(lift: &CircleLift, x0: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("oracle needs n >= 1".into()));
    }
    let p = lift.period;
    // Keep the iterate reduced and count whole turns separately.
    let mut u = x0.rem_euclid(p);
    let start = u;
    let mut turns: i64 = 0;
    for _ in 0..n {
        let next = lift.eval(u);
        let k = (next / p).floor();
        turns += k as i64;
        u = next - k * p;
    }
    Ok(((u - start) + turns as f64 * p) / (n as f64 * p))
}

/// Oracle value rescaled to leafwise displacement per step (comparable with
/// the Birkhoff `r` for maps isotopic to the identity).
pub fn circle_oracle_leafwise(lift: &CircleLift, x0: f64, n: u64) -> Result<f64> {
    Ok(circle_oracle_rotation_number(lift, x0, n)? * lift.period)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationCheck {
    pub r_f: RotationEstimate,
    pub r_g: RotationEstimate,
    pub defect: f64,
}

/// Builds `g = h o f o h^-1` (both isotopic to the identity) and compares the
/// Birkhoff estimates of `f` from `seed` and of `g` from `h(seed)`.
pub fn conjugation_invariance(
    f: &SolenoidMap,
    h: Arc<dyn Displacement>,
    seed: &SolenoidPoint,
    n: u64,
) -> Result<ConjugationCheck> {
    if !f.is_isotopic_to_identity() {
        return Err(Error::NotIsotopicToIdentity);
    }
    let depth = f.depth();
    let h_map = SolenoidMap::isotopic_to_identity(depth, h.clone())?;
    let g = SolenoidMap::isotopic_to_identity(
        depth,
        Arc::new(ConjugatedDisplacement::new(f.phi().clone(), h)),
    )?;
    let r_f = rotation_element_birkhoff(f, seed, n)?;
    let r_g = rotation_element_birkhoff(&g, &h_map.apply(seed), n)?;
    let defect = (r_f.r - r_g.r).abs();
    Ok(ConjugationCheck { r_f, r_g, defect })
}
