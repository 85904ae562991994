//! Bounded mean variation and the sup-semiconjugacy.

use serde::Serialize;

use crate::dynamics::map::SolenoidMap;
use crate::dynamics::orbit::Orbit;
use crate::error::{Error, Result};
use crate::solenoid::SolenoidPoint;

#[derive(Clone, Debug, Serialize)]
pub struct BmvReport {
    pub tau: f64,
    /// `e_m = D_m - m tau` for `m = 1..=n`.
    pub deviations: Vec<f64>,
    pub sup_abs: f64,
    /// Least-squares slope of `|e_m|` against `m`.
    pub growth_slope: f64,
}

impl BmvReport {
    /// `sup_{m <= k} |e_m|` for each prefix length in `checkpoints`.
    pub fn running_sup(&self, checkpoints: &[usize]) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut sup = 0.0f64;
        let mut next = 0;
        let mut sorted: Vec<usize> = checkpoints.to_vec();
        sorted.sort_unstable();
        for (i, e) in self.deviations.iter().enumerate() {
            sup = sup.max(e.abs());
            while next < sorted.len() && sorted[next] == i + 1 {
                out.push((sorted[next], sup));
                next += 1;
            }
        }
        out
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Deviations `D_m - m tau` along the orbit of `z0`.
pub fn bmv_deviations(f: &SolenoidMap, z0: &SolenoidPoint, tau: f64, n: u64) -> Result<BmvReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("bmv needs n >= 1".into()));
    }
    let mut orbit = Orbit::new(f, z0.clone());
    let mut deviations = Vec::with_capacity(n as usize);
    let mut sup_abs = 0.0f64;
    while orbit.index() < n {
        orbit.advance();
        let e = orbit.displacement() - orbit.index() as f64 * tau;
        sup_abs = sup_abs.max(e.abs());
        deviations.push(e);
    }
    let xs: Vec<f64> = (1..=n).map(|m| m as f64).collect();
    let abs: Vec<f64> = deviations.iter().map(|e| e.abs()).collect();
    let growth_slope = least_squares_slope(&xs, &abs);
    Ok(BmvReport {
        tau,
        deviations,
        sup_abs,
        growth_slope,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SemiconjugacyPoint {
    pub point: SolenoidPoint,
    /// `max_{0 <= n <= N} (D_n - n tau)`.
    pub sup_value: f64,
    /// `|H_N - H_{N/2}|`, the convergence diagnostic.
    pub stability: f64,
    pub n: u64,
}

/// `H_N(z)`: the point `z` moved along its leaf by `max_{0<=n<=N} (D_n - n tau)`.
pub fn semiconjugacy_sup(
    f: &SolenoidMap,
    tau: f64,
    z: &SolenoidPoint,
    n: u64,
) -> Result<SemiconjugacyPoint> {
    if n == 0 {
        return Err(Error::InvalidArgument("semiconjugacy needs N >= 1".into()));
    }
    let half = n / 2;
    let mut orbit = Orbit::new(f, z.clone());
    let mut best = 0.0f64;
    let mut best_half = 0.0f64;
    while orbit.index() < n {
        orbit.advance();
        let v = orbit.displacement() - orbit.index() as f64 * tau;
        best = best.max(v);
        if orbit.index() == half {
            best_half = best;
        }
    }
    Ok(SemiconjugacyPoint {
        point: z.shift_along_leaf(best)?,
        sup_value: best,
        stability: (best - best_half).abs(),
        n,
    })
}

/// `d(h(f(z)), h(z) + sigma(tau))`: how far `h_N` is from conjugating `f` to the rotation.
pub fn conjugacy_defect(f: &SolenoidMap, tau: f64, z: &SolenoidPoint, n: u64) -> Result<f64> {
    let hz = semiconjugacy_sup(f, tau, z, n)?.point;
    let hfz = semiconjugacy_sup(f, tau, &f.apply(z), n)?.point;
    let rotated = hz.shift_along_leaf(tau)?;
    hfz.distance(&rotated)
}
