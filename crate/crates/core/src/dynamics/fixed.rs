use num_traits::ToPrimitive;

use crate::dynamics::map::SolenoidMap;
use crate::error::{Error, Result};
use crate::numbers::{factorial, ProfiniteInt};
use crate::solenoid::SolenoidPoint;

/// A returned fixed point has `|phi| <` this.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// Most fiber residues scanned when `phi` does not factor through a small level.
const MAX_SCANNED_FIBERS: u64 = 720;

/// Searches for a zero of `phi` (a fixed point of `f = id + phi`).
///
/// Scans `resolution` leaf bins on each fiber residue at the factoring level,
/// bisects along the leaf where `phi` changes sign, and otherwise accepts a
/// grid point or a golden-section refinement of `|phi|` below [`ROOT_TOLERANCE`].
pub fn find_fixed_point(f: &SolenoidMap, resolution: usize) -> Result<Option<SolenoidPoint>> {
    if !f.is_isotopic_to_identity() {
        return Err(Error::NotIsotopicToIdentity);
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument(
            "resolution must be at least 2".into(),
        ));
    }
    if let Some(c) = f.phi().constant_value() {
        return if c.abs() < ROOT_TOLERANCE {
            Ok(Some(SolenoidPoint::identity(f.depth())?))
        } else {
            Ok(None)
        };
    }
    let depth = f.depth();
    let level = f.phi().factor_level().unwrap_or(depth).min(depth);
    let fibers = factorial(level)
        .to_u64()
        .unwrap_or(u64::MAX)
        .min(MAX_SCANNED_FIBERS);
    let phi_at = |base: &SolenoidPoint, u: f64| -> Result<f64> {
        Ok(f.displacement(&base.shift_along_leaf(u)?))
    };

    let mut best: Option<(f64, SolenoidPoint, f64)> = None;
    for r in 0..fibers {
        let base = SolenoidPoint::canonicalize(0.0, ProfiniteInt::new(depth, r)?)?;
        let values = (0..=resolution)
            .map(|k| phi_at(&base, k as f64 / resolution as f64))
            .collect::<Result<Vec<_>>>()?;
        for (k, v) in values.iter().enumerate().take(resolution) {
            let u = k as f64 / resolution as f64;
            if v.abs() < ROOT_TOLERANCE {
                return Ok(Some(base.shift_along_leaf(u)?));
            }
            if best.as_ref().is_none_or(|(b, _, _)| v.abs() < *b) {
                best = Some((v.abs(), base.clone(), u));
            }
        }
        for k in 0..resolution {
            let (a, b) = (values[k], values[k + 1]);
            if a.signum() != b.signum() {
                let lo = k as f64 / resolution as f64;
                let hi = (k + 1) as f64 / resolution as f64;
                let root = bisect(|u| phi_at(&base, u), lo, hi, a)?;
                let p = base.shift_along_leaf(root)?;
                if f.displacement(&p).abs() < ROOT_TOLERANCE {
                    return Ok(Some(p));
                }
            }
        }
    }
    // Touching zeros (no sign change): refine |phi| around the best grid point.
    if let Some((_, base, u)) = best {
        let h = 1.0 / resolution as f64;
        let u = golden_min(|v| phi_at(&base, v).map(f64::abs), u - h, u + h)?;
        let p = base.shift_along_leaf(u)?;
        if f.displacement(&p).abs() < ROOT_TOLERANCE {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn bisect(g: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut glo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_min(g: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d)?;
        }
    }
    Ok(0.5 * (a + b))
}
