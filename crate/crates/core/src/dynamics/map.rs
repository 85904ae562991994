use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::dynamics::displacement::{CharacterPolynomial, Displacement};
use crate::error::{Error, Result};
use crate::registry::DisplacementRegistry;
use crate::solenoid::SolenoidPoint;

/// Homeomorphism `f = R_alpha o (id + phi)` of the solenoid.
///
/// `phi` is evaluated before the translation: `f(z) = (z + alpha)` moved along
/// its leaf by `phi(z)`.
#[derive(Clone, Debug)]
pub struct SolenoidMap {
    alpha: SolenoidPoint,
    phi: Arc<dyn Displacement>,
}

impl SolenoidMap {
    pub fn new(alpha: SolenoidPoint, phi: Arc<dyn Displacement>) -> Result<Self> {
        let map = SolenoidMap { alpha, phi };
        map.validate()?;
        Ok(map)
    }

    /// `id + phi`.
    pub fn isotopic_to_identity(depth: u32, phi: Arc<dyn Displacement>) -> Result<Self> {
        Self::new(SolenoidPoint::identity(depth)?, phi)
    }

    /// Rotation along the base leaf by `c`, written as the constant displacement `phi = c`.
    pub fn rotation(depth: u32, c: f64) -> Result<Self> {
        Self::isotopic_to_identity(depth, Arc::new(CharacterPolynomial::constant(c)?))
    }

    /// Translation by an arbitrary element `alpha`.
    pub fn translation(alpha: SolenoidPoint) -> Result<Self> {
        Self::new(alpha, Arc::new(CharacterPolynomial::constant(0.0)?))
    }

    pub fn identity(depth: u32) -> Result<Self> {
        Self::rotation(depth, 0.0)
    }

    pub fn alpha(&self) -> &SolenoidPoint {
        &self.alpha
    }

    pub fn phi(&self) -> &Arc<dyn Displacement> {
        &self.phi
    }

    pub fn depth(&self) -> u32 {
        self.alpha.depth()
    }

    pub fn is_isotopic_to_identity(&self) -> bool {
        self.alpha.is_identity()
    }

    /// Pure translation: constant displacement.
    pub fn translation_element(&self) -> Option<SolenoidPoint> {
        let c = self.phi.constant_value()?;
        self.alpha.shift_along_leaf(c).ok()
    }

    pub fn displacement(&self, z: &SolenoidPoint) -> f64 {
        self.phi.eval(z)
    }

    /// `f(z)` together with `phi(z)`.
    pub fn step(&self, z: &SolenoidPoint) -> (SolenoidPoint, f64) {
        let d = self.phi.eval(z);
        let moved = if self.alpha.is_identity() {
            z.shift_along_leaf(d)
        } else {
            let w = z.add(&self.alpha).expect("depth checked at construction");
            w.shift_along_leaf(d)
        };
        (moved.expect("displacements are finite"), d)
    }

    pub fn apply(&self, z: &SolenoidPoint) -> SolenoidPoint {
        self.step(z).0
    }

    fn validate(&self) -> Result<()> {
        let depth = self.depth();
        self.phi.validate(depth)?;
        self.check_order_preservation()
    }

    /// Samples pairs on common leaves and checks the lifted map preserves order.
    pub fn check_order_preservation(&self) -> Result<()> {
        let depth = self.depth();
        let grid = 512;
        let fibers: i64 = match self.phi.factor_level() {
            Some(j) if j <= 4 => crate::numbers::factorial(j).to_i64().unwrap_or(1),
            _ => 4,
        };
        for r in 0..fibers {
            let base =
                SolenoidPoint::canonicalize(0.0, crate::numbers::ProfiniteInt::new(depth, r)?)?;
            let mut prev: Option<f64> = None;
            for k in 0..=grid {
                let u = k as f64 / grid as f64;
                let z = base.shift_along_leaf(u)?;
                let lifted = u + self.phi.eval(&z);
                if let Some(p) = prev {
                    if lifted <= p {
                        return Err(Error::InvalidDisplacement(format!(
                            "leaf order reversed near x = {u} on fiber {r}"
                        )));
                    }
                }
                prev = Some(lifted);
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    alpha: SolenoidPoint,
    phi: Value,
}

impl Serialize for SolenoidMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr {
            alpha: self.alpha.clone(),
            phi: self.phi.to_json(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SolenoidMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MapRepr::deserialize(deserializer)?;
        let phi = DisplacementRegistry::standard()
            .build(&repr.phi)
            .map_err(D::Error::custom)?;
        SolenoidMap::new(repr.alpha, phi).map_err(D::Error::custom)
    }
}

/// `g = h o f o h^-1` for `f = id + phi_f` and `h = id + psi`, with `h^-1`
/// computed by root finding along leaves.
#[derive(Clone, Debug)]
pub struct ConjugatedDisplacement {
    f: Arc<dyn Displacement>,
    h: Arc<dyn Displacement>,
}

impl ConjugatedDisplacement {
    pub fn new(f: Arc<dyn Displacement>, h: Arc<dyn Displacement>) -> Self {
        ConjugatedDisplacement { f, h }
    }

    /// Offset `u` with `h(z shifted by u) = z`, i.e. `u + psi(z + u) = 0`.
    pub fn inverse_offset(h: &dyn Displacement, z: &SolenoidPoint) -> f64 {
        let g = |u: f64| u + h.eval(&z.shift_along_leaf(u).expect("finite"));
        let bound = h.sup_abs() + 1e-9;
        let (mut lo, mut hi) = (-bound, bound);
        let (mut glo, mut ghi) = (g(lo), g(hi));
        if glo >= 0.0 {
            return lo;
        }
        if ghi <= 0.0 {
            return hi;
        }
        // Illinois false position, falling back to bisection.
        let mut side = 0i8;
        for _ in 0..200 {
            if hi - lo <= 4.0 * f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
                break;
            }
            let mut mid = (lo * ghi - hi * glo) / (ghi - glo);
            if !(mid > lo && mid < hi) {
                mid = 0.5 * (lo + hi);
            }
            let gm = g(mid);
            if gm == 0.0 {
                return mid;
            }
            if gm < 0.0 {
                lo = mid;
                glo = gm;
                if side == -1 {
                    ghi *= 0.5;
                }
                side = -1;
            } else {
                hi = mid;
                ghi = gm;
                if side == 1 {
                    glo *= 0.5;
                }
                side = 1;
            }
        }
        0.5 * (lo + hi)
    }
}

impl Displacement for ConjugatedDisplacement {
    fn kind(&self) -> &'static str {
        "conjugate"
    }

    fn eval(&self, z: &SolenoidPoint) -> f64 {
        let u = Self::inverse_offset(self.h.as_ref(), z);
        let w = z.shift_along_leaf(u).expect("finite");
        let df = self.f.eval(&w);
        let fw = w.shift_along_leaf(df).expect("finite");
        u + df + self.h.eval(&fw)
    }

    fn factor_level(&self) -> Option<u32> {
        Some(self.f.factor_level()?.max(self.h.factor_level()?))
    }

    fn eval_level(&self, level: u32, u: f64) -> Result<f64> {
        // Same construction on the level circle.
        let g = |v: f64| -> Result<f64> { Ok(v + self.h.eval_level(level, v)?) };
        let bound = self.h.sup_abs() + 1e-9;
        let (mut lo, mut hi) = (u - bound, u + bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid)? < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = 0.5 * (lo + hi);
        let fw = w + self.f.eval_level(level, w)?;
        Ok(fw + self.h.eval_level(level, fw)? - u)
    }

    fn sup_abs(&self) -> f64 {
        self.f.sup_abs() + 2.0 * self.h.sup_abs()
    }

    fn validate(&self, depth: u32) -> Result<()> {
        self.f.validate(depth)?;
        self.h.validate(depth)
    }

    fn to_json(&self) -> Value {
        serde_json::json!({
            "kind": "conjugate",
            "f": self.f.to_json(),
            "h": self.h.to_json(),
        })
    }
}
