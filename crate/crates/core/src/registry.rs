//! Name-keyed registries for displacement kinds and rotation estimators.
//!
//! Configs refer to both by string (`"kind": "poly"`, `--estimators birkhoff,oracle`);
//! new variants are added by registering another builder or estimator.

use std::collections::BTreeMap;
use std::sync::Arc;

use once_cell::sync::Lazy;
use serde::Deserialize;
use serde_json::Value;

use crate::diagnostics::{circle_oracle_leafwise, CircleLift};
use crate::dynamics::denjoy::DenjoyDisplacement;
use crate::dynamics::displacement::{
    CharacterPolynomial, Displacement, LevelPeriodicTable, PolyTerm,
};
use crate::dynamics::map::{ConjugatedDisplacement, SolenoidMap};
use crate::dynamics::rotation::{
    rotation_element_birkhoff, rotation_element_exact_haar, MeasureSpec, RotationEstimate,
};
use crate::error::{Error, Result};
use crate::numbers::Rational;
use crate::solenoid::SolenoidPoint;
use crate::suspension::rotation_element_from_h;

pub type DisplacementBuilder = fn(&Value, &DisplacementRegistry) -> Result<Arc<dyn Displacement>>;

pub struct DisplacementRegistry {
    builders: BTreeMap<&'static str, DisplacementBuilder>,
}

static STANDARD_DISPLACEMENTS: Lazy<DisplacementRegistry> =
    Lazy::new(DisplacementRegistry::with_builtin);

fn field<'a, T: Deserialize<'a>>(v: &'a Value, name: &str) -> Result<T> {
    let raw = v
        .get(name)
        .ok_or_else(|| Error::InvalidDisplacement(format!("missing field {name:?}")))?;
    T::deserialize(raw).map_err(|e| Error::InvalidDisplacement(format!("field {name:?}: {e}")))
}

/// A real given either as a JSON number or as an `"a/b"` string.
fn real(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::InvalidDisplacement(format!("bad number {n}"))),
        Value::String(s) => Ok(s.parse::<Rational>()?.to_f64()),
        other => Err(Error::InvalidDisplacement(format!(
            "expected a number, got {other}"
        ))),
    }
}

fn build_poly(v: &Value, _: &DisplacementRegistry) -> Result<Arc<dyn Displacement>> {
    let c = match v.get("c") {
        Some(c) => real(c)?,
        None => 0.0,
    };
    let terms: Vec<PolyTerm> = match v.get("terms") {
        Some(_) => field(v, "terms")?,
        None => Vec::new(),
    };
    Ok(Arc::new(CharacterPolynomial::new(c, terms)?))
}

fn build_table(v: &Value, _: &DisplacementRegistry) -> Result<Arc<dyn Displacement>> {
    Ok(Arc::new(LevelPeriodicTable::new(
        field(v, "level")?,
        field(v, "samples")?,
    )?))
}

fn build_denjoy(v: &Value, _: &DisplacementRegistry) -> Result<Arc<dyn Displacement>> {
    let tau = real(
        v.get("tau")
            .ok_or_else(|| Error::InvalidDisplacement("missing field \"tau\"".into()))?,
    )?;
    let gap_total = v.get("gap_total").map(real).transpose()?.unwrap_or(0.4);
    let ratio = v.get("ratio").map(real).transpose()?.unwrap_or(0.5);
    Ok(Arc::new(DenjoyDisplacement::new(tau, gap_total, ratio)?))
}

fn build_conjugate(v: &Value, reg: &DisplacementRegistry) -> Result<Arc<dyn Displacement>> {
    let f = reg.build(
        v.get("f")
            .ok_or_else(|| Error::InvalidDisplacement("missing field \"f\"".into()))?,
    )?;
    let h = reg.build(
        v.get("h")
            .ok_or_else(|| Error::InvalidDisplacement("missing field \"h\"".into()))?,
    )?;
    Ok(Arc::new(ConjugatedDisplacement::new(f, h)))
}

impl DisplacementRegistry {
    pub fn empty() -> Self {
        DisplacementRegistry {
            builders: BTreeMap::new(),
        }
    }

    pub fn with_builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("poly", build_poly);
        reg.register("table", build_table);
        reg.register("denjoy", build_denjoy);
        reg.register("conjugate", build_conjugate);
        reg
    }

    /// Shared registry with the built-in kinds.
    pub fn standard() -> &'static DisplacementRegistry {
        &STANDARD_DISPLACEMENTS
    }

    pub fn register(&mut self, kind: &'static str, builder: DisplacementBuilder) {
        self.builders.insert(kind, builder);
    }

    pub fn kinds(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, v: &Value) -> Result<Arc<dyn Displacement>> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidDisplacement("missing string field \"kind\"".into()))?;
        let builder = self
            .builders
            .get(kind)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "displacement kind",
                name: kind.to_string(),
            })?;
        builder(v, self)
    }
}

/// Inputs shared by all estimators.
#[derive(Clone, Debug)]
pub struct EstimateContext {
    pub seed: SolenoidPoint,
    pub n: u64,
}

pub trait RotationEstimator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Whether the estimator is defined for this map.
    fn applies(&self, f: &SolenoidMap) -> bool;

    fn estimate(&self, f: &SolenoidMap, ctx: &EstimateContext) -> Result<RotationEstimate>;
}

pub struct BirkhoffEstimator;

impl RotationEstimator for BirkhoffEstimator {
    fn name(&self) -> &'static str {
        "birkhoff"
    }

    fn applies(&self, _: &SolenoidMap) -> bool {
        true
    }

    fn estimate(&self, f: &SolenoidMap, ctx: &EstimateContext) -> Result<RotationEstimate> {
        rotation_element_birkhoff(f, &ctx.seed, ctx.n)
    }
}

pub struct HaarEstimator;

impl RotationEstimator for HaarEstimator {
    fn name(&self) -> &'static str {
        "haar"
    }

    fn applies(&self, f: &SolenoidMap) -> bool {
        f.phi().constant_value().is_some()
    }

    fn estimate(&self, f: &SolenoidMap, _: &EstimateContext) -> Result<RotationEstimate> {
        rotation_element_exact_haar(f)
    }
}

/// Classical rotation number of the induced circle map at the factoring level.
pub struct CircleOracleEstimator;

impl RotationEstimator for CircleOracleEstimator {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn applies(&self, f: &SolenoidMap) -> bool {
        f.phi().factor_level().is_some_and(|j| j <= f.depth())
    }

    fn estimate(&self, f: &SolenoidMap, ctx: &EstimateContext) -> Result<RotationEstimate> {
        let level = f
            .phi()
            .factor_level()
            .ok_or(Error::DoesNotFactor(f.depth()))?;
        let lift = CircleLift::from_map(f, level)?;
        let u0 = ctx.seed.level_project(level)?;
        let total = circle_oracle_leafwise(&lift, u0, ctx.n)?;
        let shift = f.alpha().level_project(level)?;
        Ok(RotationEstimate {
            r: total - shift,
            alpha_fiber: f.alpha().clone(),
            n_iterates: ctx.n,
            ci_halfwidth: 1.0 / ctx.n as f64 * lift.period(),
            method: "oracle".into(),
        })
    }
}

/// Rotation element read off the homomorphism `H` over the Birkhoff measure of the seed.
pub struct CocycleEstimator;

impl RotationEstimator for CocycleEstimator {
    fn name(&self) -> &'static str {
        "cocycle"
    }

    fn applies(&self, _: &SolenoidMap) -> bool {
        true
    }

    fn estimate(&self, f: &SolenoidMap, ctx: &EstimateContext) -> Result<RotationEstimate> {
        let mu = MeasureSpec::Birkhoff {
            seed: ctx.seed.clone(),
            n: ctx.n,
        };
        rotation_element_from_h(f, &mu)
    }
}

pub struct EstimatorRegistry {
    estimators: BTreeMap<&'static str, Arc<dyn RotationEstimator>>,
}

impl Default for EstimatorRegistry {
    fn default() -> Self {
        Self::with_builtin()
    }
}

impl EstimatorRegistry {
    pub fn with_builtin() -> Self {
        let mut reg = EstimatorRegistry {
            estimators: BTreeMap::new(),
        };
        reg.register(Arc::new(BirkhoffEstimator));
        reg.register(Arc::new(HaarEstimator));
        reg.register(Arc::new(CircleOracleEstimator));
        reg.register(Arc::new(CocycleEstimator));
        reg
    }

    pub fn register(&mut self, estimator: Arc<dyn RotationEstimator>) {
        self.estimators.insert(estimator.name(), estimator);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.estimators.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn RotationEstimator>> {
        self.estimators
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "estimator",
                name: name.to_string(),
            })
    }
}
