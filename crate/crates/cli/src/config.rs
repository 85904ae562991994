use std::path::Path;

use anyhow::{anyhow, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use solenoid_core::dynamics::SolenoidMap;
use solenoid_core::numbers::{ProfiniteInt, Rational, DEFAULT_DEPTH};
use solenoid_core::registry::DisplacementRegistry;
use solenoid_core::solenoid::SolenoidPoint;

/// A point given by its leaf coordinate and an integer fiber coordinate.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub x: f64,
    #[serde(default)]
    pub t: i64,
}

impl PointConfig {
    pub fn build(&self, depth: u32) -> anyhow::Result<SolenoidPoint> {
        Ok(SolenoidPoint::canonicalize(
            self.x,
            ProfiniteInt::new(depth, self.t)?,
        )?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    #[serde(default)]
    pub alpha: Option<PointConfig>,
    #[serde(default = "default_phi")]
    pub phi: Value,
}

fn default_phi() -> Value {
    serde_json::json!({"kind": "poly", "c": "1/3"})
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            alpha: None,
            phi: default_phi(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Estimator agreement in `rho`.
    pub oracle_agreement: f64,
    /// Interval width below which the rotation element counts as unique.
    pub interval_width: f64,
    pub cocycle: f64,
    pub semiconjugacy: f64,
    pub isometry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            oracle_agreement: 1e-4,
            interval_width: 1e-3,
            cocycle: 1e-9,
            semiconjugacy: 1e-6,
            isometry: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Denominator bound `D` for irrationality certification.
    pub denominator_bound: u64,
    /// Number of random seeds drawn when `seeds` is empty.
    pub random_seeds: usize,
    /// Reference rotation for `bmv` and `semiconj`; defaults to the Birkhoff estimate.
    pub tau: Option<f64>,
    /// `bmv` fails when `sup |e_m|` reaches this.
    pub bmv_bound: Option<f64>,
    pub samples: usize,
    pub estimators: Vec<String>,
    pub q: Rational,
    pub x_bins: usize,
    pub fiber_level: Option<u32>,
    pub schedule: Vec<u64>,
    /// `minimal` fails when the verdict differs.
    pub expect_verdict: Option<String>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            denominator_bound: 12,
            random_seeds: 8,
            tau: None,
            bmv_bound: None,
            samples: 1000,
            estimators: vec![
                "birkhoff".into(),
                "haar".into(),
                "oracle".into(),
                "cocycle".into(),
            ],
            q: Rational::integer(1),
            x_bins: 256,
            fiber_level: None,
            schedule: vec![10_000, 100_000, 1_000_000],
            expect_verdict: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default)]
    pub map: MapConfig,
    #[serde(default)]
    pub seeds: Vec<PointConfig>,
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: Params,
}

fn default_depth() -> u32 {
    DEFAULT_DEPTH
}

fn default_n() -> u64 {
    100_000
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            anyhow!("config field `{}`: {}", path, e.into_inner())
        })
    }

    /// SHA-256 of the effective configuration (after overrides).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical))
    }

    pub fn build_map(&self) -> anyhow::Result<SolenoidMap> {
        let phi = DisplacementRegistry::standard()
            .build(&self.map.phi)
            .map_err(|e| anyhow!("config field `map.phi`: {e}"))?;
        let alpha = match &self.map.alpha {
            Some(a) => a.build(self.depth).context("config field `map.alpha`")?,
            None => SolenoidPoint::identity(self.depth)?,
        };
        SolenoidMap::new(alpha, phi).map_err(|e| anyhow!("config field `map`: {e}"))
    }

    /// Configured seeds, or `params.random_seeds` points drawn from `rng_seed`.
    pub fn build_seeds(&self) -> anyhow::Result<Vec<SolenoidPoint>> {
        if !self.seeds.is_empty() {
            return self
                .seeds
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    s.build(self.depth)
                        .with_context(|| format!("config field `seeds[{i}]`"))
                })
                .collect();
        }
        if self.params.random_seeds == 0 {
            anyhow::bail!(
                "config field `params.random_seeds`: need at least one seed when `seeds` is empty"
            );
        }
        self.random_points(self.params.random_seeds, 0)
    }

    /// Deterministic sample of `count` points; `stream` separates independent uses.
    pub fn random_points(&self, count: usize, stream: u64) -> anyhow::Result<Vec<SolenoidPoint>> {
        let mut rng = self.rng(stream);
        (0..count)
            .map(|_| {
                let x: f64 = rng.gen();
                let t: u64 = rng.gen();
                Ok(SolenoidPoint::canonicalize(
                    x,
                    ProfiniteInt::new(self.depth, t)?,
                )?)
            })
            .collect()
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(stream);
        rng
    }
}
