use std::collections::BTreeMap;

use anyhow::{anyhow, bail};
use rand::Rng;
use serde::Serialize;

use solenoid_core::diagnostics::{minimality_classify, weyl_sum, MinimalityParams};
use solenoid_core::dynamics::{
    bmv_deviations, conjugacy_defect, rotation_element_birkhoff, rotation_interval,
    semiconjugacy_sup, MeasureSpec, SolenoidMap,
};
use solenoid_core::numbers::Rational;
use solenoid_core::registry::{EstimateContext, EstimatorRegistry};
use solenoid_core::solenoid::{Character, SolenoidPoint};
use solenoid_core::suspension::{
    character_cocycle_defect, cocycle_identity_defect, flow, h_hom, isometry_defect,
    PropertyReport, SuspensionCharacter, SuspensionPoint,
};

use crate::config::ExperimentConfig;
use crate::output::Artifacts;

/// What a command reports back to `main`.
pub struct Outcome {
    pub summary: String,
    pub pass: bool,
}

fn outcome(pass: bool, summary: String) -> Outcome {
    Outcome { summary, pass }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Shortest float text, with `0` for zero.
fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() < 1e-3 || v.abs() >= 1e6 {
        format!("{v:.3e}")
    } else {
        format!("{v}")
    }
}

/// The configured `tau`, the exact rotation number of a Denjoy map, or the
/// Birkhoff estimate from the first seed.
fn reference_tau(
    cfg: &ExperimentConfig,
    f: &SolenoidMap,
    seeds: &[SolenoidPoint],
) -> anyhow::Result<f64> {
    if let Some(t) = cfg.params.tau {
        return Ok(t);
    }
    let phi = f.phi().to_json();
    if phi["kind"] == "denjoy" {
        if let Some(t) = phi["tau"].as_f64() {
            return Ok(t);
        }
    }
    let seed = seeds.first().ok_or_else(|| anyhow!("no seeds"))?;
    Ok(rotation_element_birkhoff(f, seed, cfg.n)?.r)
}

#[derive(Serialize)]
struct EstimateRow {
    method: String,
    r: f64,
    exact: Option<String>,
    ci_halfwidth: f64,
    n_iterates: u64,
}

pub fn rho(cfg: &ExperimentConfig, out: &Artifacts) -> anyhow::Result<Outcome> {
    let f = cfg.build_map()?;
    let seeds = cfg.build_seeds()?;
    let ctx = EstimateContext {
        seed: seeds[0].clone(),
        n: cfg.n,
    };
    let registry = EstimatorRegistry::with_builtin();
    let mut rows = Vec::new();
    for name in &cfg.params.estimators {
        let est = registry
            .get(name)
            .map_err(|e| anyhow!("config field `params.estimators`: {e}"))?;
        if !est.applies(&f) {
            continue;
        }
        let e = est.estimate(&f, &ctx)?;
        rows.push(EstimateRow {
            method: e.method.clone(),
            r: e.r,
            exact: e.exact_r().map(|q| q.to_string()),
            ci_halfwidth: e.ci_halfwidth,
            n_iterates: e.n_iterates,
        });
    }
    let first = rows
        .first()
        .ok_or_else(|| anyhow!("no configured estimator applies to this map"))?;
    let spread = rows
        .iter()
        .map(|r| (r.r - first.r).abs())
        .fold(0.0, f64::max);
    let pass = spread < cfg.tolerances.oracle_agreement + first.ci_halfwidth;
    out.csv("rho.csv", &rows)?;
    out.json(
        "rho.json",
        &serde_json::json!({"estimates": rows, "spread": spread, "pass": pass}),
    )?;
    let mut summary = format!(
        "r={:.6}… exact={} ci={}",
        first.r,
        first.exact.as_deref().unwrap_or("none"),
        num(first.ci_halfwidth)
    );
    if rows.len() > 1 {
        summary.push_str(&format!(
            " spread={} over {} estimators {}",
            num(spread),
            rows.len(),
            verdict(pass)
        ));
    }
    Ok(outcome(pass, summary))
}

#[derive(Serialize)]
struct SeedRow {
    seed: usize,
    x: f64,
    t: String,
    r: f64,
    ci_halfwidth: f64,
}

pub fn interval(cfg: &ExperimentConfig, out: &Artifacts) -> anyhow::Result<Outcome> {
    let f = cfg.build_map()?;
    let seeds = cfg.build_seeds()?;
    let iv = rotation_interval(
        &f,
        &seeds,
        cfg.n,
        cfg.tolerances.interval_width,
        cfg.params.denominator_bound,
    )?;
    let rows: Vec<SeedRow> = seeds
        .iter()
        .zip(&iv.per_seed)
        .enumerate()
        .map(|(i, (z, e))| SeedRow {
            seed: i,
            x: z.x(),
            t: z.t().residue().to_string(),
            r: e.r,
            ci_halfwidth: e.ci_halfwidth,
        })
        .collect();
    out.csv("interval.csv", &rows)?;
    out.json("interval.json", &iv)?;
    Ok(outcome(
        true,
        format!(
            "interval=[{}, {}] width={} pseudo_irrational={} (D={}, K={})",
            iv.r_min,
            iv.r_max,
            num(iv.width()),
            iv.is_pseudo_irrational,
            iv.denominator_bound,
            iv.depth
        ),
    ))
}

#[derive(Serialize)]
struct DeviationRow {
    m: usize,
    e: f64,
}

pub fn bmv(cfg: &ExperimentConfig, out: &Artifacts) -> anyhow::Result<Outcome> {
    let f = cfg.build_map()?;
    let seeds = cfg.build_seeds()?;
    let tau = reference_tau(cfg, &f, &seeds)?;
    let rep = bmv_deviations(&f, &seeds[0], tau, cfg.n)?;
    out.csv(
        "bmv.csv",
        rep.deviations
            .iter()
            .enumerate()
            .map(|(i, e)| DeviationRow { m: i + 1, e: *e }),
    )?;
    let pass = cfg.params.bmv_bound.is_none_or(|b| rep.sup_abs < b);
    out.json(
        "bmv.json",
        &serde_json::json!({
            "tau": tau,
            "sup_abs": rep.sup_abs,
            "growth_slope": rep.growth_slope,
            "bound": cfg.params.bmv_bound,
            "pass": pass,
        }),
    )?;
    let mut summary = format!(
        "sup|e|={} slope={} tau={tau}",
        num(rep.sup_abs),
        num(rep.growth_slope)
    );
    if let Some(b) = cfg.params.bmv_bound {
        summary.push_str(&format!(" bound={b} {}", verdict(pass)));
    }
    Ok(outcome(pass, summary))
}

#[derive(Serialize)]
struct SemiconjRow {
    sample: usize,
    x: f64,
    t: String,
    h_x: f64,
    sup_value: f64,
    stability: f64,
    defect: f64,
}

pub fn semiconj(cfg: &ExperimentConfig, out: &Artifacts) -> anyhow::Result<Outcome> {
    let f = cfg.build_map()?;
    let seeds = cfg.build_seeds()?;
    let tau = reference_tau(cfg, &f, &seeds)?;
    let points = if cfg.seeds.is_empty() {
        cfg.random_points(cfg.params.samples.min(100_000), 1)?
    } else {
        seeds
    };
    let mut rows = Vec::with_capacity(points.len());
    for (i, z) in points.iter().enumerate() {
        let h = semiconjugacy_sup(&f, tau, z, cfg.n)?;
        let defect = conjugacy_defect(&f, tau, z, cfg.n)?;
        rows.push(SemiconjRow {
            sample: i,
            x: z.x(),
            t: z.t().residue().to_string(),
            h_x: h.point.x(),
            sup_value: h.sup_value,
            stability: h.stability,
            defect,
        });
    }
    let report = PropertyReport::from_defects(
        "semiconjugacy",
        rows.iter().map(|r| r.defect),
        cfg.tolerances.semiconjugacy,
    );
    out.csv("semiconj.csv", &rows)?;
    out.json(
        "semiconj.json",
        &serde_json::json!({"tau": tau, "report": report}),
    )?;
    Ok(outcome(
        report.pass,
        format!(
            "max_defect={} {} {:e} {} (tau={tau}, {} points)",
            num(report.max_defect),
            if report.pass { "<" } else { ">=" },
            report.tolerance,
            verdict(report.pass),
            report.samples
        ),
    ))
}

/// Random characters `chi_{a/b, n}` resolvable at the working depth.
fn random_character(rng: &mut impl Rng, depth: u32) -> SuspensionCharacter {
    let denominators: Vec<i64> = [1i64, 2, 3, 4, 5, 6, 8, 9, 10, 12]
        .into_iter()
        .filter(|b| Character::new(Rational::new(1, *b).expect("nonzero")).is_resolvable(depth))
        .collect();
    let b = denominators[rng.gen_range(0..denominators.len())];
    let a = rng.gen_range(-12..=12);
    SuspensionCharacter::new(Rational::new(a, b).expect("nonzero"), rng.gen_range(-3..=3))
}

pub fn cocycle_check(cfg: &ExperimentConfig, out: &Artifacts) -> anyhow::Result<Outcome> {
    let f = cfg.build_map()?;
    let samples = cfg.params.samples;
    let points = cfg.random_points(2 * samples, 2)?;
    let mut rng = cfg.rng(3);
    let tol = cfg.tolerances.cocycle;
    let mut defects: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for pair in points.chunks(2) {
        let chi = random_character(&mut rng, cfg.depth);
        let psi = random_character(&mut rng, cfg.depth);
        let p = SuspensionPoint::new(pair[0].clone(), rng.gen())?;
        let p2 = SuspensionPoint::new(pair[1].clone(), rng.gen())?;
        let t: f64 = rng.gen_range(0.0..5.0);
        let u: f64 = rng.gen_range(0.0..5.0);
        defects
            .entry("cocycle_identity")
            .or_default()
            .push(cocycle_identity_defect(&f, &chi, t, u, &p)?);
        defects
            .entry("character_cocycle")
            .or_default()
            .push(character_cocycle_defect(&f, &chi, t, &p)?);
        let two = flow(&f, &flow(&f, &p, t)?, u)?;
        let one = flow(&f, &p, t + u)?;
        defects
            .entry("flow_law")
            .or_default()
            .push(one.z.distance(&two.z)? + (one.s - two.s).abs());
        let mu = MeasureSpec::Birkhoff {
            seed: pair[0].clone(),
            n: 64,
        };
        let lhs = h_hom(&f, &mu, &chi.add(&psi))?.exact;
        let rhs = &h_hom(&f, &mu, &chi)?.exact + &h_hom(&f, &mu, &psi)?.exact;
        defects
            .entry("h_additivity")
            .or_default()
            .push((&lhs - &rhs).abs().to_f64());
        if f.translation_element().is_some() {
            defects
                .entry("isometry")
                .or_default()
                .push(isometry_defect(&f, &p, &p2, t)?);
        }
    }
    let reports: Vec<PropertyReport> = defects
        .into_iter()
        .map(|(check, d)| {
            let tolerance = if check == "isometry" {
                cfg.tolerances.isometry
            } else {
                tol
            };
            PropertyReport::from_defects(check, d, tolerance)
        })
        .collect();
    let pass = reports.iter().all(|r| r.pass);
    let max_defect = reports.iter().map(|r| r.max_defect).fold(0.0, f64::max);
    out.json("cocycle_check.json", &reports)?;
    out.csv("cocycle_check.csv", &reports)?;
    Ok(outcome(
        pass,
        format!(
            "max_defect={} {} {tol:e} {} ({} checks x {samples} samples)",
            num(max_defect),
            if pass { "<" } else { ">=" },
            verdict(pass),
            reports.len()
        ),
    ))
}

pub fn minimal(cfg: &ExperimentConfig, out: &Artifacts) -> anyhow::Result<Outcome> {
    let f = cfg.build_map()?;
    let seeds = cfg.build_seeds()?;
    let level = cfg.params.fiber_level.unwrap_or(3.min(cfg.depth));
    let params = MinimalityParams::new(cfg.params.x_bins, level, cfg.params.schedule.clone());
    let rep = minimality_classify(&f, &seeds[0], &params)?;
    let verdict_name = rep.verdict.to_string();
    let pass = match &cfg.params.expect_verdict {
        Some(v) => *v == verdict_name,
        None => true,
    };
    #[derive(Serialize)]
    struct FillRow {
        n: u64,
        fill_fraction: f64,
    }
    out.csv(
        "minimal_fill.csv",
        rep.fill_curve.iter().map(|(n, v)| FillRow {
            n: *n,
            fill_fraction: *v,
        }),
    )?;
    out.json("minimal.json", &rep)?;
    let last = rep.fill_curve.last().map(|(_, v)| *v).unwrap_or(0.0);
    let mut summary = format!(
        "verdict={verdict_name} fill={last:.4} (B={}, j={level})",
        params.x_bins
    );
    if let Some(v) = &cfg.params.expect_verdict {
        summary.push_str(&format!(" expected={v} {}", verdict(pass)));
    }
    Ok(outcome(pass, summary))
}

pub fn weyl(cfg: &ExperimentConfig, out: &Artifacts) -> anyhow::Result<Outcome> {
    let f = cfg.build_map()?;
    let seeds = cfg.build_seeds()?;
    let chi = Character::new(cfg.params.q.clone());
    if !chi.is_resolvable(cfg.depth) {
        bail!(
            "config field `params.q`: {} is not resolvable at depth {}",
            cfg.params.q,
            cfg.depth
        );
    }
    let rep = weyl_sum(&f, &chi, &seeds[0], cfg.n)?;
    let pass = rep.within_bound != Some(false);
    out.json("weyl.json", &rep)?;
    let bound = rep.bound.map(num).unwrap_or_else(|| "none".into());
    Ok(outcome(
        pass,
        format!(
            "|avg|={} bound={bound} q={} N={} {}",
            num(rep.modulus),
            cfg.params.q,
            rep.n,
            verdict(pass)
        ),
    ))
}
