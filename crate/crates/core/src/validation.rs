//! Acceptance checks and their report.
//!
//! Every check has a fixed id, a comparison and a target. A criterion runner
//! produces measured values for its checks; [`run_validation`] compares them
//! and assembles a report that depends only on the seed and the overrides, so
//! two runs serialize to the same bytes whatever the thread count.

use crate::analytic::{
    absarea_mean, absarea_mean_rate, absarea_variance, area_crossover_time, area_fourth_moment,
    area_second_moment, chi_a, chi_c_free, f1, occupation_density, occupation_density_free,
    scaling_w, scaling_w_dual, scgf_a, stationary_cdf, ABSAREA_FREE_MEAN,
};
use crate::error::{Error, Result};
use crate::ldp::{
    k1_second_derivative, legendre, log_k_grid, quadratic_coefficient, quadratic_feasible_bound,
    scgf_c, scgf_c_free, scgf_c_residual, variational_rate, AbsAreaCgf, CgfProvider, OccupationCgf,
    VariationalProblem,
};
use crate::quad::GaussLegendre;
use crate::renewal::{moments_via_renewal, InversionMethod};
use crate::sim::{
    chi_square_histogram, estimate_density, ks_distance, moment_summary, run_ensemble, run_summary,
    SimConfig,
};
use crate::specfun::airy_prime_first_zero;
use crate::Functional;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// How a measured value is compared with its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// |measured - target| <= tolerance
    Absolute,
    /// |measured - target| <= tolerance · |target|
    Relative,
    /// measured <= target + tolerance
    AtMost,
    /// measured > target
    Above,
}

impl Comparison {
    pub fn holds(self, measured: f64, target: f64, tolerance: f64) -> bool {
        match self {
            Comparison::Absolute => (measured - target).abs() <= tolerance,
            Comparison::Relative => (measured - target).abs() <= tolerance * target.abs(),
            Comparison::AtMost => measured <= target + tolerance,
            Comparison::Above => measured > target,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Absolute => "abs",
            Comparison::Relative => "rel",
            Comparison::AtMost => "<=",
            Comparison::Above => ">",
        })
    }
}

/// Static description of one check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CheckSpec {
    pub id: &'static str,
    pub criterion: u8,
    pub comparison: Comparison,
    pub target: f64,
    pub tolerance: f64,
    pub description: &'static str,
}

const fn spec(
    id: &'static str,
    criterion: u8,
    comparison: Comparison,
    target: f64,
    tolerance: f64,
    description: &'static str,
) -> CheckSpec {
    CheckSpec {
        id,
        criterion,
        comparison,
        target,
        tolerance,
        description,
    }
}

use Comparison::*;

/// Inventory of all checks, in report order.
pub const CHECKS: &[CheckSpec] = &[
    spec(
        "w_dual_forms",
        1,
        AtMost,
        1e-10,
        0.0,
        "max relative gap of W between series and Bessel forms",
    ),
    spec(
        "occupation_normalization",
        2,
        Absolute,
        1.0,
        1e-6,
        "integral of the occupation density, worst of three (r, T)",
    ),
    spec(
        "occupation_histogram_max_z",
        2,
        AtMost,
        4.0,
        0.0,
        "max |z| over 50 bins, 1e6 paths at r=1, T=5",
    ),
    spec(
        "occupation_histogram_chi2_dof",
        2,
        AtMost,
        1.5,
        0.0,
        "chi-square per degree of freedom of the same histogram",
    ),
    spec(
        "arcsine_limit_gap",
        3,
        AtMost,
        0.01,
        0.0,
        "max relative gap to the arcsine density at r=1e-3 on [0.1, 0.9]",
    ),
    spec(
        "occupation_legendre_error",
        4,
        AtMost,
        1e-8,
        0.0,
        "max error of the Legendre transform against the closed rate",
    ),
    spec(
        "occupation_rate_endpoints",
        4,
        AtMost,
        0.0,
        0.0,
        "max |chi(0) - r|, |chi(1) - r|",
    ),
    spec(
        "area_second_moment_renewal",
        5,
        AtMost,
        1e-6,
        0.0,
        "max relative gap of E[B^2], renewal inversion vs closed form",
    ),
    spec(
        "area_fourth_moment_renewal",
        5,
        AtMost,
        1e-6,
        0.0,
        "max relative gap of E[B^4], renewal inversion vs closed form",
    ),
    spec(
        "area_small_rho",
        5,
        AtMost,
        1e-5,
        0.0,
        "relative gap of E[B^2] to T^3/3 at rT=1e-6",
    ),
    spec(
        "area_crossover_residual",
        5,
        AtMost,
        1e-12,
        0.0,
        "max |r^2 T_x^2 / 6 - 1| at the asymptote intersection",
    ),
    spec(
        "area_mc_variance_z",
        5,
        AtMost,
        3.0,
        0.0,
        "MC variance of B_T at r=1, T=5 in standard errors",
    ),
    spec(
        "clt_variance",
        6,
        Relative,
        2.0,
        0.05,
        "variance of B_T/sqrt(T) at r=1, T=200",
    ),
    spec(
        "clt_abs_skewness",
        6,
        AtMost,
        0.05,
        0.0,
        "|skewness| of B_T",
    ),
    spec(
        "clt_abs_excess_kurtosis",
        6,
        AtMost,
        0.1,
        0.0,
        "|excess kurtosis| of B_T",
    ),
    spec(
        "absarea_mc_mean_z",
        7,
        AtMost,
        3.0,
        0.0,
        "MC mean of C_T at r=1, T=10 in standard errors",
    ),
    spec(
        "absarea_mc_variance_z",
        7,
        AtMost,
        3.0,
        0.0,
        "MC variance of C_T in standard errors",
    ),
    spec(
        "absarea_f1_small_rho",
        7,
        Absolute,
        ABSAREA_FREE_MEAN,
        1e-6,
        "f1 at rho=1e-8 against 4/(3 sqrt(2 pi))",
    ),
    spec(
        "absarea_mean_rate_limit",
        7,
        AtMost,
        0.01,
        0.0,
        "relative gap of sqrt(T) f1(rT) to 1/sqrt(2r) at rT=1e4",
    ),
    spec(
        "absarea_scgf_residual",
        8,
        AtMost,
        1e-10,
        0.0,
        "max |r G0(k, lambda + r) - 1| over k, r",
    ),
    spec(
        "absarea_scgf_near_zero",
        8,
        AtMost,
        1e-4,
        0.0,
        "max |lambda(-1e-8)| for r in {0.5, 1}",
    ),
    spec(
        "absarea_scgf_free_limit",
        8,
        AtMost,
        0.01,
        0.0,
        "max relative gap to the free power law at r=1e-4",
    ),
    spec(
        "airy_zero_vs_quadrature",
        9,
        AtMost,
        1e-8,
        0.0,
        "gap between the Ai' zero and a contour-quadrature oracle",
    ),
    spec(
        "airy_zero_value",
        9,
        Absolute,
        -1.018_792_971_6,
        1e-8,
        "first zero of Ai'",
    ),
    spec(
        "free_absarea_legendre_error",
        9,
        AtMost,
        1e-6,
        0.0,
        "max error of the free rate curve on [0.2, 5]",
    ),
    spec(
        "variational_occupation_error",
        10,
        AtMost,
        0.1,
        0.0,
        "max relative error at phi=0.8, r=1 over 16, 32, 64 nodes",
    ),
    spec(
        "variational_occupation_refinement",
        10,
        AtMost,
        0.0,
        1e-12,
        "largest error increase under 16 -> 32 -> 64",
    ),
    spec(
        "variational_at_mean",
        10,
        AtMost,
        1e-3,
        0.0,
        "variational rate at the mean",
    ),
    spec(
        "variational_flat_branch",
        10,
        AtMost,
        0.05,
        0.0,
        "max absolute-area rate above the mean at 64 nodes, r=1",
    ),
    spec(
        "variational_flat_refinement",
        10,
        AtMost,
        0.0,
        1e-12,
        "largest increase of the flat-branch value under refinement",
    ),
    spec(
        "quadratic_coefficient_positive",
        10,
        Above,
        0.0,
        0.0,
        "C_r at r=1, alpha=3/2",
    ),
    spec(
        "quadratic_coefficient_bound",
        10,
        AtMost,
        0.282_942_121_052_89,
        0.0,
        "C_r against 1/(2 Gamma(5/2)^2)",
    ),
    spec(
        "quadratic_coefficient_refinement",
        10,
        AtMost,
        1e-6,
        0.0,
        "relative change of C_r from 32 to 64 nodes",
    ),
    spec(
        "stationary_ks",
        11,
        AtMost,
        0.01,
        0.0,
        "KS distance of 1e5 endpoints at r=1, T=10 to the stationary law",
    ),
    spec(
        "thread_invariance",
        12,
        AtMost,
        0.0,
        0.0,
        "number of outputs that change with the thread count",
    ),
];

pub const CRITERIA: std::ops::RangeInclusive<u8> = 1..=12;

/// Settings of a validation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationConfig {
    pub seed: u64,
    /// Criteria to run; empty means all.
    pub criteria: Vec<u8>,
    /// Overrides keyed `<check id>.target` or `<check id>.tolerance`.
    pub overrides: BTreeMap<String, f64>,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            seed: DEFAULT_SEED,
            criteria: Vec::new(),
            overrides: BTreeMap::new(),
        }
    }
}

impl ValidationConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_criteria(mut self, criteria: Vec<u8>) -> Self {
        self.criteria = criteria;
        self
    }

    /// Add an override; the key must name a known check and field.
    pub fn with_override(mut self, key: &str, value: f64) -> Result<Self> {
        parse_override(key)?;
        self.overrides.insert(key.to_string(), value);
        Ok(self)
    }

    fn enabled(&self) -> Vec<u8> {
        let mut c: Vec<u8> = if self.criteria.is_empty() {
            CRITERIA.collect()
        } else {
            self.criteria.clone()
        };
        c.sort_unstable();
        c.dedup();
        c
    }

    fn check(&self) -> Result<()> {
        for c in &self.criteria {
            if !CRITERIA.contains(c) {
                return Err(Error::InvalidConfig(format!("no criterion {c}")));
            }
        }
        for k in self.overrides.keys() {
            parse_override(k)?;
        }
        Ok(())
    }
}

fn parse_override(key: &str) -> Result<(&'static CheckSpec, bool)> {
    let (id, field) = key.rsplit_once('.').ok_or_else(|| {
        Error::InvalidConfig(format!("override `{key}` needs .target or .tolerance"))
    })?;
    let spec = CHECKS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown check `{id}`")))?;
    match field {
        "target" => Ok((spec, true)),
        "tolerance" => Ok((spec, false)),
        _ => Err(Error::InvalidConfig(format!(
            "override field `{field}` is not target or tolerance"
        ))),
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub criterion: u8,
    pub description: &'static str,
    pub comparison: Comparison,
    /// `None` when the runner failed.
    pub measured: Option<f64>,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    /// One line: criterion, id, PASS/FAIL, measured vs target.
    pub fn line(&self) -> String {
        let measured = match self.measured {
            Some(m) => format!("{m:.6e}"),
            None => "error".into(),
        };
        let mut s = format!(
            "criterion {:>2} {:<36} {}  measured {} {} target {:e}",
            self.criterion,
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            measured,
            self.comparison,
            self.target,
        );
        if self.tolerance != 0.0 {
            s.push_str(&format!(" tol {:e}", self.tolerance));
        }
        if let Some(e) = &self.error {
            s.push_str(&format!("  ({e})"));
        }
        s
    }
}

/// Full report of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub config: ValidationConfig,
    pub checks: Vec<CheckResult>,
    pub n_passed: usize,
    pub n_failed: usize,
    pub passed: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Measured = Vec<(&'static str, f64)>;

fn runner(criterion: u8) -> fn(u64) -> Result<Measured> {
    match criterion {
        1 => criterion_w_dual,
        2 => criterion_occupation_density,
        3 => criterion_arcsine_limit,
        4 => criterion_occupation_ldp,
        5 => criterion_area_moments,
        6 => criterion_clt,
        7 => criterion_absarea_moments,
        8 => criterion_absarea_scgf,
        9 => criterion_free_absarea,
        10 => criterion_variational,
        11 => criterion_stationary,
        12 => criterion_reproducibility,
        _ => unreachable!("criterion range is checked"),
    }
}

/// Run one criterion and compare its measured values.
pub fn run_criterion(criterion: u8, config: &ValidationConfig) -> Result<Vec<CheckResult>> {
    config.check()?;
    if !CRITERIA.contains(&criterion) {
        return Err(Error::InvalidConfig(format!("no criterion {criterion}")));
    }
    // decorrelate the ensembles of different criteria
    let seed = config.seed.wrapping_add(criterion as u64);
    let measured = runner(criterion)(seed);
    Ok(CHECKS
        .iter()
        .filter(|c| c.criterion == criterion)
        .map(|c| {
            let target = config
                .overrides
                .get(&format!("{}.target", c.id))
                .copied()
                .unwrap_or(c.target);
            let tolerance = config
                .overrides
                .get(&format!("{}.tolerance", c.id))
                .copied()
                .unwrap_or(c.tolerance);
            let (value, error) = match &measured {
                Ok(m) => match m.iter().find(|(id, _)| *id == c.id) {
                    Some((_, v)) => (Some(*v), None),
                    None => (None, Some("not measured".to_string())),
                },
                Err(e) => (None, Some(e.to_string())),
            };
            let passed = value.is_some_and(|v| c.comparison.holds(v, target, tolerance));
            CheckResult {
                id: c.id,
                criterion: c.criterion,
                description: c.description,
                comparison: c.comparison,
                measured: value.filter(|v| v.is_finite()),
                target,
                tolerance,
                passed,
                error,
            }
        })
        .collect())
}

/// Run every enabled criterion.
pub fn run_validation(config: &ValidationConfig) -> Result<ValidationReport> {
    config.check()?;
    let mut checks = Vec::new();
    for c in config.enabled() {
        checks.extend(run_criterion(c, config)?);
    }
    let n_passed = checks.iter().filter(|c| c.passed).count();
    let n_failed = checks.len() - n_passed;
    Ok(ValidationReport {
        config: ValidationConfig {
            criteria: config.enabled(),
            ..config.clone()
        },
        checks,
        n_passed,
        n_failed,
        passed: n_failed == 0,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_w_dual(_seed: u64) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        worst = worst.max(rel(scaling_w(x)?, scaling_w_dual(x)?));
    }
    Ok(vec![("w_dual_forms", worst)])
}

/// ∫ p over [a, b] with a = T sin²θ, which removes the endpoint singularities.
fn occupation_mass(lo: f64, hi: f64, t: f64, r: f64) -> Result<f64> {
    let gl = GaussLegendre::new(20);
    let th = |a: f64| (a / t).sqrt().clamp(0.0, 1.0).asin();
    let mut err = None;
    let v = gl.integrate_composite(th(lo), th(hi), 8, |q| {
        let (s, c) = q.sin_cos();
        match occupation_density(t * s * s, t, r) {
            Ok(p) => p * 2.0 * t * s * c,
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

fn criterion_occupation_density(seed: u64) -> Result<Measured> {
    let mut norm = 1.0;
    for (r, t) in [(1.0, 5.0), (2.0, 3.0), (0.5, 8.0)] {
        let m = occupation_mass(0.0, t, t, r)?;
        if (m - 1.0).abs() > (norm - 1.0f64).abs() {
            norm = m;
        }
    }
    let (r, t, bins) = (1.0, 5.0, 50);
    let samples = run_ensemble(&SimConfig::new(r, t, 1_000_000, seed))?;
    let a: Vec<f64> = samples.iter().map(|s| s.a).collect();
    let edges: Vec<f64> = (0..=bins).map(|i| t * i as f64 / bins as f64).collect();
    let hist = estimate_density(&a, &edges)?;
    let probs = edges
        .windows(2)
        .map(|w| occupation_mass(w[0], w[1], t, r))
        .collect::<Result<Vec<f64>>>()?;
    let (z, chi2, dof) = chi_square_histogram(&hist, &probs);
    let max_z = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(vec![
        ("occupation_normalization", norm),
        ("occupation_histogram_max_z", max_z),
        ("occupation_histogram_chi2_dof", chi2 / dof as f64),
    ])
}

fn criterion_arcsine_limit(_seed: u64) -> Result<Measured> {
    let (r, t) = (1e-3, 1.0);
    let mut worst: f64 = 0.0;
    for i in 0..=80 {
        let a = 0.1 + 0.01 * i as f64;
        worst = worst.max(rel(
            occupation_density(a, t, r)?,
            occupation_density_free(a, t)?,
        ));
    }
    Ok(vec![("arcsine_limit_gap", worst)])
}

fn criterion_occupation_ldp(_seed: u64) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    let mut ends: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let w = 12.0 * r;
        let ks: Vec<f64> = (0..4001)
            .map(|i| -w + 2.0 * w * i as f64 / 4000.0)
            .collect();
        let curve = legendre(|k| Ok(scgf_a(k, r)), &ks, None)?;
        for (a, chi) in &curve.points {
            if (0.05..=0.95).contains(a) {
                worst = worst.max((chi - chi_a(*a, r).to_f64()).abs());
            }
        }
        for i in 0..=90 {
            let a = 0.05 + 0.01 * i as f64;
            let v = curve
                .eval(a)
                .ok_or(Error::InvalidConfig(format!("curve does not cover a={a}")))?;
            worst = worst.max((v - chi_a(a, r).to_f64()).abs());
        }
        for a in [0.0, 1.0] {
            ends = ends.max((chi_a(a, r).to_f64() - r).abs());
        }
    }
    Ok(vec![
        ("occupation_legendre_error", worst),
        ("occupation_rate_endpoints", ends),
    ])
}

fn criterion_area_moments(seed: u64) -> Result<Measured> {
    let r = 1.0;
    let (mut m2, mut m4): (f64, f64) = (0.0, 0.0);
    for t in [0.1, 1.0, 10.0] {
        let m = moments_via_renewal(Functional::Area, r, t, 4, InversionMethod::Talbot)?;
        m2 = m2.max(rel(m[2], area_second_moment(t, r)?));
        m4 = m4.max(rel(m[4], area_fourth_moment(t, r)?));
    }
    let small = rel(area_second_moment(1.0, 1e-6)?, 1.0 / 3.0);
    let mut crossing: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let tx = area_crossover_time(r)?;
        crossing = crossing.max((r * r * tx * tx / 6.0 - 1.0).abs());
    }
    let (r, t) = (1.0, 5.0);
    let samples = run_ensemble(&SimConfig::new(r, t, 100_000, seed))?;
    let b: Vec<f64> = samples.iter().map(|s| s.b).collect();
    let s = moment_summary(&b)?;
    let z = (s.variance - area_second_moment(t, r)?).abs() / s.std_error_variance;
    Ok(vec![
        ("area_second_moment_renewal", m2),
        ("area_fourth_moment_renewal", m4),
        ("area_small_rho", small),
        ("area_crossover_residual", crossing),
        ("area_mc_variance_z", z),
    ])
}

fn criterion_clt(seed: u64) -> Result<Measured> {
    let (r, t) = (1.0, 200.0);
    let samples = run_ensemble(&SimConfig::new(r, t, 100_000, seed))?;
    let scaled: Vec<f64> = samples.iter().map(|s| s.b / t.sqrt()).collect();
    let s = moment_summary(&scaled)?;
    Ok(vec![
        ("clt_variance", s.variance),
        ("clt_abs_skewness", s.skewness.abs()),
        ("clt_abs_excess_kurtosis", s.excess_kurtosis.abs()),
    ])
}

fn criterion_absarea_moments(seed: u64) -> Result<Measured> {
    let (r, t) = (1.0, 10.0);
    let samples = run_ensemble(&SimConfig::new(r, t, 100_000, seed))?;
    let c: Vec<f64> = samples.iter().map(|s| s.c).collect();
    let s = moment_summary(&c)?;
    let zm = (s.mean - absarea_mean(t, r)?).abs() / s.std_error_mean;
    let zv = (s.variance - absarea_variance(t, r)?).abs() / s.std_error_variance;
    let t_big: f64 = 1e4;
    let limit = rel(t_big.sqrt() * f1(t_big)?, 1.0 / 2f64.sqrt());
    Ok(vec![
        ("absarea_mc_mean_z", zm),
        ("absarea_mc_variance_z", zv),
        ("absarea_f1_small_rho", f1(1e-8)?),
        ("absarea_mean_rate_limit", limit),
    ])
}

fn criterion_absarea_scgf(_seed: u64) -> Result<Measured> {
    let mut residual: f64 = 0.0;
    let mut near_zero: f64 = 0.0;
    for r in [0.5, 1.0] {
        for k in [-0.1, -1.0, -10.0] {
            let l = scgf_c(k, r)?;
            residual = residual.max(scgf_c_residual(k, r, l)?.abs());
        }
        near_zero = near_zero.max(scgf_c(-1e-8, r)?.abs());
    }
    let mut free: f64 = 0.0;
    for k in [-0.5, -1.0, -4.0] {
        free = free.max(rel(scgf_c(k, 1e-4)?, scgf_c_free(k)?));
    }
    Ok(vec![
        ("absarea_scgf_residual", residual),
        ("absarea_scgf_near_zero", near_zero),
        ("absarea_scgf_free_limit", free),
    ])
}

/// Ai'(x) from the steepest-descent contour, for x in a bounded range:
/// Ai'(x) = -(1/π) Im ∫_0^∞ s e^{2iπ/3} exp(-s³/3 - x s e^{iπ/3}) ds.
fn airy_prime_by_quadrature(x: f64) -> f64 {
    let gl = GaussLegendre::new(20);
    let (c1, s1) = ((PI / 3.0).cos(), (PI / 3.0).sin());
    let (c2, s2) = ((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
    let v = gl.integrate_composite(0.0, 12.0, 48, |s| {
        let mag = (-s * s * s / 3.0 - x * s * c1).exp();
        let ph = -x * s * s1;
        // Im[s e^{2iπ/3} · mag · e^{i ph}]
        s * mag * (s2 * ph.cos() + c2 * ph.sin())
    });
    -v / PI
}

fn criterion_free_absarea(_seed: u64) -> Result<Measured> {
    let (mut a, mut b) = (-1.2, -0.9);
    let fa = airy_prime_by_quadrature(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if airy_prime_by_quadrature(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let oracle = 0.5 * (a + b);
    let zero = airy_prime_first_zero()?;
    let ks = log_k_grid(1e-5, 1e5, 2000);
    let curve = legendre(scgf_c_free, &ks, None)?;
    let mut worst: f64 = 0.0;
    for (c, chi) in &curve.points {
        if (0.2..=5.0).contains(c) {
            worst = worst.max((chi - chi_c_free(*c)?).abs());
        }
    }
    for i in 0..=48 {
        let c = 0.2 + 0.1 * i as f64;
        let v = curve
            .eval(c)
            .ok_or(Error::InvalidConfig(format!("curve does not cover c={c}")))?;
        worst = worst.max((v - chi_c_free(c)?).abs());
    }
    Ok(vec![
        ("airy_zero_vs_quadrature", (zero - oracle).abs()),
        ("airy_zero_value", zero),
        ("free_absarea_legendre_error", worst),
    ])
}

fn criterion_variational(_seed: u64) -> Result<Measured> {
    let occ: Arc<dyn CgfProvider> = Arc::new(OccupationCgf);
    let exact = chi_a(0.8, 1.0).to_f64();
    let mut errs = Vec::new();
    for n in [16, 32, 64] {
        let s = variational_rate(&VariationalProblem::new(occ.clone(), 1.0, 0.8).with_nodes(n))?;
        errs.push(rel(s.chi.to_f64(), exact));
    }
    let worst_err = errs.iter().cloned().fold(0.0, f64::max);
    let err_rise = errs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let at_mean = variational_rate(&VariationalProblem::new(occ, 1.0, 0.5).with_nodes(32))?
        .chi
        .to_f64();

    let abs_provider = AbsAreaCgf::new()?;
    let abs: Arc<dyn CgfProvider> = Arc::new(abs_provider.clone());
    let c_star = absarea_mean_rate(1.0)?;
    let (mut flat, mut flat_rise): (f64, f64) = (0.0, 0.0);
    for f in [1.25, 1.5, 2.0] {
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64] {
            let p = VariationalProblem::new(abs.clone(), 1.0, f * c_star).with_nodes(n);
            let v = variational_rate(&p)?.chi.to_f64();
            flat_rise = flat_rise.max(v - prev);
            prev = v;
        }
        flat = flat.max(prev);
    }
    let kpp = k1_second_derivative(&abs_provider)?;
    let c32 = quadratic_coefficient(1.0, 1.5, kpp, 0.0, 32)?;
    let c64 = quadratic_coefficient(1.0, 1.5, kpp, 0.0, 64)?;
    debug_assert!((quadratic_feasible_bound(1.0, 1.5) - 0.282_942_121_052_89).abs() < 1e-12);
    Ok(vec![
        ("variational_occupation_error", worst_err),
        ("variational_occupation_refinement", err_rise),
        ("variational_at_mean", at_mean),
        ("variational_flat_branch", flat),
        ("variational_flat_refinement", flat_rise.max(0.0)),
        ("quadratic_coefficient_positive", c64),
        ("quadratic_coefficient_bound", c64),
        ("quadratic_coefficient_refinement", rel(c32, c64)),
    ])
}

fn criterion_stationary(seed: u64) -> Result<Measured> {
    let r = 1.0;
    let samples = run_ensemble(&SimConfig::new(r, 10.0, 100_000, seed))?;
    let x: Vec<f64> = samples.iter().map(|s| s.x_end).collect();
    let d = ks_distance(&x, |v| stationary_cdf(v, r).unwrap_or(f64::NAN));
    Ok(vec![("stationary_ks", d)])
}

fn criterion_reproducibility(seed: u64) -> Result<Measured> {
    let cfg = SimConfig::new(1.0, 5.0, 20_000, seed);
    let run = |threads: usize| -> Result<(String, String)> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| {
            let samples = run_ensemble(&cfg)?;
            let summary = run_summary(&cfg)?;
            let curve = legendre(|k| Ok(scgf_a(k, 1.0)), &log_k_grid(1e-3, 1e2, 64), None)?;
            Ok((
                serde_json::to_string(&samples).expect("samples serialize"),
                serde_json::to_string(&(summary, curve.points)).expect("summary serializes"),
            ))
        })
    };
    let base = run(1)?;
    let mut differing = 0;
    for threads in [2, 3, 1] {
        let other = run(threads)?;
        differing += (other.0 != base.0) as usize + (other.1 != base.1) as usize;
    }
    Ok(vec![("thread_invariance", differing as f64)])
}
