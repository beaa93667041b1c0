//! One function per subcommand. Each reads its keys from [`Params`], rejects
//! unknown ones, computes, and writes a table that carries the resolved keys.

use crate::output::{config_comment, emit, fmt_f64, json_document, json_f64, Cell, Format, Table};
use crate::params::Params;
use crate::CliError;
use rbm_core::analytic::{
    absarea_mean, absarea_second_moment, area_fourth_moment, area_second_moment, chi_a, chi_c_free,
    occupation_density, occupation_density_free, scgf_a, scgf_a_derivative,
};
use rbm_core::ldp::{
    absarea_rate_curve, chi_c, legendre, legendre_with_slope, log_k_grid, provider_for, scgf_c,
    scgf_c_free, variational_rate, Formulation, RateFunctionCurve, VariationalProblem,
};
use rbm_core::renewal::{moments_via_renewal, InversionMethod};
use rbm_core::sim::{
    default_dt, estimate_density, estimate_moments, run_ensemble, write_samples_csv, SimConfig,
};
use rbm_core::validation::{run_validation, ValidationConfig, CHECKS, DEFAULT_SEED};
use rbm_core::Functional;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub struct Sink {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Sink {
    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn write(&self, text: &str) -> Result<(), CliError> {
        emit(self.path.as_deref(), text)
    }
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn functional(
    p: &mut Params,
    default: &str,
    allowed: &[Functional],
) -> Result<Functional, CliError> {
    let f: Functional = p.parsed("functional", default)?;
    if !allowed.contains(&f) {
        let names: Vec<&str> = allowed.iter().map(|f| f.name()).collect();
        return Err(config_error(format!(
            "functional {f} not supported here (expected one of {})",
            names.join(", ")
        )));
    }
    Ok(f)
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(format!(
            "`{name}` must be positive and finite, got {v}"
        )))
    }
}

fn sim_config(p: &mut Params) -> Result<SimConfig, CliError> {
    let r = p.f64("r", "1")?;
    let t = p.f64("t", "1")?;
    let n = p.usize("n", "1000")?;
    let seed = p.u64("seed", "1")?;
    let dt_text = p.string("dt", "auto")?;
    let mut cfg = SimConfig::new(r, t, n, seed);
    if dt_text != "auto" {
        let dt: f64 = dt_text
            .parse()
            .map_err(|_| config_error(format!("`dt`: cannot parse {dt_text:?}")))?;
        cfg = cfg.with_dt(dt);
    } else if r >= 0.0 && t > 0.0 {
        cfg = cfg.with_dt(default_dt(r, t));
        p.record("dt", fmt_f64(cfg.dt));
    }
    Ok(cfg)
}

pub fn simulate(mut p: Params, out: &Sink) -> Result<(), CliError> {
    let cfg = sim_config(&mut p)?;
    p.finish()?;
    cfg.validate()?;
    let samples = run_ensemble(&cfg)?;
    let mut summary = serde_json::Map::new();
    for f in Functional::ALL {
        let s = estimate_moments(&samples, f).ok();
        summary.insert(f.name().into(), json!(s));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.x_end).collect();
    summary.insert(
        "x_end".into(),
        json!(rbm_core::sim::moment_summary(&xs).ok()),
    );
    let resets =
        samples.iter().map(|s| s.n_resets as f64).sum::<f64>() / samples.len().max(1) as f64;
    summary.insert("mean_resets".into(), json_f64(resets));
    let doc = json_document(p.resolved(), vec![("summary", Value::Object(summary))]);
    match out.format(Format::Csv) {
        Format::Json => out.write(&doc),
        Format::Csv => {
            let mut buf = config_comment(p.resolved()).into_bytes();
            write_samples_csv(&mut buf, &samples).map_err(|e| CliError::Io(e.to_string()))?;
            let text = String::from_utf8(buf).expect("csv is utf-8");
            out.write(&text)?;
            match &out.path {
                Some(path) => emit(Some(&path.with_extension("summary.json")), &doc),
                None => {
                    eprint!("{doc}");
                    Ok(())
                }
            }
        }
    }
}

pub fn density(mut p: Params, out: &Sink) -> Result<(), CliError> {
    functional(&mut p, "occupation", &[Functional::Occupation])?;
    let r = p.f64("r", "1")?;
    let t = p.f64("t", "10")?;
    let n_grid = p.usize("n_grid", "101")?;
    let mc_paths = p.usize("mc_paths", "0")?;
    let seed = p.u64("seed", "1")?;
    p.finish()?;
    positive("r", r)?;
    positive("t", t)?;
    if n_grid < 2 {
        return Err(config_error("`n_grid` must be at least 2"));
    }
    // grid points are the centres of n_grid equal bins, so the MC histogram lines up
    let h = t / n_grid as f64;
    let grid: Vec<f64> = (0..n_grid).map(|i| (i as f64 + 0.5) * h).collect();
    let mc = if mc_paths > 0 {
        let samples = run_ensemble(&SimConfig::new(r, t, mc_paths, seed))?;
        let a: Vec<f64> = samples.iter().map(|s| s.a).collect();
        let edges: Vec<f64> = (0..=n_grid).map(|i| i as f64 * h).collect();
        Some(estimate_density(&a, &edges)?.normalized_density)
    } else {
        None
    };
    let mut table = Table::new(vec!["a", "density", "arcsine", "mc"]);
    for (i, a) in grid.iter().enumerate() {
        table.push(vec![
            (*a).into(),
            occupation_density(*a, t, r)?.into(),
            occupation_density_free(*a, t)?.into(),
            mc.as_ref().map(|m| m[i]).into(),
        ]);
    }
    out.write(&table.render(out.format(Format::Csv), p.resolved()))
}

fn inversion_method(name: &str) -> Result<InversionMethod, CliError> {
    match name {
        "talbot" => Ok(InversionMethod::Talbot),
        "gaver-stehfest" | "stehfest" => Ok(InversionMethod::GaverStehfest),
        other => Err(config_error(format!(
            "unknown method {other:?} (talbot, gaver-stehfest)"
        ))),
    }
}

fn closed_moment(f: Functional, n: usize, t: f64, r: f64) -> Result<Option<f64>, CliError> {
    Ok(match (f, n) {
        (_, 0) => Some(1.0),
        (Functional::Area, n) if n % 2 == 1 => Some(0.0),
        (Functional::Area, 2) => Some(area_second_moment(t, r)?),
        (Functional::Area, 4) => Some(area_fourth_moment(t, r)?),
        (Functional::AbsArea, 1) => Some(absarea_mean(t, r)?),
        (Functional::AbsArea, 2) => Some(absarea_second_moment(t, r)?),
        (Functional::Occupation, 1) => Some(0.5 * t),
        _ => None,
    })
}

pub fn moments(mut p: Params, out: &Sink) -> Result<(), CliError> {
    let f = functional(&mut p, "area", &Functional::ALL)?;
    let r = p.f64("r", "1")?;
    let t = p.f64("t", "1")?;
    let max_order = p.usize(
        "max_order",
        if f == Functional::AbsArea { "2" } else { "4" },
    )?;
    let method = inversion_method(&p.string("method", "talbot")?)?;
    let mc_paths = p.usize("mc_paths", "0")?;
    let seed = p.u64("seed", "1")?;
    p.finish()?;
    positive("r", r)?;
    positive("t", t)?;
    let m = moments_via_renewal(f, r, t, max_order, method)?;
    let mc: Option<Vec<f64>> = if mc_paths > 0 {
        let samples = run_ensemble(&SimConfig::new(r, t, mc_paths, seed))?;
        let v: Vec<f64> = samples.iter().map(|s| s.value(f)).collect();
        Some(
            (0..=max_order)
                .map(|n| v.iter().map(|x| x.powi(n as i32)).sum::<f64>() / v.len() as f64)
                .collect(),
        )
    } else {
        None
    };
    let mut table = Table::new(vec!["order", "renewal", "closed_form", "mc"]);
    for (n, v) in m.iter().enumerate() {
        table.push(vec![
            Cell::Int(n as u64),
            (*v).into(),
            closed_moment(f, n, t, r)?.into(),
            mc.as_ref().map(|m| m[n]).into(),
        ]);
    }
    out.write(&table.render(out.format(Format::Csv), p.resolved()))
}

pub fn scgf(mut p: Params, out: &Sink) -> Result<(), CliError> {
    let f = functional(
        &mut p,
        "occupation",
        &[Functional::Occupation, Functional::AbsArea],
    )?;
    let r = p.f64("r", "1")?;
    p.u64("seed", "1")?;
    let mut table = Table::new(vec!["k", "lambda", "slope", "lambda_free"]);
    match f {
        Functional::Occupation => {
            let k_min = p.f64("k_min", "-5")?;
            let k_max = p.f64("k_max", "5")?;
            let n_k = p.usize("n_k", "101")?;
            p.finish()?;
            positive("r", r)?;
            if k_max <= k_min || n_k < 2 {
                return Err(config_error("need k_min < k_max and n_k >= 2"));
            }
            for i in 0..n_k {
                let k = k_min + (k_max - k_min) * i as f64 / (n_k - 1) as f64;
                table.push(vec![
                    k.into(),
                    scgf_a(k, r).into(),
                    scgf_a_derivative(k, r).into(),
                    Cell::Empty,
                ]);
            }
        }
        _ => {
            let k_min = p.f64("k_min", "-10")?;
            let k_max = p.f64("k_max", "-0.001")?;
            let n_k = p.usize("n_k", "101")?;
            p.finish()?;
            if !(r >= 0.0 && r.is_finite()) {
                return Err(config_error(format!("`r` must be >= 0, got {r}")));
            }
            if !(k_min < k_max && k_max < 0.0) || n_k < 2 {
                return Err(config_error("absarea needs k_min < k_max < 0 and n_k >= 2"));
            }
            for k in log_k_grid(-k_max, -k_min, n_k) {
                let lam = if r > 0.0 {
                    scgf_c(k, r)?
                } else {
                    scgf_c_free(k)?
                };
                table.push(vec![
                    k.into(),
                    lam.into(),
                    Cell::Empty,
                    scgf_c_free(k)?.into(),
                ]);
            }
        }
    }
    out.write(&table.render(out.format(Format::Csv), p.resolved()))
}

fn curve_table(curve: &RateFunctionCurve, exact: impl Fn(f64) -> Option<f64>) -> Table {
    let mut table = Table::new(vec!["phi", "chi", "flat", "exact"]);
    for (phi, chi) in &curve.points {
        let flat = curve.flat_from.is_some_and(|f| *phi >= f);
        table.push(vec![
            (*phi).into(),
            (*chi).into(),
            Cell::Bool(flat),
            exact(*phi).into(),
        ]);
    }
    table
}

pub fn rate(mut p: Params, out: &Sink) -> Result<(), CliError> {
    let f = functional(
        &mut p,
        "occupation",
        &[Functional::Occupation, Functional::AbsArea],
    )?;
    let r = p.f64("r", "1")?;
    p.u64("seed", "1")?;
    let table = match f {
        Functional::Occupation => {
            let n_k = p.usize("n_k", "401")?;
            let span = p.f64("k_span", "12")?;
            p.finish()?;
            positive("r", r)?;
            positive("k_span", span)?;
            if n_k < 3 {
                return Err(config_error("`n_k` must be at least 3"));
            }
            // odd counts put k = 0 exactly on the grid, i.e. the mean on the curve
            let w = span * r;
            let m = (n_k - 1) as f64;
            let ks: Vec<f64> = (0..n_k).map(|i| w * (2.0 * i as f64 - m) / m).collect();
            let curve = legendre_with_slope(
                |k| Ok(scgf_a(k, r)),
                |k| Ok(scgf_a_derivative(k, r)),
                &ks,
                None,
            )?;
            curve_table(&curve, |a| chi_a(a, r).finite())
        }
        _ => {
            let n_k = p.usize("n_k", "2000")?;
            p.finish()?;
            if !(r >= 0.0 && r.is_finite()) {
                return Err(config_error(format!("`r` must be >= 0, got {r}")));
            }
            if r > 0.0 {
                curve_table(&absarea_rate_curve(r)?, |_| None)
            } else {
                if n_k < 3 {
                    return Err(config_error("`n_k` must be at least 3"));
                }
                let curve = legendre(scgf_c_free, &log_k_grid(1e-5, 1e5, n_k), None)?;
                curve_table(&curve, |c| chi_c_free(c).ok())
            }
        }
    };
    out.write(&table.render(out.format(Format::Csv), p.resolved()))
}

pub fn variational(mut p: Params, out: &Sink) -> Result<(), CliError> {
    let f = functional(
        &mut p,
        "occupation",
        &[Functional::Occupation, Functional::AbsArea],
    )?;
    let r = p.f64("r", "1")?;
    let phis = p.f64_list("phi", "0.8")?;
    let nodes = p.usize("nodes", "32")?;
    let formulation = match p.string("formulation", "renewal-reward")?.as_str() {
        "renewal-reward" => Formulation::RenewalReward,
        "poisson-count" => Formulation::PoissonCount,
        other => return Err(config_error(format!("unknown formulation {other:?}"))),
    };
    p.u64("seed", "1")?;
    p.finish()?;
    positive("r", r)?;
    if nodes < 2 {
        return Err(config_error("`nodes` must be at least 2"));
    }
    let provider = provider_for(f)?;
    let mut table = Table::new(vec![
        "phi",
        "chi",
        "k",
        "eta",
        "n",
        "converged",
        "constraint_residual",
        "exact",
    ]);
    for phi in phis {
        let prob = VariationalProblem::new(provider.clone(), r, phi)
            .with_nodes(nodes)
            .with_formulation(formulation);
        let s = variational_rate(&prob)?;
        let exact = match f {
            Functional::Occupation => chi_a(phi, r).to_f64(),
            _ => chi_c(phi, r)?.to_f64(),
        };
        table.push(vec![
            phi.into(),
            s.chi.to_f64().into(),
            s.k.into(),
            s.eta.into(),
            s.n.into(),
            Cell::Bool(s.converged),
            s.constraint_residual.into(),
            exact.into(),
        ]);
    }
    out.write(&table.render(out.format(Format::Csv), p.resolved()))
}

pub fn validate_list(out: &Sink) -> Result<(), CliError> {
    let mut text = String::new();
    for c in CHECKS {
        text.push_str(&format!(
            "{:>2}  {:<36} {:<3} target {:<12} tol {:<8} {}\n",
            c.criterion,
            c.id,
            c.comparison.to_string(),
            fmt_f64(c.target),
            fmt_f64(c.tolerance),
            c.description
        ));
    }
    out.write(&text)
}

pub fn validate(mut p: Params, out: &Sink) -> Result<(), CliError> {
    let seed = p.u64("seed", &DEFAULT_SEED.to_string())?;
    let criteria_text = p.string("criteria", "all")?;
    let overrides = p.take_matching(|k| k.contains('.'));
    p.finish()?;
    let criteria: Vec<u8> = if criteria_text == "all" {
        Vec::new()
    } else {
        criteria_text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| config_error(format!("`criteria`: bad entry {s:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    let mut cfg = ValidationConfig::default()
        .with_seed(seed)
        .with_criteria(criteria);
    for (k, v) in &overrides {
        let x: f64 = v
            .parse()
            .map_err(|_| config_error(format!("`{k}`: cannot parse {v:?}")))?;
        cfg = cfg.with_override(k, x)?;
    }
    let report = run_validation(&cfg)?;
    for c in &report.checks {
        eprintln!("{}", c.line());
    }
    let resolved: BTreeMap<String, String> = p.resolved().clone();
    let text = match out.format(Format::Json) {
        Format::Json => json_document(
            &resolved,
            vec![(
                "report",
                serde_json::to_value(&report).expect("report serializes"),
            )],
        ),
        Format::Csv => {
            let mut t = Table::new(vec![
                "criterion",
                "id",
                "measured",
                "target",
                "tolerance",
                "passed",
            ]);
            for c in &report.checks {
                t.push(vec![
                    Cell::Int(c.criterion as u64),
                    Cell::Text(c.id.to_string()),
                    c.measured.into(),
                    c.target.into(),
                    c.tolerance.into(),
                    Cell::Bool(c.passed),
                ]);
            }
            t.to_csv(&resolved)
        }
    };
    out.write(&text)?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<&str> = report.failed().map(|c| c.id).collect();
        Err(CliError::Failed(format!(
            "failed checks: {}",
            names.join(", ")
        )))
    }
}
