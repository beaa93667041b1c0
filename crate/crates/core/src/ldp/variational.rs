//! Variational rate of a renewal-reward decomposition.
//!
//! The path is cut at reset epochs into excursions. The rate combines the
//! number of excursions per unit time n, their duration law μ (relative to
//! Exp(r)) and the value w(t) each excursion of duration t contributes:
//!
//!   χ(φ) = inf n [ h(μ | Exp(r)) + Σ μ_i K_{t_i}(w_i) ]
//!          s.t. n Σ μ_i w_i = φ,  n Σ μ_i t_i = 1.
//!
//! On a Gauss-Laguerre grid the problem is convex and is solved exactly in
//! its dual. For fixed tilt k the inner minimum is attained at w_i =
//! M'_{t_i}(k), μ_i ∝ ω_i exp(M_{t_i}(k) - η t_i), where η(k) solves
//! Σ ω_i exp(M_{t_i}(k) - η t_i) = 1; then χ(φ) = sup_k [kφ - η(k)], with the
//! optimal k the root of η'(k) = φ. The primal point is rebuilt from the dual
//! and its objective and residuals are reported.
//!
//! The variant without the time constraint, I_r(n) + n h(μ) + n Σ μ K, is
//! available as [`Formulation::PoissonCount`]. It does not reproduce the
//! occupation rate function and gives smaller values.

use super::cgf::CgfProvider;
use super::rates::i_rate;
use crate::error::{domain, Error, Result};
use crate::extended::RateValue;
use crate::quad::GaussLaguerre;
use crate::roots::brent;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    #[default]
    RenewalReward,
    PoissonCount,
}

/// Default number of Laguerre nodes.
pub const DEFAULT_NODES: usize = 64;

#[derive(Clone)]
pub struct VariationalProblem {
    pub r: f64,
    pub phi: f64,
    pub n_nodes: usize,
    pub provider: Arc<dyn CgfProvider>,
    pub formulation: Formulation,
    /// Iteration budget of the outer root search.
    pub max_iter: usize,
}

impl std::fmt::Debug for VariationalProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VariationalProblem")
            .field("r", &self.r)
            .field("phi", &self.phi)
            .field("n_nodes", &self.n_nodes)
            .field("provider", &self.provider.name())
            .field("formulation", &self.formulation)
            .finish()
    }
}

impl VariationalProblem {
    pub fn new(provider: Arc<dyn CgfProvider>, r: f64, phi: f64) -> Self {
        VariationalProblem {
            r,
            phi,
            n_nodes: DEFAULT_NODES,
            provider,
            formulation: Formulation::RenewalReward,
            max_iter: 200,
        }
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.n_nodes = n;
        self
    }

    pub fn with_formulation(mut self, f: Formulation) -> Self {
        self.formulation = f;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalSolution {
    pub chi: RateValue,
    /// Multiplier of the value constraint.
    pub k: f64,
    /// Multiplier of the time constraint (0 for the Poisson-count variant).
    pub eta: f64,
    pub n: f64,
    pub nodes: Vec<f64>,
    pub mu: Vec<f64>,
    pub w: Vec<f64>,
    /// |n Σ μ w - φ|
    pub constraint_residual: f64,
    /// |n Σ μ t - 1|, renewal-reward variant only.
    pub time_residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub diagnostic: Option<String>,
}

struct Grid {
    t: Vec<f64>,
    log_w: Vec<f64>,
    scale: Vec<f64>,
}

impl Grid {
    fn new(r: f64, n: usize, alpha: f64) -> Result<Grid> {
        let gl = GaussLaguerre::new(n)?;
        let t: Vec<f64> = gl.nodes.iter().map(|x| x / r).collect();
        let total: f64 = gl.weights.iter().sum();
        let log_w = gl.log_weights.iter().map(|l| l - total.ln()).collect();
        let scale = t.iter().map(|ti| ti.powf(alpha)).collect();
        Ok(Grid { t, log_w, scale })
    }
}

struct Tilted {
    eta: f64,
    /// normalized tilted weights p_i
    p: Vec<f64>,
    m: Vec<f64>,
    dm: Vec<f64>,
}

fn log_sum_exp(x: impl Iterator<Item = f64> + Clone) -> f64 {
    let top = x.clone().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + x.map(|v| (v - top).exp()).sum::<f64>().ln()
}

struct Dual<'a> {
    grid: &'a Grid,
    provider: &'a dyn CgfProvider,
}

impl Dual<'_> {
    fn cumulants(&self, k: f64) -> (Vec<f64>, Vec<f64>) {
        let g = self.grid;
        let m = g.scale.iter().map(|s| self.provider.m1(k * s)).collect();
        let dm = g
            .scale
            .iter()
            .map(|s| s * self.provider.m1_prime(k * s))
            .collect();
        (m, dm)
    }

    /// η(k) and the tilted law for the renewal-reward variant.
    fn tilt(&self, k: f64) -> Result<Tilted> {
        let g = self.grid;
        let (m, dm) = self.cumulants(k);
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence {
                op: "variational_rate: cumulant",
                iterations: 0,
            });
        }
        let lse = |eta: f64| log_sum_exp((0..g.t.len()).map(|i| g.log_w[i] + m[i] - eta * g.t[i]));
        let ratios = m.iter().zip(&g.t).map(|(mi, ti)| mi / ti);
        let lo = ratios.clone().fold(f64::INFINITY, f64::min);
        let hi = ratios.fold(f64::NEG_INFINITY, f64::max);
        let eta = if hi - lo <= 1e-300 {
            lo
        } else {
            let pad = 1e-12 * lo.abs().max(hi.abs()).max(1e-300);
            brent("variational_rate: eta", lse, lo - pad, hi + pad, 1e-16, 300)?
        };
        let logs: Vec<f64> = (0..g.t.len())
            .map(|i| g.log_w[i] + m[i] - eta * g.t[i])
            .collect();
        let norm = log_sum_exp(logs.iter().cloned());
        let p = logs.iter().map(|l| (l - norm).exp()).collect();
        Ok(Tilted { eta, p, m, dm })
    }

    /// η'(k) = Σ p M' / Σ p t
    fn slope(&self, k: f64) -> Result<f64> {
        let tl = self.tilt(k)?;
        let num: f64 = tl.p.iter().zip(&tl.dm).map(|(p, d)| p * d).sum();
        let den: f64 = tl.p.iter().zip(&self.grid.t).map(|(p, t)| p * t).sum();
        Ok(num / den)
    }

    /// Poisson-count variant: r Σ ω e^{M} M'
    fn poisson_slope(&self, k: f64, r: f64) -> f64 {
        let (m, dm) = self.cumulants(k);
        let g = self.grid;
        (0..g.t.len())
            .map(|i| r * (g.log_w[i] + m[i]).exp() * dm[i])
            .sum()
    }
}

/// Solve the discretized variational problem.
///
/// A target outside the range reachable on the grid returns `Infinite` with
/// a diagnostic rather than an error.
pub fn variational_rate(problem: &VariationalProblem) -> Result<VariationalSolution> {
    let VariationalProblem {
        r,
        phi,
        n_nodes,
        formulation,
        max_iter,
        ..
    } = *problem;
    if !(r > 0.0) {
        return Err(domain("variational_rate", r, "r > 0"));
    }
    if !phi.is_finite() {
        return Err(domain("variational_rate", phi, "finite phi"));
    }
    let provider = problem.provider.as_ref();
    let alpha = provider.alpha();
    if !(alpha >= 1.0) {
        return Err(domain("variational_rate", alpha, "alpha >= 1"));
    }
    let grid = Grid::new(r, n_nodes, alpha)?;
    let dual = Dual {
        grid: &grid,
        provider,
    };
    let slope = |k: f64| -> f64 {
        match formulation {
            Formulation::RenewalReward => dual.slope(k).unwrap_or(f64::NAN),
            Formulation::PoissonCount => dual.poisson_slope(k, r),
        }
    };

    // the zero-cost candidate: k = 0, reference law, w = mean profile
    let mean = slope(0.0);
    let mut iterations = 0;
    let k = if (phi - mean).abs() <= 1e-14 * mean.abs().max(1.0) {
        0.0
    } else {
        let dir = if phi > mean { 1.0 } else { -1.0 };
        // typical tilt scale: 1/(value spread of one excursion)
        let t_max = *grid.t.last().unwrap_or(&1.0);
        let mut step = 0.1 / t_max.powf(alpha).max(1e-12) * t_max.max(1.0);
        let mut inner = 0.0;
        let mut found = None;
        for _ in 0..200 {
            iterations += 1;
            let outer = dir * step;
            let s = slope(outer);
            if !s.is_finite() {
                break;
            }
            if (s - phi) * dir >= 0.0 {
                found = Some((inner, outer));
                break;
            }
            inner = outer;
            step *= 2.0;
        }
        let Some((a, b)) = found else {
            return Ok(unreachable_target(phi, mean, iterations));
        };
        brent(
            "variational_rate: tilt",
            |k| slope(k) - phi,
            a,
            b,
            1e-15 * b.abs().max(1e-300),
            max_iter,
        )?
    };

    let sol = match formulation {
        Formulation::RenewalReward => {
            let tl = dual.tilt(k)?;
            let den: f64 = tl.p.iter().zip(&grid.t).map(|(p, t)| p * t).sum();
            let n = 1.0 / den;
            let w = tl.dm.clone();
            let h: f64 =
                tl.p.iter()
                    .zip(&grid.log_w)
                    .filter(|(p, _)| **p > 0.0)
                    .map(|(p, lw)| p * (p.ln() - lw))
                    .sum();
            // K_{t_i}(w_i) = k w_i - M_{t_i}(k) at w_i = M'_{t_i}(k)
            let kk: f64 = (0..w.len()).map(|i| tl.p[i] * (k * w[i] - tl.m[i])).sum();
            let value = n * (h + kk);
            let achieved = n * tl.p.iter().zip(&w).map(|(p, w)| p * w).sum::<f64>();
            VariationalSolution {
                chi: RateValue::Finite(value.max(0.0)),
                k,
                eta: tl.eta,
                n,
                nodes: grid.t.clone(),
                mu: tl.p,
                w,
                constraint_residual: (achieved - phi).abs(),
                time_residual: (n * den - 1.0).abs(),
                converged: false,
                iterations,
                diagnostic: None,
            }
        }
        Formulation::PoissonCount => {
            let (m, dm) = dual.cumulants(k);
            let logs: Vec<f64> = (0..m.len()).map(|i| grid.log_w[i] + m[i]).collect();
            let log_z = log_sum_exp(logs.iter().cloned());
            let mu: Vec<f64> = logs.iter().map(|l| (l - log_z).exp()).collect();
            let n = r * log_z.exp();
            let h: f64 = mu
                .iter()
                .zip(&grid.log_w)
                .filter(|(p, _)| **p > 0.0)
                .map(|(p, lw)| p * (p.ln() - lw))
                .sum();
            let kk: f64 = (0..mu.len()).map(|i| mu[i] * (k * dm[i] - m[i])).sum();
            let value = i_rate(n, r) + n * (h + kk);
            let achieved = n * mu.iter().zip(&dm).map(|(p, w)| p * w).sum::<f64>();
            VariationalSolution {
                chi: RateValue::Finite(value.max(0.0)),
                k,
                eta: 0.0,
                n,
                nodes: grid.t.clone(),
                mu,
                w: dm,
                constraint_residual: (achieved - phi).abs(),
                time_residual: 0.0,
                converged: false,
                iterations,
                diagnostic: None,
            }
        }
    };
    let tol = 1e-9 * phi.abs().max(1.0);
    let converged = sol.constraint_residual <= tol && sol.time_residual <= 1e-9;
    Ok(VariationalSolution {
        converged,
        diagnostic: (!converged).then(|| {
            format!(
                "residuals {:.3e} (value) and {:.3e} (time) above tolerance",
                sol.constraint_residual, sol.time_residual
            )
        }),
        ..sol
    })
}

fn unreachable_target(phi: f64, mean: f64, iterations: usize) -> VariationalSolution {
    VariationalSolution {
        chi: RateValue::Infinite,
        k: f64::NAN,
        eta: f64::NAN,
        n: f64::NAN,
        nodes: vec![],
        mu: vec![],
        w: vec![],
        constraint_residual: f64::NAN,
        time_residual: f64::NAN,
        converged: true,
        iterations,
        diagnostic: Some(format!(
            "phi = {phi} is outside the range reachable on this grid (mean {mean})"
        )),
    }
}
