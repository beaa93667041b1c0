//! Legendre transforms of sampled SCGFs and assembled rate functions.

use super::scgf::scgf_c;
use crate::analytic::absarea_mean_rate;
use crate::error::{domain, Error, Result};
use crate::extended::RateValue;
use crate::roots::golden_max;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Sampled rate function χ(φ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFunctionCurve {
    /// (φ, χ) sorted by φ.
    pub points: Vec<(f64, f64)>,
    /// dχ/dφ at each point, i.e. the generating tilt k.
    pub slopes: Vec<f64>,
    pub k_grid: Option<Vec<f64>>,
    /// χ ≡ 0 on [flat_from, ∞).
    pub flat_from: Option<f64>,
}

impl RateFunctionCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// χ(φ) by cubic Hermite interpolation with the exact slopes k; `None`
    /// outside the sampled range (and below the flat branch).
    pub fn eval(&self, phi: f64) -> Option<f64> {
        if let Some(f) = self.flat_from {
            if phi >= f {
                return Some(0.0);
            }
        }
        let pts = &self.points;
        if pts.is_empty() || phi < pts[0].0 || phi > pts[pts.len() - 1].0 {
            return None;
        }
        let j = pts.partition_point(|p| p.0 <= phi).clamp(1, pts.len() - 1) - 1;
        let (x0, y0) = pts[j];
        let (x1, y1) = pts[j + 1];
        let h = x1 - x0;
        if h <= 0.0 {
            return Some(y0);
        }
        let u = (phi - x0) / h;
        let (m0, m1) = (self.slopes[j] * h, self.slopes[j + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1;
        Some(v.max(0.0))
    }

    /// Smallest discrete second difference of χ over φ on the non-flat part.
    pub fn min_second_difference(&self) -> f64 {
        let end = match self.flat_from {
            Some(f) => self.points.partition_point(|p| p.0 < f),
            None => self.points.len(),
        };
        let p = &self.points[..end];
        let mut worst = f64::INFINITY;
        for i in 1..p.len().saturating_sub(1) {
            let s1 = (p[i].1 - p[i - 1].1) / (p[i].0 - p[i - 1].0);
            let s2 = (p[i + 1].1 - p[i].1) / (p[i + 1].0 - p[i].0);
            worst = worst.min(s2 - s1);
        }
        worst
    }

    /// CSV with columns phi, chi, flat.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi,chi,flat\n");
        for (phi, chi) in &self.points {
            let flat = self.flat_from.is_some_and(|f| *phi >= f);
            out.push_str(&format!("{phi:?},{chi:?},{}\n", flat as u8));
        }
        out
    }
}

/// `n` log-spaced negative tilts from -`hi` to -`lo` (increasing).
pub fn log_k_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (hi.ln(), lo.ln());
    (0..n)
        .map(|i| -(a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

/// χ(c_k) = k c_k - λ(k), c_k = λ'(k) by three-point differences on `k_grid`.
///
/// The grid endpoints only feed the differences. With `flat` the branch
/// χ ≡ 0 on [φ*, ∞) is appended.
pub fn legendre<F>(scgf: F, k_grid: &[f64], flat: Option<f64>) -> Result<RateFunctionCurve>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if k_grid.len() < 3 || k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig(
            "k-grid needs at least 3 strictly increasing points".into(),
        ));
    }
    let lam: Vec<f64> = k_grid
        .par_iter()
        .map(|k| scgf(*k))
        .collect::<Result<Vec<f64>>>()?;
    let k = k_grid;
    let mut pts = Vec::with_capacity(k.len());
    for i in 1..k.len() - 1 {
        let hl = k[i] - k[i - 1];
        let hr = k[i + 1] - k[i];
        let sl = (lam[i] - lam[i - 1]) / hl;
        let sr = (lam[i + 1] - lam[i]) / hr;
        if sr - sl < -1e-6 {
            return Err(Error::Convexity {
                index: i,
                second_difference: sr - sl,
            });
        }
        let c = (hl * hl * lam[i + 1] - hr * hr * lam[i - 1] - (hl * hl - hr * hr) * lam[i])
            / (hl * hr * (hl + hr));
        pts.push((c, (k[i] * c - lam[i]).max(0.0), k[i]));
    }
    Ok(assemble(pts, k_grid, flat))
}

fn assemble(mut pts: Vec<(f64, f64, f64)>, k_grid: &[f64], flat: Option<f64>) -> RateFunctionCurve {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(f) = flat {
        pts.retain(|p| p.0 < f);
        pts.push((f, 0.0, 0.0));
    }
    RateFunctionCurve {
        points: pts.iter().map(|p| (p.0, p.1)).collect(),
        slopes: pts.iter().map(|p| p.2).collect(),
        k_grid: Some(k_grid.to_vec()),
        flat_from: flat,
    }
}

/// As [`legendre`], with c_k = λ'(k) from a known derivative; every grid
/// point gives a curve point.
pub fn legendre_with_slope<F, G>(
    scgf: F,
    slope: G,
    k_grid: &[f64],
    flat: Option<f64>,
) -> Result<RateFunctionCurve>
where
    F: Fn(f64) -> Result<f64> + Sync,
    G: Fn(f64) -> Result<f64> + Sync,
{
    if k_grid.len() < 2 || k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig(
            "k-grid needs at least 2 strictly increasing points".into(),
        ));
    }
    let pts = k_grid
        .par_iter()
        .map(|k| {
            let c = slope(*k)?;
            Ok((c, (k * c - scgf(*k)?).max(0.0), *k))
        })
        .collect::<Result<Vec<(f64, f64, f64)>>>()?;
    for (i, w) in pts.windows(2).enumerate() {
        if w[1].0 - w[0].0 < -1e-12 * w[0].0.abs().max(1.0) {
            return Err(Error::Convexity {
                index: i + 1,
                second_difference: w[1].0 - w[0].0,
            });
        }
    }
    Ok(assemble(pts, k_grid, flat))
}

/// sup_i [q x_i - f_i] for each query slope q.
pub fn legendre_discrete(points: &[(f64, f64)], queries: &[f64]) -> Vec<f64> {
    queries
        .iter()
        .map(|q| {
            points
                .iter()
                .map(|(x, f)| q * x - f)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Tilts used for the absolute-area curve: 200 points on
/// [-10⁴, -10⁻⁴] r^{3/2}.
pub fn absarea_k_grid(r: f64) -> Vec<f64> {
    let s = r.powf(1.5);
    log_k_grid(1e-4 * s, 1e4 * s, 200)
}

/// Rate function of C_T/T with resetting: Legendre curve of λ_r below the
/// mean, flat from c*_r = 1/√(2r).
pub fn absarea_rate_curve(r: f64) -> Result<RateFunctionCurve> {
    let c_star = absarea_mean_rate(r)?;
    legendre(|k| scgf_c(k, r), &absarea_k_grid(r), Some(c_star))
}

static CURVES: Mutex<Option<HashMap<u64, Arc<RateFunctionCurve>>>> = Mutex::new(None);

fn cached_curve(r: f64) -> Result<Arc<RateFunctionCurve>> {
    if let Some(c) = CURVES
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get_or_insert_with(HashMap::new)
        .get(&r.to_bits())
    {
        return Ok(c.clone());
    }
    let curve = Arc::new(absarea_rate_curve(r)?);
    CURVES
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get_or_insert_with(HashMap::new)
        .insert(r.to_bits(), curve.clone());
    Ok(curve)
}

/// sup_{k<0} [k c - λ_r(k)] by golden section in log(-k).
fn chi_c_direct(c: f64, r: f64) -> Result<f64> {
    let obj = |u: f64| {
        let k = -u.exp();
        scgf_c(k, r).map(|l| k * c - l).unwrap_or(f64::NEG_INFINITY)
    };
    let s = r.powf(1.5);
    let u = golden_max(obj, (1e-8 * s).ln(), (1e8 * s).ln(), 1e-10);
    Ok(obj(u).max(0.0))
}

/// χ^C_r(c). `Infinite` for c ≤ 0, zero for c ≥ c*_r, otherwise from the
/// cached Legendre curve (direct maximization below its sampled range).
pub fn chi_c(c: f64, r: f64) -> Result<RateValue> {
    if !(r > 0.0) {
        return Err(domain("chi_c", r, "r > 0"));
    }
    if c.is_nan() {
        return Err(domain("chi_c", c, "c not NaN"));
    }
    if c <= 0.0 {
        return Ok(RateValue::Infinite);
    }
    if c >= absarea_mean_rate(r)? {
        return Ok(RateValue::Finite(0.0));
    }
    let curve = cached_curve(r)?;
    match curve.eval(c) {
        Some(v) => Ok(RateValue::Finite(v)),
        None => chi_c_direct(c, r).map(RateValue::Finite),
    }
}
