//! Cumulant generating functions M_τ(v) = log E exp(v F_τ) of reset-free functionals.

use super::feynman_kac::{bridge_start, coarsen, solve_extrapolated, FkGrid, FkTable, T0};
use crate::analytic::{ABSAREA_FREE_MEAN, ABSAREA_FREE_SECOND_MOMENT};
use crate::error::{domain, Error, Result};
use crate::functional::Functional;
use crate::quad::GaussLegendre;
use crate::sim::{run_ensemble, SimConfig};
use crate::specfun::{bessel_i0_scaled, bessel_i1_scaled};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use std::sync::{Arc, Mutex};

/// A cumulant function with the scaling M_τ(v) = M_1(v τ^α).
pub trait CgfProvider: Send + Sync {
    fn name(&self) -> &'static str;
    fn alpha(&self) -> f64;
    fn m1(&self, v: f64) -> f64;
    fn m1_prime(&self, v: f64) -> f64;
    /// Range of v on which `m1` is computed rather than extrapolated.
    fn window(&self) -> (f64, f64);

    fn m_tau(&self, v: f64, tau: f64) -> f64 {
        self.m1(v * tau.powf(self.alpha()))
    }

    fn m_tau_prime(&self, v: f64, tau: f64) -> f64 {
        let s = tau.powf(self.alpha());
        s * self.m1_prime(v * s)
    }
}

/// Provider for a functional with a large-deviation solver.
pub fn provider_for(functional: Functional) -> Result<Arc<dyn CgfProvider>> {
    match functional {
        Functional::Occupation => Ok(Arc::new(OccupationCgf)),
        Functional::AbsArea => Ok(Arc::new(AbsAreaCgf::new()?)),
        Functional::Area => Err(Error::InvalidConfig(
            "the area rate function is identically zero; no variational solver".into(),
        )),
    }
}

/// Occupation time: M_1(v) = v/2 + ln I0(v/2), evaluated with scaled Bessel
/// functions so that no intermediate overflows.
#[derive(Debug, Clone, Copy, Default)]
pub struct OccupationCgf;

impl CgfProvider for OccupationCgf {
    fn name(&self) -> &'static str {
        "occupation"
    }

    fn alpha(&self) -> f64 {
        1.0
    }

    fn m1(&self, v: f64) -> f64 {
        let x = 0.5 * v.abs();
        v.max(0.0) + bessel_i0_scaled(x).map(f64::ln).unwrap_or(f64::NAN)
    }

    fn m1_prime(&self, v: f64) -> f64 {
        let x = 0.5 * v.abs();
        let ratio = match (bessel_i1_scaled(x), bessel_i0_scaled(x)) {
            (Ok(a), Ok(b)) => a / b,
            _ => f64::NAN,
        };
        0.5 + 0.5 * v.signum() * ratio
    }

    fn window(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// M_τ(v) = log ∫_0^1 e^{vτa} da/(π√(a(1-a))) by the substitution a = sin²θ
/// and composite Gauss-Legendre quadrature, scaled by e^{-max(vτ,0)}.
pub fn m_tau_occupation(v: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(domain("m_tau_occupation", tau, "tau > 0"));
    }
    let z = v * tau;
    if z == 0.0 {
        return Ok(0.0);
    }
    if !z.is_finite() {
        return Err(domain("m_tau_occupation", v, "finite v tau"));
    }
    if z.abs() > 1e4 {
        // the integrand lives in a 1/√|z| layer at one end; closed Bessel form
        return Ok(OccupationCgf.m1(z));
    }
    let shift = z.max(0.0);
    let panels = 8 + (z.abs().sqrt() * 2.0) as usize;
    let gl = GaussLegendre::new(20);
    let integral = gl.integrate_composite(0.0, FRAC_PI_2, panels, |th| {
        let s = th.sin();
        (z * s * s - shift).exp()
    });
    Ok(shift + (integral / FRAC_PI_2).ln())
}

// below this the cubic cumulant term (κ3 ≈ 0.04) is under 1e-9
const V_SERIES: f64 = 0.005;

// Each sign is tabulated in two stages: a fine grid up to T = 4, handed over
// to a wider, coarser grid. For k = +1 the tilted density drifts out to
// x ≈ T²/2 (T = 20 needs 260); for k = -1 it stays within a few units of 0.
const POS_FINE: FkGrid = FkGrid {
    dx: 0.005,
    length: 25.0,
    dt: 0.002,
    t_end: 4.0,
};
const POS_WIDE: FkGrid = FkGrid {
    dx: 0.04,
    length: 260.0,
    dt: 0.005,
    t_end: 20.0,
};
const NEG_FINE: FkGrid = FkGrid {
    dx: 0.005,
    length: 15.0,
    dt: 0.002,
    t_end: 4.0,
};
const NEG_WIDE: FkGrid = FkGrid {
    dx: 0.01,
    length: 15.0,
    dt: 0.01,
    t_end: 100.0,
};

#[derive(Debug)]
struct TwoStage {
    fine: FkTable,
    wide: FkTable,
}

impl TwoStage {
    fn build(k: f64, fine: FkGrid, wide: FkGrid) -> Result<TwoStage> {
        let cells = |g: FkGrid| (g.length / g.dx).round() as usize;
        let start = bridge_start(k, T0, fine.dx, cells(fine));
        let (fine_table, end) = solve_extrapolated(k, fine, &start)?;
        let mut handover = coarsen(&end, fine.dx, wide.dx, cells(wide))?;
        handover.ln_z = *fine_table.ln_z.last().unwrap_or(&handover.ln_z);
        let (wide_table, _) = solve_extrapolated(k, wide, &handover)?;
        Ok(TwoStage {
            fine: fine_table,
            wide: wide_table,
        })
    }

    fn hermite(&self, t: f64) -> (f64, f64) {
        if t < self.wide.t0 {
            self.fine.hermite(t)
        } else {
            self.wide.hermite(t)
        }
    }

    fn t_end(&self) -> f64 {
        self.wide.t_end()
    }
}

#[derive(Debug)]
struct AbsTables {
    pos: TwoStage,
    neg: TwoStage,
}

static ABS_TABLES: Mutex<Option<Arc<AbsTables>>> = Mutex::new(None);

fn abs_tables() -> Result<Arc<AbsTables>> {
    let mut guard = ABS_TABLES.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.as_ref() {
        return Ok(t.clone());
    }
    let t = Arc::new(AbsTables {
        pos: TwoStage::build(1.0, POS_FINE, POS_WIDE)?,
        neg: TwoStage::build(-1.0, NEG_FINE, NEG_WIDE)?,
    });
    *guard = Some(t.clone());
    Ok(t)
}

/// Absolute area D = ∫_0^1 |W_t| dt, with M_1(v) = ln G_0(sign v, |v|^{2/3})
/// read off Feynman-Kac tables (see [`super::feynman_kac`]). A two-term
/// cumulant series is used for |v| ≤ 0.005. Outside the tabulated window the
/// function is continued quadratically in v (v > 0) or linearly in |v|^{2/3}
/// (v < 0, ground-state decay); both continuations stay convex.
#[derive(Debug, Clone)]
pub struct AbsAreaCgf {
    tables: Arc<AbsTables>,
}

impl AbsAreaCgf {
    /// Builds (once per process) and returns the tabulated provider.
    pub fn new() -> Result<Self> {
        Ok(AbsAreaCgf {
            tables: abs_tables()?,
        })
    }

    fn variance() -> f64 {
        ABSAREA_FREE_SECOND_MOMENT - ABSAREA_FREE_MEAN * ABSAREA_FREE_MEAN
    }

    /// (M_1(v), M_1'(v)) inside the window, |v| > V_SERIES.
    fn tabulated(&self, v: f64) -> (f64, f64) {
        let t = v.abs().powf(2.0 / 3.0);
        let table = if v < 0.0 {
            &self.tables.neg
        } else {
            &self.tables.pos
        };
        let (lz, slope) = table.hermite(t);
        (lz, slope * v.signum() * (2.0 / 3.0) / v.abs().cbrt())
    }

    fn eval(&self, v: f64) -> (f64, f64) {
        let var = Self::variance();
        if v.abs() <= V_SERIES {
            return (
                v * ABSAREA_FREE_MEAN + 0.5 * var * v * v,
                ABSAREA_FREE_MEAN + var * v,
            );
        }
        let (lo, hi) = self.window();
        if v > hi {
            let (m, d) = self.tabulated(hi);
            let h = 1e-3 * hi;
            let (_, d_lo) = self.tabulated(hi - h);
            let curv = ((d - d_lo) / h).max(0.0);
            let e = v - hi;
            return (m + d * e + 0.5 * curv * e * e, d + curv * e);
        }
        if v < lo {
            let t_end = self.tables.neg.t_end();
            let (lz, slope) = self.tables.neg.wide.hermite(t_end);
            let t = v.abs().powf(2.0 / 3.0);
            let m = lz + slope * (t - t_end);
            return (m, -slope * (2.0 / 3.0) / v.abs().cbrt());
        }
        self.tabulated(v)
    }
}

impl CgfProvider for AbsAreaCgf {
    fn name(&self) -> &'static str {
        "absarea"
    }

    fn alpha(&self) -> f64 {
        1.5
    }

    fn m1(&self, v: f64) -> f64 {
        self.eval(v).0
    }

    fn m1_prime(&self, v: f64) -> f64 {
        self.eval(v).1
    }

    fn window(&self) -> (f64, f64) {
        (
            -self.tables.neg.t_end().powf(1.5),
            self.tables.pos.t_end().powf(1.5),
        )
    }
}

/// Monte Carlo estimate of M_τ on a v-grid.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalCgf {
    pub v: Vec<f64>,
    pub m: Vec<f64>,
    /// Top ten paths carry more than half of the exponential weight.
    pub ess_warning: Vec<bool>,
    pub sample_mean: f64,
    pub sample_std_error: f64,
}

/// log of the empirical mean of e^{v F_τ} over reset-free paths.
pub fn m_tau_empirical(
    functional: Functional,
    tau: f64,
    v_grid: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<EmpiricalCgf> {
    if !(tau > 0.0) {
        return Err(domain("m_tau_empirical", tau, "tau > 0"));
    }
    let cfg = SimConfig::new(0.0, tau, n_paths, seed);
    cfg.validate()?;
    let values: Vec<f64> = run_ensemble(&cfg)?
        .iter()
        .map(|s| s.value(functional))
        .collect();
    let max_abs = values.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let mut m = Vec::with_capacity(v_grid.len());
    let mut warn = Vec::with_capacity(v_grid.len());
    for &v in v_grid {
        if (v * max_abs).abs() >= 700.0 {
            return Err(Error::InvalidConfig(format!(
                "v = {v} outside the stable window (max |v F| = {})",
                v * max_abs
            )));
        }
        let exps: Vec<f64> = values.iter().map(|x| v * x).collect();
        let top = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> = exps.iter().map(|e| (e - top).exp()).collect();
        let total: f64 = w.iter().sum();
        m.push(top + (total / n_paths as f64).ln());
        w.sort_by(|a, b| b.total_cmp(a));
        let top10: f64 = w.iter().take(10).sum();
        warn.push(top10 > 0.5 * total);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(EmpiricalCgf {
        v: v_grid.to_vec(),
        m,
        ess_warning: warn,
        sample_mean: mean,
        sample_std_error: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renewal::{free_gf_absarea, inverse_laplace_real};

    #[test]
    fn occupation_quadrature_matches_bessel_form() {
        for z in [-50.0, -7.0, -0.3, 0.0, 0.5, 1.0, 12.0, 50.0, 400.0, -3000.0] {
            let q = m_tau_occupation(z, 1.0).unwrap();
            let b = OccupationCgf.m1(z);
            assert!(
                (q - b).abs() <= 1e-10 * b.abs().max(1.0),
                "z={z}: {q} vs {b}"
            );
        }
        assert_eq!(m_tau_occupation(0.0, 3.0).unwrap(), 0.0);
        assert!(m_tau_occupation(1e6, 1.0).unwrap().is_finite());
    }

    #[test]
    fn occupation_at_one_against_dense_quadrature() {
        // 200-point Gauss-Legendre in θ with a = sin²θ
        let gl = GaussLegendre::new(200);
        let i = gl.integrate(0.0, FRAC_PI_2, |th| (th.sin().powi(2)).exp()) / FRAC_PI_2;
        assert!((m_tau_occupation(1.0, 1.0).unwrap() - i.ln()).abs() < 1e-13);
    }

    #[test]
    fn occupation_slope_at_zero() {
        let tau = 2.5;
        let h = 1e-5;
        let d =
            (m_tau_occupation(h, tau).unwrap() - m_tau_occupation(-h, tau).unwrap()) / (2.0 * h);
        assert!((d - tau / 2.0).abs() < 1e-8);
        assert!((OccupationCgf.m_tau_prime(0.0, tau) - tau / 2.0).abs() < 1e-15);
    }

    #[test]
    fn occupation_derivative_matches_difference() {
        for v in [-40.0, -1.0, 0.3, 5.0, 80.0] {
            let h = 1e-5 * f64::max(1.0, f64::abs(v));
            let fd = (OccupationCgf.m1(v + h) - OccupationCgf.m1(v - h)) / (2.0 * h);
            assert!((fd - OccupationCgf.m1_prime(v)).abs() < 1e-8, "v={v}");
        }
    }

    #[test]
    fn absarea_series_and_table_join() {
        let p = AbsAreaCgf::new().unwrap();
        for v in [V_SERIES, -V_SERIES] {
            let (tab, dtab) = p.tabulated(v);
            let (ser, dser) = p.eval(v);
            // O(dx²) start-up offset of the table, ~2e-5 relative
            assert!(
                (tab - ser).abs() < 5e-5 * ser.abs(),
                "v={v}: {tab} vs {ser}"
            );
            assert!((dtab - dser).abs() < 5e-4, "v={v}: {dtab} vs {dser}");
        }
    }

    #[test]
    fn absarea_tables_agree_where_they_overlap() {
        let p = AbsAreaCgf::new().unwrap();
        // the wide table starts from the fine one; compare slopes just after
        for two in [&p.tables.pos, &p.tables.neg] {
            let t = two.wide.t0;
            assert!((two.fine.ln_z_at(t) - two.wide.ln_z_at(t)).abs() < 1e-9);
            let (_, a) = two.fine.hermite(t);
            let (_, b) = two.wide.hermite(t);
            assert!((a - b).abs() < 1e-3 * a.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn absarea_negative_side_matches_laplace_inversion() {
        let p = AbsAreaCgf::new().unwrap();
        let g = free_gf_absarea();
        for v in [-1.0_f64, -5.0] {
            // E exp(v D) = G_0(k, 1) with k = v (T = 1)
            let inv = inverse_laplace_real(|s| g.eval(v, s).unwrap_or(f64::NAN), 1.0).unwrap();
            assert!(
                (p.m1(v) - inv.ln()).abs() < 1e-4,
                "v={v}: {} vs {}",
                p.m1(v),
                inv.ln()
            );
        }
    }

    #[test]
    fn absarea_is_convex_and_increasing() {
        let p = AbsAreaCgf::new().unwrap();
        let mut prev = f64::NEG_INFINITY;
        let mut v = -2000.0;
        while v < 200.0 {
            let d = p.m1_prime(v);
            assert!(d > 0.0 && d >= prev - 1e-6, "v={v}");
            prev = d;
            v += if v.abs() < 2.0 { 0.01 } else { 0.05 * v.abs() };
        }
    }

    #[test]
    fn empirical_cgf_basics() {
        let e = m_tau_empirical(
            Functional::AbsArea,
            1.0,
            &[0.0, -1e-4, 1e-4, -1.0, 1.0],
            20_000,
            5,
        )
        .unwrap();
        assert_eq!(e.m[0], 0.0);
        let slope = (e.m[2] - e.m[1]) / 2e-4;
        assert!((slope - e.sample_mean).abs() < 1e-6);
        let p = AbsAreaCgf::new().unwrap();
        assert!((e.m[3] - p.m1(-1.0)).abs() < 0.02);
        assert!((e.m[4] - p.m1(1.0)).abs() < 0.02);
        assert!(e.ess_warning.iter().all(|w| !w));
        assert!(m_tau_empirical(Functional::AbsArea, 1.0, &[1e4], 100, 1).is_err());
    }
}
