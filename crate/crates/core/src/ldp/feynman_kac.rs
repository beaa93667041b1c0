//! Tilted forward equation for reflected Brownian motion.
//!
//! With p(x, t) the density of |W_t| weighted by exp(k ∫_0^t |W_s| ds),
//!
//!   ∂_t p = ½ ∂_xx p + k x p,   ∂_x p(0, t) = 0,   p(·, 0) = δ_0,
//!
//! and ln Z(t) = ln ∫ p(x, t) dx = ln E exp(k C_t). Strang splitting: exact
//! reaction half steps around a Crank-Nicolson diffusion step, with the first
//! two steps replaced by pairs of implicit Euler half steps. Mass is
//! renormalized every step and its log accumulated.
//!
//! The delta start is not resolved on the grid. Instead the solve begins at a
//! small t0 from the half-normal law tilted by exp(k m(x)), m(x) the mean of
//! ∫|B| along a Brownian bridge from 0 to x; the neglected conditional
//! variance term is O(k² t0³).

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::specfun::erf;
use std::f64::consts::{PI, SQRT_2};

/// Grid and step parameters of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkGrid {
    pub dx: f64,
    pub length: f64,
    pub dt: f64,
    pub t_end: f64,
}

/// ln Z and its time derivative on the uniform time grid `j dt`.
#[derive(Debug, Clone)]
pub struct FkTable {
    pub k: f64,
    pub t0: f64,
    pub dt: f64,
    pub ln_z: Vec<f64>,
    pub slope: Vec<f64>,
}

impl FkTable {
    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * (self.ln_z.len() - 1) as f64
    }

    /// Cubic Hermite interpolation of ln Z(t), t in [0, t_end].
    pub fn ln_z_at(&self, t: f64) -> f64 {
        self.hermite(t).0
    }

    /// (ln Z(t), d ln Z/dt) by cubic Hermite interpolation.
    pub fn hermite(&self, t: f64) -> (f64, f64) {
        let n = self.ln_z.len() - 1;
        let s = ((t - self.t0) / self.dt).clamp(0.0, n as f64);
        let j = (s.floor() as usize).min(n - 1);
        let u = s - j as f64;
        let h = self.dt;
        let (y0, y1) = (self.ln_z[j], self.ln_z[j + 1]);
        let (m0, m1) = (self.slope[j] * h, self.slope[j + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1;
        let d = ((6.0 * u2 - 6.0 * u) * y0
            + (3.0 * u2 - 4.0 * u + 1.0) * m0
            + (-6.0 * u2 + 6.0 * u) * y1
            + (3.0 * u2 - 2.0 * u) * m1)
            / h;
        (v, d)
    }
}

/// Constant-coefficient tridiagonal system (I - c L) with L the Neumann
/// second difference, factorized once.
struct Tridiag {
    off: f64,
    cprime: Vec<f64>,
    inv_denom: Vec<f64>,
}

impl Tridiag {
    fn new(n: usize, c: f64) -> Tridiag {
        // rows: diag 1 + 2c (ends 1 + c), off-diagonals -c
        let off = -c;
        let diag = |i: usize| {
            if i == 0 || i == n - 1 {
                1.0 + c
            } else {
                1.0 + 2.0 * c
            }
        };
        let mut cprime = vec![0.0; n];
        let mut inv_denom = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let denom = diag(i) - if i > 0 { off * prev } else { 0.0 };
            inv_denom[i] = 1.0 / denom;
            prev = off * inv_denom[i];
            cprime[i] = prev;
        }
        Tridiag {
            off,
            cprime,
            inv_denom,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        b[0] *= self.inv_denom[0];
        for i in 1..n {
            b[i] = (b[i] - self.off * b[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            b[i] -= self.cprime[i] * b[i + 1];
        }
    }
}

struct Stepper {
    x: Vec<f64>,
    dx: f64,
    k: f64,
    p: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    fn react(&mut self, factor: &[f64]) {
        for (p, f) in self.p.iter_mut().zip(factor) {
            *p *= f;
        }
    }

    /// b = (I + c L) p
    fn explicit_half(&mut self, c: f64) {
        let n = self.p.len();
        let p = &self.p;
        for i in 0..n {
            let left = if i == 0 { p[0] } else { p[i - 1] };
            let right = if i == n - 1 { p[n - 1] } else { p[i + 1] };
            self.scratch[i] = p[i] + c * (left - 2.0 * p[i] + right);
        }
        std::mem::swap(&mut self.p, &mut self.scratch);
    }

    /// Renormalize; returns (ln mass, k <x>).
    fn normalize(&mut self) -> (f64, f64) {
        let mass: f64 = self.p.iter().sum::<f64>() * self.dx;
        let inv = 1.0 / mass;
        let mut first = 0.0;
        for (p, x) in self.p.iter_mut().zip(&self.x) {
            *p *= inv;
            first += *p * x;
        }
        (mass.ln(), self.k * first * self.dx)
    }
}

/// State of the tilted density at a start time.
#[derive(Debug, Clone)]
pub struct FkState {
    pub t: f64,
    pub ln_z: f64,
    /// Normalized cell values on the grid of the solve.
    pub p: Vec<f64>,
}

/// E|N(μ, σ²)|
fn abs_normal_mean(mu: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return mu.abs();
    }
    let z = mu / sigma;
    sigma * (2.0 / PI).sqrt() * (-0.5 * z * z).exp() + mu * erf(z / SQRT_2)
}

/// Tilted half-normal start at time `t0` on the grid `dx`, `n` cells.
pub fn bridge_start(k: f64, t0: f64, dx: f64, n: usize) -> FkState {
    let gl = GaussLegendre::new(20);
    let cell = GaussLegendre::new(4);
    let sd = t0.sqrt();
    let density = |x: f64| {
        let m = gl.integrate(0.0, t0, |u| {
            abs_normal_mean(u * x / t0, (u * (t0 - u) / t0).max(0.0).sqrt())
        });
        (2.0 / (PI * t0)).sqrt() * (-0.5 * x * x / t0).exp() * (k * m).exp()
    };
    let mut p = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (i as f64 * dx, (i + 1) as f64 * dx);
        // cell average of the tilted density; far cells are negligible
        let v = if a > 40.0 * sd {
            0.0
        } else {
            cell.integrate(a, b, density) / dx
        };
        p.push(v);
    }
    let z: f64 = p.iter().sum::<f64>() * dx;
    for v in p.iter_mut() {
        *v /= z;
    }
    FkState {
        t: t0,
        ln_z: z.ln(),
        p,
    }
}

/// Start time of the tabulated solves.
pub const T0: f64 = 0.01;

/// Solve on `grid` from `start` and tabulate ln Z(t0 + j dt). Also returns
/// the final state.
pub fn solve(k: f64, grid: FkGrid, start: &FkState) -> Result<(FkTable, FkState)> {
    let FkGrid {
        dx,
        length,
        dt,
        t_end,
    } = grid;
    let n = (length / dx).round() as usize;
    if !(dx > 0.0 && n > 10 && dt > 0.0 && t_end > start.t + dt) || start.p.len() != n {
        return Err(Error::InvalidConfig(format!(
            "bad Feynman-Kac grid {grid:?}"
        )));
    }
    let steps = ((t_end - start.t) / dt - 1e-9).ceil() as usize;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * dx).collect();
    let factor = |h: f64| -> Vec<f64> { x.iter().map(|xi| (k * xi * h / 2.0).exp()).collect() };
    let react_full = factor(dt);
    let react_half = factor(dt / 2.0);
    let lam = 0.5 / (dx * dx);
    // implicit Euler over dt/2 and Crank-Nicolson over dt share I - (dt/2) A
    let lhs = Tridiag::new(n, lam * dt / 2.0);

    let mut st = Stepper {
        x: x.clone(),
        dx,
        k,
        p: start.p.clone(),
        scratch: vec![0.0; n],
    };
    let first: f64 = st.p.iter().zip(&x).map(|(p, x)| p * x).sum::<f64>() * dx;
    let mut ln_z = Vec::with_capacity(steps + 1);
    let mut slope = Vec::with_capacity(steps + 1);
    ln_z.push(start.ln_z);
    slope.push(k * first);
    let mut acc = start.ln_z;
    for j in 0..steps {
        if j < 2 {
            for _ in 0..2 {
                st.react(&react_half);
                lhs.solve(&mut st.p);
                st.react(&react_half);
            }
        } else {
            st.react(&react_full);
            st.explicit_half(lam * dt / 2.0);
            lhs.solve(&mut st.p);
            st.react(&react_full);
        }
        let (lm, s) = st.normalize();
        if !lm.is_finite() {
            return Err(Error::NonConvergence {
                op: "feynman_kac",
                iterations: j,
            });
        }
        acc += lm;
        ln_z.push(acc);
        slope.push(s);
    }
    let end = FkState {
        t: start.t + steps as f64 * dt,
        ln_z: acc,
        p: st.p,
    };
    Ok((
        FkTable {
            k,
            t0: start.t,
            dt,
            ln_z,
            slope,
        },
        end,
    ))
}

/// Richardson combination of runs at dt and dt/2 (second order in dt). The
/// returned state is that of the dt/2 run.
pub fn solve_extrapolated(k: f64, grid: FkGrid, start: &FkState) -> Result<(FkTable, FkState)> {
    let (coarse, _) = solve(k, grid, start)?;
    let (fine, end) = solve(
        k,
        FkGrid {
            dt: grid.dt / 2.0,
            t_end: coarse.t_end(),
            ..grid
        },
        start,
    )?;
    let n = coarse.ln_z.len();
    let mut ln_z = Vec::with_capacity(n);
    let mut slope = Vec::with_capacity(n);
    for j in 0..n {
        ln_z.push((4.0 * fine.ln_z[2 * j] - coarse.ln_z[j]) / 3.0);
        slope.push((4.0 * fine.slope[2 * j] - coarse.slope[j]) / 3.0);
    }
    Ok((
        FkTable {
            k,
            t0: coarse.t0,
            dt: grid.dt,
            ln_z,
            slope,
        },
        end,
    ))
}

/// Cell averages of `state` (grid `dx_from`) on a coarser aligned grid of
/// `n` cells of width `dx_to`, an integer multiple of `dx_from`.
pub fn coarsen(state: &FkState, dx_from: f64, dx_to: f64, n: usize) -> Result<FkState> {
    let ratio = (dx_to / dx_from).round() as usize;
    if ratio == 0 || ((ratio as f64) * dx_from - dx_to).abs() > 1e-12 * dx_to {
        return Err(Error::InvalidConfig("grids are not aligned".into()));
    }
    let mut p = vec![0.0; n];
    for (i, v) in state.p.iter().enumerate() {
        let j = i / ratio;
        if j < n {
            p[j] += v / ratio as f64;
        }
    }
    Ok(FkState {
        t: state.t,
        ln_z: state.ln_z,
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn start(k: f64, g: FkGrid) -> FkState {
        bridge_start(k, T0, g.dx, (g.length / g.dx).round() as usize)
    }

    #[test]
    fn zero_tilt_keeps_mass() {
        let g = FkGrid {
            dx: 0.01,
            length: 10.0,
            dt: 0.01,
            t_end: 1.0,
        };
        let (t, _) = solve(0.0, g, &start(0.0, g)).unwrap();
        assert!(t.ln_z.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn bridge_mean_integrates_to_free_mean() {
        // ∫ half-normal(x) m(x) dx = E C_t0 = t0^{3/2} 4/(3√(2π))
        let t0 = 0.04;
        let k = 1e-7;
        let s = bridge_start(k, t0, 0.002, 2000);
        let exact = t0.powf(1.5) * 4.0 / (3.0 * (2.0 * PI).sqrt());
        // cell averages against midpoint tilts: O(dx²) relative
        assert!(((s.ln_z / k - exact) / exact).abs() < 1e-4);
    }

    #[test]
    fn small_time_mean() {
        // d ln Z/dt at k → 0 is k E|W_t| = k √(2t/π)
        let k = 1e-6;
        let g = FkGrid {
            dx: 0.005,
            length: 12.0,
            dt: 0.002,
            t_end: 2.0,
        };
        let (t, _) = solve_extrapolated(k, g, &start(k, g)).unwrap();
        let (_, d) = t.hermite(1.0);
        let exact = k * (2.0 / PI).sqrt();
        assert!(((d - exact) / exact).abs() < 1e-4, "{d} vs {exact}");
    }

    #[test]
    fn coarsen_keeps_mass() {
        let s = bridge_start(1.0, 0.5, 0.005, 4000);
        let c = coarsen(&s, 0.005, 0.04, 600).unwrap();
        let m0: f64 = s.p.iter().sum::<f64>() * 0.005;
        let m1: f64 = c.p.iter().sum::<f64>() * 0.04;
        assert!((m0 - m1).abs() < 1e-12);
        assert!(coarsen(&s, 0.005, 0.0333, 10).is_err());
    }

    #[test]
    fn hermite_reproduces_cubic() {
        let dt = 0.1;
        let f = |t: f64| t * t * t - 2.0 * t;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let table = FkTable {
            k: 0.0,
            t0: 0.0,
            dt,
            ln_z: (0..=20).map(|j| f(j as f64 * dt)).collect(),
            slope: (0..=20).map(|j| df(j as f64 * dt)).collect(),
        };
        let (v, d) = table.hermite(1.234);
        assert!((v - f(1.234)).abs() < 1e-12);
        assert!((d - df(1.234)).abs() < 1e-10);
    }
}
