//! Coefficient of the quadratic behaviour of the rate just above the mean.
//!
//! C_r = inf { m²/(2r) + ½ E_r[ν²] + (r/2) K''_1(u*) E_r[v²] }
//!       s.t. E_r[ν] = 0,  r E_r[(m/r + ν(t) + v(t)) t^α] = 1,
//!
//! with E_r the Exp(r) expectation. On a Gauss-Laguerre grid the objective is
//! a diagonal quadratic form and the constraints are two linear equations, so
//! the minimizer follows from the 2x2 normal equations.

use super::cgf::CgfProvider;
use super::rates::k_rate;
use crate::error::{domain, Error, Result};
use crate::quad::GaussLaguerre;

/// C_r on an `n_nodes` Laguerre grid. `u_star` is carried for reference;
/// only K''_1(u*) enters.
pub fn quadratic_coefficient(
    r: f64,
    alpha: f64,
    k1_second_deriv: f64,
    _u_star: f64,
    n_nodes: usize,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain("quadratic_coefficient", r, "r > 0"));
    }
    if !(alpha > 1.0) {
        return Err(domain("quadratic_coefficient", alpha, "alpha > 1"));
    }
    if !(k1_second_deriv > 0.0) {
        return Err(domain("quadratic_coefficient", k1_second_deriv, "K'' > 0"));
    }
    let gl = GaussLaguerre::new(n_nodes)?;
    let n = gl.len();
    let omega: Vec<f64> = gl.weights.clone();
    let ta: Vec<f64> = gl.nodes.iter().map(|x| (x / r).powf(alpha)).collect();

    // unknowns x = (m, ν_1..ν_n, v_1..v_n), objective ½ xᵀ Q x with diagonal Q
    let mut q = Vec::with_capacity(1 + 2 * n);
    q.push(1.0 / r);
    q.extend(omega.iter().cloned());
    q.extend(omega.iter().map(|w| r * k1_second_deriv * w));
    // rows of A: Σ ω ν = 0 and Σ ω t^α m + r Σ ω t^α (ν + v) = 1
    let mut a0 = vec![0.0; 1 + 2 * n];
    let mut a1 = vec![0.0; 1 + 2 * n];
    a1[0] = omega.iter().zip(&ta).map(|(w, t)| w * t).sum();
    for i in 0..n {
        a0[1 + i] = omega[i];
        a1[1 + i] = r * omega[i] * ta[i];
        a1[1 + n + i] = r * omega[i] * ta[i];
    }
    let dot = |x: &[f64], y: &[f64]| -> f64 {
        x.iter().zip(y).zip(&q).map(|((a, b), qq)| a * b / qq).sum()
    };
    // normal equations (A Q^{-1} Aᵀ) y = (0, 1)
    let (g00, g01, g11) = (dot(&a0, &a0), dot(&a0, &a1), dot(&a1, &a1));
    let det = g00 * g11 - g01 * g01;
    if !(det.abs() > 1e-14 * g00 * g11) {
        return Err(Error::Singular("quadratic coefficient normal equations"));
    }
    let y0 = -g01 / det;
    let y1 = g00 / det;
    let x: Vec<f64> = (0..q.len())
        .map(|j| (y0 * a0[j] + y1 * a1[j]) / q[j])
        .collect();
    let value = 0.5 * x.iter().zip(&q).map(|(xi, qi)| qi * xi * xi).sum::<f64>();
    Ok(value)
}

/// Objective at the feasible point m = r^α/Γ(1+α), ν = v = 0.
pub fn quadratic_feasible_bound(r: f64, alpha: f64) -> f64 {
    let g = libm::tgamma(1.0 + alpha);
    r.powf(2.0 * alpha - 1.0) / (2.0 * g * g)
}

/// K''_1 at the mean of F_1, by central differences of the Legendre transform.
pub fn k1_second_derivative(provider: &dyn CgfProvider) -> Result<f64> {
    let u = provider.m1_prime(0.0);
    let h = 1e-4 * u.abs().max(1e-3);
    let window = (-50.0, 50.0);
    let k = |x: f64| k_rate(x, |v| provider.m1(v), window).map(|k| k.value);
    let (lo, mid, hi) = (k(u - h)?, k(u)?, k(u + h)?);
    Ok((hi - 2.0 * mid + lo) / (h * h))
}
