//! Component rate functions: reset counts, duration laws, per-excursion values.

use crate::error::{domain, Error, Result};
use crate::extended::RateValue;
use crate::quad::GaussLaguerre;
use crate::roots::golden_max;
use serde::Serialize;

/// I_r(n) = n log(n/r) - n + r, the rate of the reset count per unit time.
pub fn i_rate(n: f64, r: f64) -> f64 {
    if n == 0.0 {
        return r;
    }
    n * (n / r).ln() - n + r
}

/// A probability measure on a finite time grid, together with the mass the
/// Exp(r) reference law assigns to each node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// log of the reference mass per node, `-inf` where it underflows.
    pub log_reference: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, log_reference: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.len() != log_reference.len() || nodes.is_empty() {
            return Err(Error::InvalidConfig(
                "nodes, weights and reference must have equal nonzero length".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes[0] < 0.0 {
            return Err(Error::InvalidConfig(
                "nodes must be >= 0 and strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidConfig("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(DiscreteMeasure {
            nodes,
            weights,
            log_reference,
        })
    }

    /// Gauss-Laguerre nodes scaled to Exp(r); the weights are the reference itself.
    pub fn laguerre(r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0) {
            return Err(domain("DiscreteMeasure::laguerre", r, "r > 0"));
        }
        let gl = GaussLaguerre::new(n)?;
        let total: f64 = gl.weights.iter().sum();
        let weights: Vec<f64> = gl.weights.iter().map(|w| w / total).collect();
        let log_reference = weights.iter().map(|w| w.ln()).collect();
        Ok(DiscreteMeasure {
            nodes: gl.nodes.iter().map(|x| x / r).collect(),
            weights,
            log_reference,
        })
    }

    /// Cells between consecutive `edges`, one node at each midpoint. The
    /// reference mass is e^{-ra} - e^{-rb}, evaluated directly so that far
    /// cells underflow to zero. The weights start as the normalized reference.
    pub fn cells(r: f64, edges: &[f64]) -> Result<Self> {
        if !(r > 0.0) {
            return Err(domain("DiscreteMeasure::cells", r, "r > 0"));
        }
        let mass = cell_masses(edges, |t| 1.0 - (-r * t).exp())?;
        let total: f64 = mass.iter().sum();
        let weights = mass.iter().map(|m| m / total).collect();
        DiscreteMeasure::from_parts(
            edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
            weights,
            mass.iter().map(|m| (m / total).ln()).collect(),
        )
    }

    /// Same grid and reference, new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        DiscreteMeasure::from_parts(self.nodes.clone(), weights, self.log_reference.clone())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Normalized cell masses of a distribution with the given CDF.
pub fn cell_masses<F: Fn(f64) -> f64>(edges: &[f64], cdf: F) -> Result<Vec<f64>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig(
            "edges must be strictly increasing".into(),
        ));
    }
    let mass: Vec<f64> = edges.windows(2).map(|w| cdf(w[1]) - cdf(w[0])).collect();
    let total: f64 = mass.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidConfig("no mass on the grid".into()));
    }
    Ok(mass.into_iter().map(|m| m / total).collect())
}

/// Relative entropy of `mu` with respect to its reference law.
///
/// Returns `Infinite` when `mu` charges a node of zero reference mass.
pub fn j_rate(mu: &DiscreteMeasure) -> RateValue {
    let mut h = 0.0;
    for (w, lr) in mu.weights.iter().zip(&mu.log_reference) {
        if *w == 0.0 {
            continue;
        }
        if *lr == f64::NEG_INFINITY {
            return RateValue::Infinite;
        }
        h += w * (w.ln() - lr);
    }
    RateValue::Finite(h.max(0.0))
}

/// Result of a Legendre-Fenchel evaluation K(u) = sup_v {uv - M(v)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KRate {
    pub value: f64,
    pub maximizer: f64,
    /// The maximizer sits on the window edge; `value` is then a lower bound.
    pub at_boundary: bool,
}

/// K(u) = sup_v {uv - M(v)} over `window`, for a convex cumulant function `cgf`.
pub fn k_rate<F: Fn(f64) -> f64>(u: f64, cgf: F, window: (f64, f64)) -> Result<KRate> {
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(Error::InvalidConfig(format!("empty v-window [{lo}, {hi}]")));
    }
    let obj = |v: f64| u * v - cgf(v);
    let xtol = 1e-10 * (hi - lo).max(1.0);
    let mut v = golden_max(obj, lo, hi, xtol);
    let mut best = obj(v);
    // Newton polish on M'(v) = u
    for _ in 0..20 {
        let h = 1e-4 * v.abs().max(1.0);
        let (mm, m0, mp) = (cgf(v - h), cgf(v), cgf(v + h));
        let d1 = (mp - mm) / (2.0 * h);
        let d2 = (mp - 2.0 * m0 + mm) / (h * h);
        if !(d2 > 0.0) {
            break;
        }
        let step = (u - d1) / d2;
        let cand = (v + step).clamp(lo, hi);
        let val = obj(cand);
        if !(val >= best) {
            break;
        }
        let done = (cand - v).abs() <= 1e-13 * v.abs().max(1.0);
        v = cand;
        best = val;
        if done {
            break;
        }
    }
    if !best.is_finite() {
        return Err(Error::NonConvergence {
            op: "k_rate",
            iterations: 20,
        });
    }
    if lo <= 0.0 && hi >= 0.0 {
        // v = 0 is admissible and gives -M(0) = 0 for a normalized cgf
        best = best.max(-cgf(0.0));
    }
    let edge = 1e-6 * (hi - lo);
    Ok(KRate {
        value: best,
        maximizer: v,
        at_boundary: v - lo <= edge || hi - v <= edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_rate_values() {
        assert_eq!(i_rate(1.5, 1.5), 0.0);
        assert_eq!(i_rate(0.0, 0.7), 0.7);
        assert!((i_rate(2.0, 1.0) - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!((i_rate(2.0, 1.0) - 0.386_294).abs() < 1e-6);
        assert!(i_rate(1e-300, 1.0) <= 1.0 && i_rate(1e-300, 1.0) > 0.999);
    }

    #[test]
    fn j_rate_reference_is_zero() {
        let mu = DiscreteMeasure::laguerre(1.3, 32).unwrap();
        assert!(j_rate(&mu).to_f64().abs() < 1e-10);
        let edges: Vec<f64> = (0..=400).map(|i| i as f64 * 0.1).collect();
        let mu = DiscreteMeasure::cells(0.5, &edges).unwrap();
        assert!(j_rate(&mu).to_f64().abs() < 1e-10);
    }

    #[test]
    fn j_rate_between_exponentials() {
        let r = 1.0;
        let target = 2f64.ln() - 0.5;
        let edges: Vec<f64> = (0..=6000).map(|i| i as f64 * 0.01).collect();
        let mu = DiscreteMeasure::cells(r, &edges).unwrap();
        let w = cell_masses(&edges, |t| 1.0 - (-2.0 * r * t).exp()).unwrap();
        let h = j_rate(&mu.with_weights(w).unwrap()).to_f64();
        assert!((h - target).abs() < 1e-3, "{h}");
        // same projection on the Laguerre grid: reweight by the density ratio
        let mu = DiscreteMeasure::laguerre(r, 64).unwrap();
        let raw: Vec<f64> = mu
            .nodes
            .iter()
            .zip(&mu.weights)
            .map(|(t, w)| w * 2.0 * (-r * t).exp())
            .collect();
        let z: f64 = raw.iter().sum();
        let h = j_rate(
            &mu.with_weights(raw.iter().map(|x| x / z).collect())
                .unwrap(),
        )
        .to_f64();
        assert!((h - target).abs() < 1e-3, "{h}");
    }

    #[test]
    fn j_rate_infinite_off_support() {
        let edges: Vec<f64> = (0..=100).map(|i| i as f64 * 10.0).collect();
        let mu = DiscreteMeasure::cells(1.0, &edges).unwrap();
        let mut w = vec![0.0; 100];
        w[90] = 1.0;
        assert_eq!(j_rate(&mu.with_weights(w).unwrap()), RateValue::Infinite);
    }

    #[test]
    fn measure_rejects_bad_input() {
        assert!(
            DiscreteMeasure::from_parts(vec![0.0, 1.0], vec![0.5, 0.6], vec![0.0, 0.0]).is_err()
        );
        assert!(
            DiscreteMeasure::from_parts(vec![1.0, 1.0], vec![0.5, 0.5], vec![0.0, 0.0]).is_err()
        );
    }

    #[test]
    fn k_rate_gaussian() {
        let k = k_rate(1.0, |v| 0.5 * v * v, (-10.0, 10.0)).unwrap();
        assert!((k.value - 0.5).abs() < 1e-12);
        assert!((k.maximizer - 1.0).abs() < 1e-9);
        assert!(!k.at_boundary);
        let k = k_rate(2.0, |v| 0.5 * 4.0 * v * v, (-10.0, 10.0)).unwrap();
        assert!((k.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn k_rate_zero_at_mean_and_boundary_flag() {
        let m = |v: f64| 0.3 * v + 0.5 * v * v;
        assert!(k_rate(0.3, m, (-5.0, 5.0)).unwrap().value.abs() < 1e-10);
        let k = k_rate(100.0, m, (-1.0, 1.0)).unwrap();
        assert!(k.at_boundary);
        assert!((k.value - (100.0 - 0.8)).abs() < 1e-6);
    }
}
