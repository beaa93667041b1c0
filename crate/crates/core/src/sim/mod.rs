//! Monte Carlo simulation of reset Brownian motion.
//!
//! Reset epochs are drawn exactly from exponential gaps. Between resets the
//! path advances on a grid of step `dt`, with a final partial step of the
//! exact remaining length, and the three functionals are accumulated on the
//! fly. Path `i` always uses the random stream `(seed, i)`, so results do not
//! depend on scheduling or on the number of worker threads.

mod io;
mod stats;

pub use io::{write_samples_csv, SAMPLE_CSV_HEADER};
pub use stats::{
    chi_square_histogram, estimate_density, estimate_moments, ks_distance, ks_two_sample,
    moment_summary, Histogram, MomentSummary, StreamingMoments, BATCHES,
};

use crate::error::{Error, Result};
use crate::Functional;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Random stream type used for every path.
pub type PathRng = ChaCha8Rng;

/// Default cap on the memory an in-memory ensemble may use.
pub const DEFAULT_MEMORY_CAP: usize = 1 << 30;

/// Paths per block in streaming reductions. Fixed so that block boundaries,
/// and with them every rounding, are independent of the thread count.
const BLOCK: usize = 4096;

/// Parameters that fully determine a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Reset rate r ≥ 0.
    pub r: f64,
    /// Horizon T > 0.
    pub t: f64,
    /// Inner grid step.
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Reset position; the process is defined with x* = 0.
    pub x_star: f64,
}

/// min(1e-3 T, 0.1/r).
pub fn default_dt(r: f64, t: f64) -> f64 {
    let a = 1e-3 * t;
    if r > 0.0 {
        a.min(0.1 / r)
    } else {
        a
    }
}

impl SimConfig {
    pub fn new(r: f64, t: f64, n_paths: usize, seed: u64) -> Self {
        SimConfig {
            r,
            t,
            dt: default_dt(r, t),
            n_paths,
            seed,
            x_star: 0.0,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return bad(format!("reset rate must be >= 0, got {}", self.r));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad(format!("horizon must be > 0, got {}", self.t));
        }
        if !(self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        let slack = 1.0 + 1e-12;
        if self.dt > self.t / 10.0 * slack {
            return bad(format!("dt = {} exceeds T/10 = {}", self.dt, self.t / 10.0));
        }
        if self.r * self.dt > 0.1 * slack {
            return bad(format!("r*dt = {} exceeds 0.1", self.r * self.dt));
        }
        if self.n_paths == 0 {
            return bad("n_paths must be >= 1".into());
        }
        if self.x_star != 0.0 {
            return bad("reset position is fixed at 0".into());
        }
        Ok(())
    }
}

/// Terminal values of one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSample {
    /// Occupation time of [0, ∞).
    pub a: f64,
    /// Area.
    pub b: f64,
    /// Absolute area.
    pub c: f64,
    pub x_end: f64,
    pub n_resets: u64,
}

impl FunctionalSample {
    pub fn value(&self, which: Functional) -> f64 {
        match which {
            Functional::Occupation => self.a,
            Functional::Area => self.b,
            Functional::AbsArea => self.c,
        }
    }
}

/// Independent stream for path `index`; a pure function of (seed, index).
pub fn path_stream(seed: u64, index: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Poisson(r) reset epochs in (0, T), in increasing order.
pub fn sample_reset_epochs<R: Rng + ?Sized>(rng: &mut R, r: f64, t: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if r <= 0.0 {
        return out;
    }
    let exp = Exp::new(r).expect("positive rate");
    let mut s: f64 = exp.sample(rng);
    while s < t {
        out.push(s);
        s += exp.sample(rng);
    }
    out
}

#[derive(Default)]
struct Accum {
    a: f64,
    b: f64,
    c: f64,
}

impl Accum {
    #[inline]
    fn step(&mut self, x0: f64, x1: f64, h: f64) {
        let mid = 0.5 * (x0 + x1);
        if mid >= 0.0 {
            self.a += h;
        }
        self.b += h * mid;
        self.c += 0.5 * h * (x0.abs() + x1.abs());
    }
}

/// Simulate one path, drawing standard normal increments from `normal`.
pub fn simulate_path_with<R, N>(config: &SimConfig, rng: &mut R, mut normal: N) -> FunctionalSample
where
    R: Rng + ?Sized,
    N: FnMut(&mut R) -> f64,
{
    let dt = config.dt;
    let sdt = dt.sqrt();
    let t_end = config.t;
    let exp = (config.r > 0.0).then(|| Exp::new(config.r).expect("positive rate"));
    let mut acc = Accum::default();
    let mut x = 0.0;
    let mut now = 0.0;
    let mut n_resets = 0u64;
    loop {
        let next = match &exp {
            Some(e) => now + e.sample(rng),
            None => f64::INFINITY,
        };
        let seg_end = next.min(t_end);
        let len = seg_end - now;
        let full = (len / dt).floor() as u64;
        for _ in 0..full {
            let x1 = x + sdt * normal(rng);
            acc.step(x, x1, dt);
            x = x1;
        }
        let rem = len - full as f64 * dt;
        if rem > 0.0 {
            let x1 = x + rem.sqrt() * normal(rng);
            acc.step(x, x1, rem);
            x = x1;
        }
        if next >= t_end {
            break;
        }
        now = next;
        x = 0.0;
        n_resets += 1;
    }
    FunctionalSample {
        // summed steps can overshoot T by rounding
        a: acc.a.min(t_end),
        b: acc.b,
        c: acc.c,
        x_end: x,
        n_resets,
    }
}

/// Simulate one path with Gaussian increments.
pub fn simulate_path<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> FunctionalSample {
    simulate_path_with(config, rng, |g| StandardNormal.sample(g))
}

/// Simulate `config.n_paths` paths in parallel; output order is path order.
pub fn run_ensemble(config: &SimConfig) -> Result<Vec<FunctionalSample>> {
    run_ensemble_capped(config, DEFAULT_MEMORY_CAP)
}

/// As [`run_ensemble`], failing with [`Error::Resource`] above `cap_bytes`.
pub fn run_ensemble_capped(config: &SimConfig, cap_bytes: usize) -> Result<Vec<FunctionalSample>> {
    config.validate()?;
    let requested = config
        .n_paths
        .saturating_mul(std::mem::size_of::<FunctionalSample>());
    if requested > cap_bytes {
        return Err(Error::Resource {
            requested_bytes: requested,
            cap_bytes,
        });
    }
    let cfg = *config;
    Ok((0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(&cfg, &mut path_stream(cfg.seed, i)))
        .collect())
}

/// Streaming moments of the three functionals and the endpoint.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub a: StreamingMoments,
    pub b: StreamingMoments,
    pub c: StreamingMoments,
    pub x_end: StreamingMoments,
    pub mean_resets: f64,
}

/// Run an ensemble without storing samples; any size of ensemble fits.
///
/// Blocks of fixed size are reduced in parallel and merged in block order.
pub fn run_summary(config: &SimConfig) -> Result<EnsembleSummary> {
    config.validate()?;
    let cfg = *config;
    let n = cfg.n_paths as u64;
    let blocks = n.div_ceil(BLOCK as u64);
    let parts: Vec<(
        StreamingMoments,
        StreamingMoments,
        StreamingMoments,
        StreamingMoments,
        u64,
    )> = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut m = (
                StreamingMoments::default(),
                StreamingMoments::default(),
                StreamingMoments::default(),
                StreamingMoments::default(),
                0u64,
            );
            let lo = blk * BLOCK as u64;
            let hi = (lo + BLOCK as u64).min(n);
            for i in lo..hi {
                let s = simulate_path(&cfg, &mut path_stream(cfg.seed, i));
                m.0.push(s.a);
                m.1.push(s.b);
                m.2.push(s.c);
                m.3.push(s.x_end);
                m.4 += s.n_resets;
            }
            m
        })
        .collect();
    let mut out = EnsembleSummary {
        a: StreamingMoments::default(),
        b: StreamingMoments::default(),
        c: StreamingMoments::default(),
        x_end: StreamingMoments::default(),
        mean_resets: 0.0,
    };
    let mut resets = 0u64;
    for p in parts {
        out.a.merge(&p.0);
        out.b.merge(&p.1);
        out.c.merge(&p.2);
        out.x_end.merge(&p.3);
        resets += p.4;
    }
    out.mean_resets = resets as f64 / n as f64;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_resets_without_rate() {
        let mut rng = path_stream(1, 0);
        assert!(sample_reset_epochs(&mut rng, 0.0, 5.0).is_empty());
        let cfg = SimConfig::new(0.0, 1.0, 10, 3);
        let s = run_ensemble(&cfg).unwrap();
        assert!(s.iter().all(|p| p.n_resets == 0));
    }

    #[test]
    fn epochs_are_reproducible_and_ordered() {
        let e1 = sample_reset_epochs(&mut path_stream(9, 4), 1.0, 10.0);
        let e2 = sample_reset_epochs(&mut path_stream(9, 4), 1.0, 10.0);
        assert_eq!(e1, e2);
        assert!(e1.windows(2).all(|w| w[0] < w[1]));
        assert!(e1.iter().all(|&s| s > 0.0 && s < 10.0));
    }

    #[test]
    fn mean_reset_count() {
        let n = 100_000u64;
        let total: usize = (0..n)
            .map(|i| sample_reset_epochs(&mut path_stream(11, i), 2.0, 10.0).len())
            .sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 20.0).abs() < 3.0 * 20f64.sqrt() / (n as f64).sqrt());
    }

    #[test]
    fn nonnegative_increments_give_full_occupation() {
        let cfg = SimConfig::new(0.0, 2.0, 1, 5);
        let mut rng = path_stream(5, 0);
        let s = simulate_path_with(&cfg, &mut rng, |g| {
            let z: f64 = StandardNormal.sample(g);
            z.abs()
        });
        assert!((s.a - cfg.t).abs() < 1e-12);
        assert!(s.b > 0.0 && (s.c - s.b).abs() < 1e-12);
    }

    #[test]
    fn zero_increments_give_zero_area() {
        let cfg = SimConfig::new(1.0, 3.0, 1, 5);
        let s = simulate_path_with(&cfg, &mut path_stream(2, 0), |_| 0.0);
        assert_eq!(s.b, 0.0);
        assert_eq!(s.c, 0.0);
        // midpoint 0 counts as non-negative
        assert!((s.a - 3.0).abs() < 1e-12);
    }

    #[test]
    fn invariants_hold_per_path() {
        let cfg = SimConfig::new(1.0, 5.0, 500, 17);
        for s in run_ensemble(&cfg).unwrap() {
            assert!(s.a >= 0.0 && s.a <= cfg.t);
            assert!(s.c >= s.b.abs() - 1e-12);
        }
    }

    #[test]
    fn deterministic_and_order_free() {
        let cfg = SimConfig::new(1.0, 2.0, 300, 42);
        let a = run_ensemble(&cfg).unwrap();
        let b = run_ensemble(&cfg).unwrap();
        assert_eq!(a, b);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = one.install(|| run_ensemble(&cfg)).unwrap();
        assert_eq!(a, c);
        // path 7 alone matches path 7 in the ensemble
        let p7 = simulate_path(&cfg, &mut path_stream(42, 7));
        assert_eq!(p7, a[7]);
    }

    #[test]
    fn singleton_ensemble() {
        let cfg = SimConfig::new(1.0, 1.0, 1, 0);
        assert_eq!(run_ensemble(&cfg).unwrap().len(), 1);
    }

    #[test]
    fn memory_cap_is_enforced() {
        let cfg = SimConfig::new(1.0, 1.0, 1000, 0);
        assert!(matches!(
            run_ensemble_capped(&cfg, 100),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn streaming_summary_matches_in_memory() {
        let cfg = SimConfig::new(1.0, 2.0, 9000, 8);
        let s = run_ensemble(&cfg).unwrap();
        let m = run_summary(&cfg).unwrap();
        let mean_c = s.iter().map(|p| p.c).sum::<f64>() / s.len() as f64;
        assert!((m.c.mean() - mean_c).abs() < 1e-12);
        assert_eq!(m.c.count(), 9000);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let m1 = one.install(|| run_summary(&cfg)).unwrap();
        assert_eq!(m.c.mean().to_bits(), m1.c.mean().to_bits());
        assert_eq!(m.b.variance().to_bits(), m1.b.variance().to_bits());
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(1.0, 1.0, 10, 0).validate().is_ok());
        assert!(SimConfig::new(-1.0, 1.0, 10, 0).validate().is_err());
        assert!(SimConfig::new(1.0, 0.0, 10, 0).validate().is_err());
        assert!(SimConfig::new(1.0, 1.0, 0, 0).validate().is_err());
        assert!(SimConfig::new(1.0, 1.0, 10, 0)
            .with_dt(0.2)
            .validate()
            .is_err());
        assert!(SimConfig::new(10.0, 100.0, 10, 0)
            .with_dt(0.05)
            .validate()
            .is_err());
        assert_eq!(default_dt(1.0, 5.0), 5e-3);
        assert_eq!(default_dt(1.0, 200.0), 0.1);
    }
}
