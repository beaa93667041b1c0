use super::FunctionalSample;
use crate::error::{Error, Result};
use crate::Functional;
use serde::Serialize;

/// Number of batches used for standard errors.
pub const BATCHES: usize = 50;

/// Running central moments up to order four, mergeable across blocks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StreamingMoments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl StreamingMoments {
    pub fn push(&mut self, x: f64) {
        self.merge(&StreamingMoments {
            n: 1,
            mean: x,
            ..Default::default()
        });
    }

    pub fn merge(&mut self, o: &StreamingMoments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n as f64, o.n as f64);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d2 = d * d;
        let mean = self.mean + d * nb / n;
        let m2 = self.m2 + o.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + o.m3
            + d2 * d * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * o.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + o.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * o.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * o.m3 - nb * self.m3) / n;
        *self = StreamingMoments {
            n: self.n + o.n,
            mean,
            m2,
            m3,
            m4,
        };
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n - 1) as f64
    }

    pub fn skewness(&self) -> f64 {
        let n = self.n as f64;
        (self.m3 / n) / (self.m2 / n).powf(1.5)
    }

    pub fn excess_kurtosis(&self) -> f64 {
        let n = self.n as f64;
        (self.m4 / n) / (self.m2 / n).powi(2) - 3.0
    }
}

/// Sample moments with batch-means standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub std_error_mean: f64,
    pub std_error_variance: f64,
}

fn sd_of(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Moments of a list of values. Standard errors come from 50 contiguous
/// batches; below 100 values the plain formulas are used instead.
pub fn moment_summary(values: &[f64]) -> Result<MomentSummary> {
    if values.len() < 2 {
        return Err(Error::DegenerateSample("fewer than two values"));
    }
    let mut m = StreamingMoments::default();
    for &v in values {
        m.push(v);
    }
    if m.m2 == 0.0 {
        return Err(Error::DegenerateSample("all values equal"));
    }
    let n = values.len();
    let (se_mean, se_var) = if n >= 2 * BATCHES {
        let mut means = Vec::with_capacity(BATCHES);
        let mut vars = Vec::with_capacity(BATCHES);
        for b in 0..BATCHES {
            let lo = b * n / BATCHES;
            let hi = (b + 1) * n / BATCHES;
            let mut bm = StreamingMoments::default();
            for &v in &values[lo..hi] {
                bm.push(v);
            }
            means.push(bm.mean());
            vars.push(bm.variance());
        }
        let k = (BATCHES as f64).sqrt();
        (sd_of(&means) / k, sd_of(&vars) / k)
    } else {
        let var = m.variance();
        let nf = n as f64;
        let m4 = m.m4 / nf;
        ((var / nf).sqrt(), ((m4 - var * var) / nf).max(0.0).sqrt())
    };
    Ok(MomentSummary {
        n,
        mean: m.mean(),
        variance: m.variance(),
        skewness: m.skewness(),
        excess_kurtosis: m.excess_kurtosis(),
        std_error_mean: se_mean,
        std_error_variance: se_var,
    })
}

/// Moments of one functional over an ensemble.
pub fn estimate_moments(samples: &[FunctionalSample], which: Functional) -> Result<MomentSummary> {
    let v: Vec<f64> = samples.iter().map(|s| s.value(which)).collect();
    moment_summary(&v)
}

/// Histogram with density normalization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// counts / (n · bin width), n = number of values inside the edges.
    pub normalized_density: Vec<f64>,
    /// Values that fell outside the edges.
    pub n_outside: usize,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Bin `values` on `edges`; the last bin is closed on the right.
pub fn estimate_density(values: &[f64], edges: &[f64]) -> Result<Histogram> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig(
            "histogram edges must be strictly increasing".into(),
        ));
    }
    let nb = edges.len() - 1;
    let mut counts = vec![0u64; nb];
    let mut outside = 0usize;
    let (lo, hi) = (edges[0], edges[nb]);
    for &v in values {
        if !(v >= lo && v <= hi) {
            outside += 1;
            continue;
        }
        let i = edges
            .partition_point(|e| *e <= v)
            .saturating_sub(1)
            .min(nb - 1);
        counts[i] += 1;
    }
    if outside as f64 > 1e-3 * values.len() as f64 {
        return Err(Error::Coverage {
            outside,
            total: values.len(),
        });
    }
    let inside = (values.len() - outside) as f64;
    let normalized_density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(c, w)| {
            if inside > 0.0 {
                *c as f64 / (inside * (w[1] - w[0]))
            } else {
                0.0
            }
        })
        .collect();
    Ok(Histogram {
        edges: edges.to_vec(),
        counts,
        normalized_density,
        n_outside: outside,
    })
}

/// Per-bin z-scores and the χ² statistic of a histogram against expected bin
/// probabilities. Returns (z scores, χ², degrees of freedom).
pub fn chi_square_histogram(hist: &Histogram, probs: &[f64]) -> (Vec<f64>, f64, usize) {
    let n = hist.total() as f64;
    let mut chi2 = 0.0;
    let z: Vec<f64> = hist
        .counts
        .iter()
        .zip(probs)
        .map(|(c, p)| {
            let e = n * p;
            let sd = (n * p * (1.0 - p)).sqrt();
            chi2 += (*c as f64 - e).powi(2) / e;
            (*c as f64 - e) / sd
        })
        .collect();
    (z, chi2, hist.counts.len() - 1)
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}
