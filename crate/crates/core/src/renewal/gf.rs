use crate::error::{Error, Result};
use crate::specfun::{airy_h, AIRY_PRIME_FIRST_ZERO};
use std::fmt;
use std::sync::Arc;

type EvalFn = dyn Fn(f64, f64) -> Option<f64> + Send + Sync;

/// A Laplace-transformed generating function G̃(k, s).
///
/// Evaluation returns `None` outside the domain of validity.
#[derive(Clone)]
pub struct LaplaceGF {
    name: String,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for LaplaceGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaplaceGF")
            .field("name", &self.name)
            .finish()
    }
}

impl LaplaceGF {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64, f64) -> Option<f64> + Send + Sync + 'static,
    {
        LaplaceGF {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, k: f64, s: f64) -> Option<f64> {
        (self.eval)(k, s).filter(|v| v.is_finite())
    }

    pub fn is_valid(&self, k: f64, s: f64) -> bool {
        self.eval(k, s).is_some()
    }
}

/// G̃_0(k, s) = 1/√(s(s-k)) for the occupation time, valid for s > max(k, 0).
pub fn free_gf_occupation() -> LaplaceGF {
    LaplaceGF::new("occupation", |k, s| {
        if s > k.max(0.0) {
            Some(1.0 / (s * (s - k)).sqrt())
        } else {
            None
        }
    })
}

/// G̃_0(k, s) = (-k)^{-2/3} H(2^{1/3} s/(-k)^{2/3}) for the absolute area, k < 0.
///
/// At k = 0 the value is the normalization 1/s; k > 0 is outside the domain.
pub fn free_gf_absarea() -> LaplaceGF {
    LaplaceGF::new("absarea", |k, s| {
        if k > 0.0 {
            return None;
        }
        if k == 0.0 {
            return if s > 0.0 { Some(1.0 / s) } else { None };
        }
        let scale = (-k).powf(2.0 / 3.0);
        let x = 2f64.cbrt() * s / scale;
        if x <= AIRY_PRIME_FIRST_ZERO {
            return None;
        }
        airy_h(x).ok().map(|h| h / scale)
    })
}

/// G̃_r(k, s) = G̃_0(k, r+s) / (1 - r G̃_0(k, r+s)).
pub fn renewal_map(g0: &LaplaceGF, r: f64) -> LaplaceGF {
    let inner = g0.clone();
    LaplaceGF::new(format!("{} reset at r={r}", g0.name()), move |k, s| {
        let g = inner.eval(k, r + s)?;
        let den = 1.0 - r * g;
        if den > 0.0 && g > 0.0 {
            Some(g / den)
        } else {
            None
        }
    })
}

/// Smallest s in [lo, hi] at which `gf` is valid at `k`, by bisection on the
/// validity flag. `lo` must be invalid and `hi` valid.
pub fn largest_pole(gf: &LaplaceGF, k: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if gf.is_valid(k, lo) || !gf.is_valid(k, hi) {
        return Err(Error::Bracket {
            op: "largest_pole",
            lo,
            hi,
        });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if gf.is_valid(k, m) {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::scgf_a;
    use crate::specfun::{airy_ai_int, airy_ai_prime};

    #[test]
    fn occupation_free_values() {
        let g = free_gf_occupation();
        assert_eq!(g.eval(0.0, 2.0), Some(0.5));
        assert!((g.eval(1.0, 2.0).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(!g.is_valid(2.0, 2.0));
    }

    #[test]
    fn occupation_reset_closed_form() {
        let gr = renewal_map(&free_gf_occupation(), 1.0);
        let (k, s, r) = (1.0, 2.0, 1.0_f64);
        let expect = 1.0 / (((s + r) * (s + r - k)).sqrt() - r);
        assert!((gr.eval(k, s).unwrap() - expect).abs() < 1e-15);
        for s in [0.3, 1.0, 4.0] {
            assert!((gr.eval(0.0, s).unwrap() - 1.0 / s).abs() < 1e-14);
        }
    }

    #[test]
    fn occupation_pole_is_scgf() {
        let gr = renewal_map(&free_gf_occupation(), 1.0);
        for k in [-2.0, -1.0, -0.5, 0.5, 1.0] {
            let lam = scgf_a(k, 1.0);
            let p = largest_pole(&gr, k, lam - 1.0, lam + 1.0, 1e-12).unwrap();
            assert!((p - lam).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn absarea_free_values() {
        let g = free_gf_absarea();
        assert!(!g.is_valid(0.5, 1.0));
        assert!((g.eval(-1e-9, 2.0).unwrap() - 0.5).abs() < 1e-6);
        let x = 2f64.cbrt();
        let expect = -2f64.cbrt() * airy_ai_int(x).unwrap() / airy_ai_prime(x).unwrap();
        assert!((g.eval(-1.0, 1.0).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn absarea_small_k_expansion() {
        use crate::analytic::ABSAREA_FREE_MEAN;
        use crate::specfun::gamma;
        let g = free_gf_absarea();
        let (k, s) = (-1e-4, 2.0_f64);
        let a = ABSAREA_FREE_MEAN * gamma(2.5).unwrap();
        let slope = (g.eval(k, s).unwrap() - 1.0 / s) / k;
        let expect = a / s.powf(2.5);
        assert!(
            ((slope - expect) / expect).abs() < 5e-3,
            "{slope} vs {expect}"
        );
    }

    #[test]
    fn absarea_reset_normalization() {
        let gr = renewal_map(&free_gf_absarea(), 0.7);
        for s in [0.2, 1.0, 3.0] {
            assert!((gr.eval(0.0, s).unwrap() - 1.0 / s).abs() < 1e-14);
        }
    }
}
