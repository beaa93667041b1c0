use super::inverse::{inverse_laplace, InversionMethod};
use crate::analytic::{ABSAREA_FREE_MEAN, ABSAREA_FREE_SECOND_MOMENT};
use crate::error::{domain, Error, Result};
use crate::specfun::gamma;
use crate::Functional;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

type Coeff = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

pub const OCCUPATION_ORDER_CAP: usize = 40;
pub const AREA_ORDER_CAP: usize = 12;
pub const ABSAREA_ORDER_CAP: usize = 2;

/// Truncated power series Σ_n c_n(s) k^n with coefficient maps in s.
///
/// Coefficients accept complex s so that contour inversion can be used.
#[derive(Clone)]
pub struct PowerSeriesLT {
    coeff: Vec<Coeff>,
    /// Abscissa of validity: coefficients are finite for Re s > s_min.
    pub s_min: f64,
}

impl fmt::Debug for PowerSeriesLT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerSeriesLT")
            .field("order", &self.order())
            .field("s_min", &self.s_min)
            .finish()
    }
}

impl PowerSeriesLT {
    pub fn order(&self) -> usize {
        self.coeff.len() - 1
    }

    /// Coefficient of k^n at real s.
    pub fn coeff(&self, n: usize, s: f64) -> f64 {
        (self.coeff[n])(Complex64::new(s, 0.0)).re
    }

    /// Coefficient of k^n at complex s.
    pub fn coeff_complex(&self, n: usize, s: Complex64) -> Complex64 {
        (self.coeff[n])(s)
    }

    fn coeff_fn(&self, n: usize) -> Coeff {
        self.coeff[n].clone()
    }

    fn truncated(&self, order: usize) -> PowerSeriesLT {
        PowerSeriesLT {
            coeff: self.coeff[..=order].to_vec(),
            s_min: self.s_min,
        }
    }
}

fn check_cap(requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        Err(Error::OrderCap { requested, cap })
    } else {
        Ok(())
    }
}

/// Reset-free occupation series: coefficient of k^n is C(2n,n)/4^n s^{-(n+1)}.
pub fn free_series_occupation(order: usize) -> Result<PowerSeriesLT> {
    check_cap(order, OCCUPATION_ORDER_CAP)?;
    let mut coeff: Vec<Coeff> = Vec::with_capacity(order + 1);
    let mut binom = 1.0; // C(2n,n)/4^n
    for n in 0..=order {
        if n > 0 {
            binom *= (2 * n - 1) as f64 / (2 * n) as f64;
        }
        let c = binom;
        coeff.push(Arc::new(move |s: Complex64| c * s.powi(-(n as i32 + 1))));
    }
    Ok(PowerSeriesLT { coeff, s_min: 0.0 })
}

/// Reset-free area series: k^{2j} coefficient (3j)!/(6^j j!) s^{-(3j+1)}, odd terms zero.
pub fn free_series_area(order: usize) -> Result<PowerSeriesLT> {
    check_cap(order, AREA_ORDER_CAP)?;
    let mut coeff: Vec<Coeff> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n % 2 == 1 {
            coeff.push(Arc::new(|_s: Complex64| Complex64::new(0.0, 0.0)));
            continue;
        }
        let j = n / 2;
        let mut c = 1.0;
        for i in 1..=3 * j {
            c *= i as f64;
        }
        for i in 1..=j {
            c /= 6.0 * i as f64;
        }
        let p = -(3 * j as i32 + 1);
        coeff.push(Arc::new(move |s: Complex64| c * s.powi(p)));
    }
    Ok(PowerSeriesLT { coeff, s_min: 0.0 })
}

/// Reset-free absolute-area series to order 2: 1/s, a s^{-5/2}, 3b s^{-4}.
pub fn free_series_absarea(order: usize) -> Result<PowerSeriesLT> {
    check_cap(order, ABSAREA_ORDER_CAP)?;
    let a = ABSAREA_FREE_MEAN * gamma(2.5)?;
    let b3 = 3.0 * ABSAREA_FREE_SECOND_MOMENT;
    let all: [Coeff; 3] = [
        Arc::new(|s: Complex64| s.inv()),
        Arc::new(move |s: Complex64| a * s.powf(-2.5)),
        Arc::new(move |s: Complex64| b3 * s.powi(-4)),
    ];
    Ok(PowerSeriesLT {
        coeff: all[..=order].to_vec(),
        s_min: 0.0,
    })
}

/// Registered reset-free series for a functional.
pub fn free_series(functional: Functional, order: usize) -> Result<PowerSeriesLT> {
    match functional {
        Functional::Occupation => free_series_occupation(order),
        Functional::Area => free_series_area(order),
        Functional::AbsArea => free_series_absarea(order),
    }
}

/// Series form of the renewal map: shift s → s + r, then divide by 1 - r Σ.
pub fn renewal_series(g0: &PowerSeriesLT, r: f64, order: usize) -> Result<PowerSeriesLT> {
    check_cap(order, g0.order())?;
    if !(r > 0.0) {
        return Err(domain("renewal_series", r, "r > 0"));
    }
    let base = g0.truncated(order);
    let fns: Arc<Vec<Coeff>> = Arc::new((0..=order).map(|n| base.coeff_fn(n)).collect());
    let coeff = (0..=order)
        .map(|n| {
            let fns = fns.clone();
            Arc::new(move |s: Complex64| {
                let sr = s + r;
                let g: Vec<Complex64> = fns[..=n].iter().map(|c| c(sr)).collect();
                let d0 = 1.0 - r * g[0];
                let mut q: Vec<Complex64> = Vec::with_capacity(n + 1);
                for m in 0..=n {
                    let mut acc = g[m];
                    for j in 1..=m {
                        acc += r * g[j] * q[m - j];
                    }
                    q.push(acc / d0);
                }
                q[n]
            }) as Coeff
        })
        .collect();
    Ok(PowerSeriesLT {
        coeff,
        s_min: base.s_min - r,
    })
}

/// Moments E_r[F_T^n] for n = 0..=max_order, from n! times the inverted
/// k^n coefficient of the reset series. Index n holds the n-th moment.
pub fn moments_via_renewal(
    functional: Functional,
    r: f64,
    t: f64,
    max_order: usize,
    method: InversionMethod,
) -> Result<Vec<f64>> {
    let g0 = free_series(functional, max_order)?;
    let gr = renewal_series(&g0, r, max_order)?;
    let mut out = Vec::with_capacity(max_order + 1);
    let mut fact = 1.0;
    for n in 0..=max_order {
        if n > 0 {
            fact *= n as f64;
        }
        let v = inverse_laplace(|s| gr.coeff_complex(n, s), t, method)?;
        out.push(fact * v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{
        absarea_mean, absarea_second_moment, area_fourth_moment, area_second_moment,
    };

    #[test]
    fn free_area_coefficients() {
        let g = free_series_area(4).unwrap();
        let s = 1.7_f64;
        assert!((g.coeff(0, s) - 1.0 / s).abs() < 1e-15);
        assert_eq!(g.coeff(1, s), 0.0);
        assert!((g.coeff(2, s) - s.powi(-4)).abs() < 1e-15);
        assert!((g.coeff(4, s) - 10.0 * s.powi(-7)).abs() < 1e-14);
        assert!(matches!(free_series_area(13), Err(Error::OrderCap { .. })));
    }

    #[test]
    fn free_occupation_coefficients() {
        let g = free_series_occupation(3).unwrap();
        let s = 2.0_f64;
        assert!((g.coeff(1, s) - 0.5 / 4.0).abs() < 1e-15);
        assert!((g.coeff(2, s) - 0.375 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn reset_order_zero_is_normalized() {
        for f in Functional::ALL {
            let g0 = free_series(f, 0).unwrap();
            for r in [0.3, 1.0, 4.0] {
                let gr = renewal_series(&g0, r, 0).unwrap();
                assert!((gr.coeff(0, 1.3) - 1.0 / 1.3).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reset_area_coefficients_match_closed_forms() {
        let g0 = free_series_area(4).unwrap();
        for r in [0.2, 0.5, 1.0, 2.0, 5.0] {
            let gr = renewal_series(&g0, r, 4).unwrap();
            for s in [0.1, 0.5, 1.0, 3.0, 10.0] {
                let k2 = 1.0 / (s * s * (r + s) * (r + s));
                let k4 = (r + 10.0 * s) / (s.powi(3) * (s + r).powi(5));
                assert!(((gr.coeff(2, s) - k2) / k2).abs() < 1e-12);
                assert!(((gr.coeff(4, s) - k4) / k4).abs() < 1e-12);
                assert!(gr.coeff(3, s).abs() < 1e-15);
            }
        }
        let gr = renewal_series(&g0, 1.0, 4).unwrap();
        assert!((gr.coeff(2, 1.0) - 0.25).abs() < 1e-14);
        assert!((gr.coeff(4, 1.0) - 11.0 / 32.0).abs() < 1e-14);
    }

    #[test]
    fn reset_series_order_is_capped() {
        let g0 = free_series_absarea(2).unwrap();
        assert!(matches!(
            renewal_series(&g0, 1.0, 3),
            Err(Error::OrderCap { .. })
        ));
        assert!(free_series_absarea(3).is_err());
    }

    #[test]
    fn occupation_mean_is_half_horizon() {
        for (r, t) in [(1.0, 1.0), (0.3, 7.0), (2.0, 0.5)] {
            let m = moments_via_renewal(Functional::Occupation, r, t, 1, InversionMethod::Talbot)
                .unwrap();
            assert!((m[0] - 1.0).abs() < 1e-10);
            assert!((m[1] - 0.5 * t).abs() < 1e-8 * t, "r={r} t={t}");
        }
    }

    #[test]
    fn area_moments_match_closed_forms() {
        for t in [0.1, 1.0, 10.0] {
            let m =
                moments_via_renewal(Functional::Area, 1.0, t, 4, InversionMethod::Talbot).unwrap();
            let m2 = area_second_moment(t, 1.0).unwrap();
            let m4 = area_fourth_moment(t, 1.0).unwrap();
            assert!(((m[2] - m2) / m2).abs() < 1e-6, "t={t}");
            assert!(((m[4] - m4) / m4).abs() < 1e-6, "t={t}");
            assert!(m[1].abs() < 1e-10 && m[3].abs() < 1e-10);
        }
    }

    #[test]
    fn absarea_moments_match_closed_forms() {
        let m = moments_via_renewal(Functional::AbsArea, 1.0, 10.0, 2, InversionMethod::Talbot)
            .unwrap();
        let mean = absarea_mean(10.0, 1.0).unwrap();
        let second = absarea_second_moment(10.0, 1.0).unwrap();
        assert!(((m[1] - mean) / mean).abs() < 1e-6);
        assert!(((m[2] - second) / second).abs() < 1e-6);
    }
}
