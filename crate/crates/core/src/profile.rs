//! The generating profile `phi` of the unscaled rotational minimal
//! hypersurface: `phi(1) = 0`, `phi'(r) = (r^{2(n-1)} - 1)^{-1/2}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::numerics::chebyshev::PiecewiseChebyshev;
use crate::numerics::quadrature::Integrator;

/// Radius separating the inner (near the neck) and outer tables.
const SPLIT: f64 = 2.0;
const INNER_PANELS: usize = 32;
const OUTER_PANELS: usize = 16;
const DEGREE: usize = 20;
const TABLE_TOL: f64 = 1e-15;

#[derive(Debug, Clone)]
pub struct ProfileFunction {
    n: usize,
    /// phi(1 + s^2) for s in [0, 1].
    inner: PiecewiseChebyshev,
    /// Tail table in u = 1/r on [0, 1/2]; see `outer_integrand`.
    outer: PiecewiseChebyshev,
    phi_split: f64,
    outer_at_split: f64,
    phi_infinity: Option<f64>,
}

fn inner_integrand(m: f64, s: f64) -> f64 {
    // d/ds phi(1 + s^2) = 2 s / sqrt((1 + s^2)^{2m} - 1)
    if s == 0.0 {
        return 2.0 / (2.0 * m).sqrt();
    }
    let d = (2.0 * m * (s * s).ln_1p()).exp_m1();
    2.0 * s / d.sqrt()
}

fn outer_integrand(n: usize, w: f64) -> f64 {
    let m = (n - 1) as i32;
    if n == 2 {
        // (1/sqrt(1 - w^2) - 1) / w, written without cancellation.
        let c = (1.0 - w * w).sqrt();
        w / (c * (1.0 + c))
    } else {
        w.powi(m - 2) / (1.0 - w.powi(2 * m)).sqrt()
    }
}

impl ProfileFunction {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let m = (n - 1) as f64;
        let quad = Integrator::new(TABLE_TOL);

        let inner_f = |s: f64| inner_integrand(m, s);
        let inner = PiecewiseChebyshev::build(0.0, (SPLIT - 1.0).sqrt(), INNER_PANELS, DEGREE, |s| {
            if s == 0.0 {
                return Ok(0.0);
            }
            Ok(quad.integrate(inner_f, 0.0, s, None)?.value)
        })?;
        let phi_split = quad.integrate(inner_f, 0.0, (SPLIT - 1.0).sqrt(), None)?.value;

        let outer_f = |w: f64| outer_integrand(n, w);
        let outer = PiecewiseChebyshev::build(0.0, 1.0 / SPLIT, OUTER_PANELS, DEGREE, |u| {
            if u == 0.0 {
                return Ok(0.0);
            }
            Ok(quad.integrate(outer_f, 0.0, u, None)?.value)
        })?;
        let outer_at_split = quad.integrate(outer_f, 0.0, 1.0 / SPLIT, None)?.value;
        let phi_infinity = (n > 2).then_some(phi_split + outer_at_split);

        Ok(Self {
            n,
            inner,
            outer,
            phi_split,
            outer_at_split,
            phi_infinity,
        })
    }

    /// Shared instance per dimension, built on first use.
    pub fn shared(n: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ProfileFunction>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(p) = cache.lock().expect("profile cache poisoned").get(&n) {
            return Ok(Arc::clone(p));
        }
        let built = Arc::new(Self::new(n)?);
        let mut guard = cache.lock().expect("profile cache poisoned");
        Ok(Arc::clone(guard.entry(n).or_insert(built)))
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    fn m(&self) -> f64 {
        (self.n - 1) as f64
    }

    /// `lim phi(r)` as r -> infinity; `None` for n = 2 where phi is unbounded.
    pub fn phi_infinity(&self) -> Option<f64> {
        self.phi_infinity
    }

    fn check(&self, r: f64) -> Result<()> {
        if r >= 1.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("profile is defined on [1, inf), got r = {r}")))
        }
    }

    pub fn phi(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        if r <= SPLIT {
            return Ok(self.inner.eval((r - 1.0).sqrt()));
        }
        let u = 1.0 / r;
        let tail_piece = self.outer_at_split - self.outer.eval(u);
        if self.n == 2 {
            Ok(self.phi_split + (r / SPLIT).ln() + tail_piece)
        } else {
            Ok(self.phi_split + tail_piece)
        }
    }

    /// `phi_infinity - phi(r)`, accurate for large r. Errors for n = 2.
    pub fn tail(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let Some(limit) = self.phi_infinity else {
            return Err(Error::UnsupportedDimension {
                required: "n > 2".into(),
                actual: self.n,
            });
        };
        if r >= SPLIT {
            Ok(self.outer.eval(1.0 / r))
        } else {
            Ok(limit - self.inner.eval((r - 1.0).sqrt()))
        }
    }

    /// Direct adaptive quadrature of phi(r), bypassing the tables.
    pub fn phi_direct(&self, r: f64, tol: f64) -> Result<f64> {
        self.check(r)?;
        if r == 1.0 {
            return Ok(0.0);
        }
        let m = self.m();
        let s_max = (r - 1.0).sqrt();
        Ok(Integrator::new(tol)
            .integrate(|s| inner_integrand(m, s), 0.0, s_max, None)?
            .value)
    }

    /// `r^{2m} / (r^{2m} - 1)`, i.e. `1 + phi'^2`.
    pub fn metric_factor(&self, r: f64) -> f64 {
        let m = self.m();
        let x = (-2.0 * m * r.ln()).exp();
        if r < SPLIT {
            1.0 + 1.0 / (2.0 * m * r.ln()).exp_m1()
        } else {
            1.0 / (1.0 - x)
        }
    }

    pub fn dphi(&self, r: f64) -> f64 {
        let m = self.m();
        if r < SPLIT {
            1.0 / (2.0 * m * r.ln()).exp_m1().sqrt()
        } else {
            let x = (-2.0 * m * r.ln()).exp();
            (-m * r.ln()).exp() / (1.0 - x).sqrt()
        }
    }

    pub fn d2phi(&self, r: f64) -> f64 {
        -self.m() / r * self.metric_factor(r) * self.dphi(r)
    }

    pub fn d3phi(&self, r: f64) -> f64 {
        let m = self.m();
        let q = self.metric_factor(r);
        self.dphi(r) * q * (3.0 * m * m * q - m * (2.0 * m - 1.0)) / (r * r)
    }
}

/// Build the profile for dimension `n`.
pub fn profile(n: usize) -> Result<Arc<ProfileFunction>> {
    ProfileFunction::shared(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normalization_and_closed_form_n2() {
        let p = ProfileFunction::new(2).unwrap();
        assert_eq!(p.phi(1.0).unwrap(), 0.0);
        // arccosh(2) via mpmath
        assert_relative_eq!(p.phi(2.0).unwrap(), 1.316_957_896_924_816_7, max_relative = 1e-14);
        for &r in &[1.0001, 1.3, 1.9, 2.5, 10.0, 1e3, 1e8, 1e200] {
            let exact = 2.0 * ((r - 1.0) / 2.0f64).sqrt().asinh();
            assert_relative_eq!(p.phi(r).unwrap(), exact, max_relative = 1e-13);
        }
        assert!(p.phi_infinity().is_none());
        assert!(p.tail(3.0).is_err());
    }

    #[test]
    fn limit_n3_matches_beta_function() {
        let p = ProfileFunction::new(3).unwrap();
        assert_relative_eq!(p.phi_infinity().unwrap(), 1.311_028_777_146_059_9, max_relative = 1e-13);
        // tail(r) ~ 1/r for n = 3
        assert_relative_eq!(p.tail(1e6).unwrap(), 1e-6, max_relative = 1e-12);
    }

    #[test]
    fn tables_agree_with_direct_quadrature() {
        for n in 2..=7 {
            let p = ProfileFunction::new(n).unwrap();
            for &r in &[1.0 + 1e-8, 1.001, 1.05, 1.5, 1.99, 2.0, 2.01, 3.7, 25.0] {
                let direct = p.phi_direct(r, 1e-15).unwrap();
                assert!((p.phi(r).unwrap() - direct).abs() < 2e-14, "n = {n}, r = {r}");
            }
        }
    }

    #[test]
    fn derivative_consistency() {
        for n in 2..=5 {
            let p = ProfileFunction::new(n).unwrap();
            for &r in &[1.1, 1.7, 2.0, 3.0, 12.0] {
                let h = 1e-5 * r;
                let fd = (p.phi(r + h).unwrap() - p.phi(r - h).unwrap()) / (2.0 * h);
                assert!((fd - p.dphi(r)).abs() < 1e-8, "n = {n}, r = {r}");
                let fd2 = (p.dphi(r + h) - p.dphi(r - h)) / (2.0 * h);
                assert_relative_eq!(fd2, p.d2phi(r), max_relative = 1e-7);
                let fd3 = (p.d2phi(r + h) - p.d2phi(r - h)) / (2.0 * h);
                assert_relative_eq!(fd3, p.d3phi(r), max_relative = 1e-7);
                let exact = 1.0 / (r.powi(2 * (n as i32 - 1)) - 1.0).sqrt();
                assert_relative_eq!(p.dphi(r), exact, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn rejects_small_dimension_and_radius() {
        assert!(matches!(ProfileFunction::new(1), Err(Error::Dimension(1))));
        let p = ProfileFunction::new(3).unwrap();
        assert!(p.phi(0.5).is_err());
    }
}
