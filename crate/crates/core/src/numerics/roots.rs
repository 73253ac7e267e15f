//! Bracketed scalar root finding (Brent's method).

use serde::Serialize;

use crate::error::{Error, Result};

/// Default bracket width at which root finding stops.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("bracket needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub x: f64,
    pub f_x: f64,
    /// Final sign-change bracket around `x`.
    pub bracket: Bracket,
    pub iterations: usize,
}

/// Find a root of `f` in `bracket` to bracket width `tol`.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<f64> {
    brent(f, bracket, tol).map(|r| r.x)
}

/// Brent's method, returning the final bracket alongside the root.
pub fn brent<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<Root> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::domain("root target returned NaN at a bracket end"));
    }
    if fa == 0.0 {
        return Ok(exact(a, bracket, 0));
    }
    if fb == 0.0 {
        return Ok(exact(b, bracket, 0));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iteration in 1..=MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let (lo, hi) = if b < c { (b, c) } else { (c, b) };
            return Ok(Root {
                x: b,
                f_x: fb,
                bracket: Bracket { lo, hi },
                iterations: iteration,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::domain(format!("root target returned NaN at x = {b}")));
        }
    }
    Err(Error::NonConvergence(format!(
        "Brent iteration did not reach width {tol:e} in {MAX_ITERATIONS} steps"
    )))
}

fn exact(x: f64, _bracket: Bracket, iterations: usize) -> Root {
    Root {
        x,
        f_x: 0.0,
        bracket: Bracket { lo: x, hi: x.next_up() },
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn square_root_of_two() {
        let x = find_root(|x| x * x - 2.0, Bracket::new(1.0, 2.0).unwrap(), 1e-14).unwrap();
        assert_abs_diff_eq!(x, std::f64::consts::SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn cosine_root() {
        let r = brent(f64::cos, Bracket::new(1.0, 2.0).unwrap(), 1e-12).unwrap();
        assert_abs_diff_eq!(r.x, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert!(r.bracket.width() <= 1e-12 + 4.0 * f64::EPSILON * 2.0);
    }

    #[test]
    fn missing_sign_change() {
        let r = find_root(|x| x * x + 1.0, Bracket::new(-1.0, 1.0).unwrap(), 1e-12);
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn bad_bracket() {
        assert!(Bracket::new(2.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn independent_of_valid_bracket(lo in 0.0f64..1.25, hi in 1.27f64..3.0) {
            let cube = |x: f64| x * x * x - 2.0;
            let x = find_root(cube, Bracket::new(lo, hi).unwrap(), 1e-12).unwrap();
            prop_assert!((x - 2f64.cbrt()).abs() <= 1e-12);
        }
    }
}
