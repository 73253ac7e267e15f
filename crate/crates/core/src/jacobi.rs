//! Explicit Jacobi fields on `C_alpha`: the field `u` generated by moving
//! along the family, the field `k` generated by rotations about a
//! horizontal axis, and the limit of `u` at infinity that decides stability.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::catenoid::{alpha_n, CatenoidFamily};
use crate::error::{Error, Result};
use crate::numerics::roots::{brent, Bracket};

/// Closest approach to pi/2 used when bracketing the critical angle.
const UPPER_ANGLE_MARGIN: f64 = 1e-6;

/// `(value, first derivative, second derivative)` of a radial function.
pub type Jet = (f64, f64, f64);

/// Normal component of `d/d alpha F_alpha` (upward normal), a function of r only.
#[derive(Debug, Clone)]
pub struct RadialJacobiField {
    cat: CatenoidFamily,
}

impl RadialJacobiField {
    pub fn new(cat: &CatenoidFamily) -> Self {
        Self { cat: cat.clone() }
    }

    pub fn catenoid(&self) -> &CatenoidFamily {
        &self.cat
    }

    pub fn value(&self, r: f64) -> f64 {
        self.jet(r).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.jet(r).1
    }

    /// `u = g / W` with `g = dλ (phi - r phi') + dμ`, `W = sqrt(1 + phi'^2)`.
    pub fn jet(&self, r: f64) -> Jet {
        let c = &self.cat;
        let p = c.profile();
        let (d1, d2, d3) = (p.dphi(r), p.d2phi(r), p.d3phi(r));
        let dl = c.d_lambda();
        let g = dl * (c.phi(r) - r * d1) + c.d_mu();
        let g1 = -dl * r * d2;
        let g2 = -dl * (d2 + r * d3);
        quotient_by_w(p.metric_factor(r).sqrt(), d1, d2, d3, (g, g1, g2))
    }
}

/// `h / W` and its first two derivatives given the jet of h.
fn quotient_by_w(w: f64, d1: f64, d2: f64, d3: f64, (h, h1, h2): Jet) -> Jet {
    let w1 = d1 * d2 / w;
    let w2 = (d2 * d2 + d1 * d3) / w - d1 * d1 * d2 * d2 / w.powi(3);
    let v = h / w;
    let v1 = h1 / w - h * w1 / (w * w);
    let v2 = h2 / w - 2.0 * h1 * w1 / (w * w) - h * w2 / (w * w) + 2.0 * h * w1 * w1 / w.powi(3);
    (v, v1, v2)
}

/// Radial factor of `k = (K, N)`, with `K(x, Y, z) = (-z, 0, x)`; the full
/// field is `k_radial(r) p_x`.
#[derive(Debug, Clone)]
pub struct RotationField {
    cat: CatenoidFamily,
}

impl RotationField {
    pub fn new(cat: &CatenoidFamily) -> Self {
        Self { cat: cat.clone() }
    }

    pub fn k_radial(&self, r: f64) -> f64 {
        self.jet(r).0
    }

    pub fn jet(&self, r: f64) -> Jet {
        let c = &self.cat;
        let p = c.profile();
        let (d1, d2, d3) = (p.dphi(r), p.d2phi(r), p.d3phi(r));
        let lam = c.lambda();
        let height = lam * c.phi(r) + c.mu();
        let h = height * d1 + lam * r;
        let h1 = lam * d1 * d1 + height * d2 + lam;
        let h2 = 3.0 * lam * d1 * d2 + height * d3;
        quotient_by_w(p.metric_factor(r).sqrt(), d1, d2, d3, (h, h1, h2))
    }
}

pub fn alpha_jacobi_field(cat: &CatenoidFamily) -> RadialJacobiField {
    RadialJacobiField::new(cat)
}

pub fn rotation_field(cat: &CatenoidFamily) -> RotationField {
    RotationField::new(cat)
}

/// `G(alpha) = lim_{r->inf} u = n/(n-1) cos α + dλ (phi_inf - phi(R_alpha))` for n > 2.
pub fn limit_at_infinity(cat: &CatenoidFamily) -> Result<f64> {
    let n = cat.n();
    if n == 2 {
        return Err(Error::UnsupportedDimension {
            required: "n > 2".into(),
            actual: n,
        });
    }
    let tail = cat.profile().tail(cat.r_alpha())?;
    Ok(n as f64 / (n - 1) as f64 * cat.alpha().cos() + cat.d_lambda() * tail)
}

/// Quantity whose sign decides the behaviour of `u` at infinity:
/// `d lambda / d alpha` when n = 2 (u grows like dλ ln r), `G(alpha)` otherwise.
pub fn criticality_indicator(cat: &CatenoidFamily) -> Result<f64> {
    if cat.n() == 2 {
        Ok(cat.d_lambda())
    } else {
        limit_at_infinity(cat)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalAngle {
    pub n: usize,
    pub critical_angle: f64,
    /// Final sign-change bracket of the indicator.
    pub bracket: [f64; 2],
    /// `alpha_n = arctan(1/sqrt(n-1))`, where dλ vanishes.
    pub alpha_n: f64,
    pub indicator_at_root: f64,
}

/// The angle separating stable members (index 0) from index-one members.
pub fn critical_angle(n: usize, tol: f64) -> Result<CriticalAngle> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    let profile = crate::profile::ProfileFunction::shared(n)?;
    let indicator = |alpha: f64| {
        let cat = CatenoidFamily::with_profile(profile.clone(), alpha).expect("angle inside (0, pi/2)");
        criticality_indicator(&cat).unwrap_or(f64::NAN)
    };
    let a_n = alpha_n(n);
    let bracket = if n == 2 {
        Bracket::new(0.5 * FRAC_PI_4, 0.5 * (FRAC_PI_4 + FRAC_PI_2))?
    } else {
        Bracket::new(a_n, FRAC_PI_2 - UPPER_ANGLE_MARGIN)?
    };
    let root = brent(indicator, bracket, tol)?;
    Ok(CriticalAngle {
        n,
        critical_angle: root.x,
        bracket: [root.bracket.lo(), root.bracket.hi()],
        alpha_n: a_n,
        indicator_at_root: root.f_x,
    })
}

/// Smallest zero of `u` beyond `R_alpha`, if one exists at a representable radius.
///
/// `u` has at most one zero. It is searched on a geometric grid, refined
/// with Brent, and the search continues outward only while the behaviour at
/// infinity (sign of the criticality indicator) says a zero must exist.
pub fn first_zero(field: &RadialJacobiField) -> Result<Option<f64>> {
    let cat = field.catenoid();
    let start = cat.r_alpha();
    let eventually_negative = criticality_indicator(cat)? < 0.0;
    let mut lo = start;
    let mut ratio: f64 = 1.05;
    let near_limit = start * 1e6;
    loop {
        let hi = lo * ratio;
        if !hi.is_finite() || hi > 1e300 {
            return Ok(None);
        }
        if field.value(hi) <= 0.0 {
            let root = brent(|r| field.value(r), Bracket::new(lo, hi)?, 1e-14 * hi)?;
            return Ok(Some(root.x));
        }
        lo = hi;
        if lo > near_limit {
            if !eventually_negative {
                return Ok(None);
            }
            ratio = 2.0;
        }
    }
}
