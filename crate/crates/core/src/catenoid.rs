//! The free boundary catenoidal family `C_alpha`, its embedding and the
//! volume and curvature quantities built on it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::Integrator;
use crate::numerics::roots::{brent, Bracket};
use crate::numerics::unit_sphere_volume;
use crate::profile::ProfileFunction;

/// Quadrature tolerance for the volume integrals below.
const VOLUME_TOL: f64 = 1e-12;

/// Rotationally symmetric hypersurface described by its meridian
/// `r -> (horizontal radius, height)` for `r >= start()`.
pub trait Meridian {
    fn dimension(&self) -> usize;
    /// Parameter value on the boundary.
    fn start(&self) -> f64;
    /// `(rho, z)` at parameter `r`.
    fn point(&self, r: f64) -> [f64; 2];
    /// `d/dr (rho, z)`.
    fn velocity(&self, r: f64) -> [f64; 2];
    /// Coordinate `s` with `r = chart(s)` in which the meridian is smooth on
    /// unit scales; finite differences are taken in `s`.
    fn chart(&self, s: f64) -> f64 {
        s
    }
    fn chart_inverse(&self, r: f64) -> f64 {
        r
    }
    /// Smallest admissible chart coordinate.
    fn chart_floor(&self) -> f64 {
        f64::NEG_INFINITY
    }
}

/// One member `C_alpha` of the catenoidal family in R^{n+1}.
#[derive(Debug, Clone)]
pub struct CatenoidFamily {
    n: usize,
    alpha: f64,
    r_alpha: f64,
    lambda: f64,
    mu: f64,
    d_lambda: f64,
    d_mu: f64,
    profile: Arc<ProfileFunction>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyRecord {
    pub n: usize,
    pub alpha: f64,
    pub r_alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    pub d_lambda: f64,
    pub d_mu: f64,
    pub phi_at_r_alpha: f64,
    pub phi_infinity: Option<f64>,
    pub boundary_volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub r: f64,
    pub p: Vec<f64>,
    pub position: Vec<f64>,
    pub unit_normal: Vec<f64>,
}

/// `alpha_n = arctan(1 / sqrt(n - 1))`, where `d lambda / d alpha` vanishes.
pub fn alpha_n(n: usize) -> f64 {
    (1.0 / ((n - 1) as f64).sqrt()).atan()
}

/// `d lambda_alpha / d alpha` in closed form.
pub fn d_lambda(n: usize, alpha: f64) -> f64 {
    let m = (n - 1) as f64;
    let (s, c) = alpha.sin_cos();
    s.powf(-(n as f64 - 2.0) / m) * (c * c / m - s * s)
}

pub fn lambda(n: usize, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    s.powf(1.0 / (n - 1) as f64) * c
}

pub fn r_alpha(n: usize, alpha: f64) -> f64 {
    alpha.sin().powf(-1.0 / (n - 1) as f64)
}

impl CatenoidFamily {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        Self::with_profile(ProfileFunction::shared(n)?, alpha)
    }

    pub fn with_profile(profile: Arc<ProfileFunction>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < FRAC_PI_2) {
            return Err(Error::domain(format!("alpha must lie in (0, pi/2), got {alpha}")));
        }
        let n = profile.dimension();
        let r_alpha = r_alpha(n, alpha);
        let lambda = lambda(n, alpha);
        let phi_r = profile.phi(r_alpha)?;
        let mu = alpha.sin() - lambda * phi_r;
        let d_lambda = d_lambda(n, alpha);
        let d_mu = n as f64 / (n - 1) as f64 * alpha.cos() - d_lambda * phi_r;
        Ok(Self {
            n,
            alpha,
            r_alpha,
            lambda,
            mu,
            d_lambda,
            d_mu,
            profile,
        })
    }

    /// Copy with the vertical offset shifted by `delta`. The result no
    /// longer meets the unit sphere; it exists for negative controls.
    pub fn with_height_offset(&self, delta: f64) -> Self {
        Self {
            mu: self.mu + delta,
            ..self.clone()
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn r_alpha(&self) -> f64 {
        self.r_alpha
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn d_lambda(&self) -> f64 {
        self.d_lambda
    }
    pub fn d_mu(&self) -> f64 {
        self.d_mu
    }
    pub fn profile(&self) -> &ProfileFunction {
        &self.profile
    }
    pub fn shared_profile(&self) -> Arc<ProfileFunction> {
        Arc::clone(&self.profile)
    }

    /// `phi` at a parameter already known to be >= 1.
    pub(crate) fn phi(&self, r: f64) -> f64 {
        self.profile.phi(r).expect("radius checked by caller")
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        // Allow rounding slack at the boundary circle.
        if r.is_finite() && r >= self.r_alpha * (1.0 - 4.0 * f64::EPSILON) {
            Ok(())
        } else {
            Err(Error::domain(format!("r = {r} lies below R_alpha = {}", self.r_alpha)))
        }
    }

    pub fn height(&self, r: f64) -> f64 {
        self.lambda * self.phi(r.max(self.r_alpha)) + self.mu
    }

    pub fn embed(&self, r: f64, p: &[f64]) -> Result<SurfacePoint> {
        self.check_radius(r)?;
        if p.len() != self.n {
            return Err(Error::domain(format!("direction must lie in R^{}, got length {}", self.n, p.len())));
        }
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("direction is not a unit vector (|p| = {norm})")));
        }
        let r = r.max(self.r_alpha);
        let mut position: Vec<f64> = p.iter().map(|x| self.lambda * r * x).collect();
        position.push(self.height(r));
        let slope = self.profile.dphi(r);
        let w = self.profile.metric_factor(r).sqrt();
        let mut unit_normal: Vec<f64> = p.iter().map(|x| -slope * x / w).collect();
        unit_normal.push(1.0 / w);
        Ok(SurfacePoint {
            r,
            p: p.to_vec(),
            position,
            unit_normal,
        })
    }

    /// `|B|^2 = n (n - 1) / (lambda^2 r^{2n})`.
    pub fn second_fundamental_norm(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let n = self.n as f64;
        Ok(n * (n - 1.0) * (-2.0 * n * r.ln()).exp() / (self.lambda * self.lambda))
    }

    /// Principal curvatures (meridian, parallel) with respect to the upward normal.
    pub fn principal_curvatures(&self, r: f64) -> Result<(f64, f64)> {
        self.check_radius(r)?;
        let w = self.profile.metric_factor(r).sqrt();
        let k1 = self.profile.d2phi(r) / (self.lambda * w.powi(3));
        let k2 = self.profile.dphi(r) / (self.lambda * r * w);
        Ok((k1, k2))
    }

    /// `|S^{n-1}| (cos alpha)^{n-1}`, the volume of the boundary sphere.
    pub fn boundary_volume(&self) -> f64 {
        unit_sphere_volume(self.n - 1) * (self.lambda * self.r_alpha).powi(self.n as i32 - 1)
    }

    /// `|F_alpha(r, p)|`, independent of p.
    pub fn distance_to_origin(&self, r: f64) -> f64 {
        (self.lambda * r).hypot(self.height(r))
    }

    /// Parameter r at which the surface leaves the ball of radius `radius`.
    pub fn radial_cutoff(&self, radius: f64) -> Result<f64> {
        meridian_cutoff(self, radius)
    }

    /// n-volume of the part of `C_alpha` inside the centred ball of radius `radius`.
    pub fn area_in_ball(&self, radius: f64) -> Result<f64> {
        area_in_ball(self, radius)
    }

    pub fn record(&self) -> FamilyRecord {
        FamilyRecord {
            n: self.n,
            alpha: self.alpha,
            r_alpha: self.r_alpha,
            lambda: self.lambda,
            mu: self.mu,
            d_lambda: self.d_lambda,
            d_mu: self.d_mu,
            phi_at_r_alpha: self.phi(self.r_alpha),
            phi_infinity: self.profile.phi_infinity(),
            boundary_volume: self.boundary_volume(),
        }
    }

    /// Total curvature for n = 2.
    pub fn total_curvature(&self) -> Result<f64> {
        if self.n != 2 {
            return Err(Error::UnsupportedDimension {
                required: "n = 2".into(),
                actual: self.n,
            });
        }
        total_curvature(self.alpha)
    }
}

impl Meridian for CatenoidFamily {
    fn dimension(&self) -> usize {
        self.n
    }
    fn start(&self) -> f64 {
        self.r_alpha
    }
    fn point(&self, r: f64) -> [f64; 2] {
        [self.lambda * r, self.lambda * self.phi(r) + self.mu]
    }
    fn velocity(&self, r: f64) -> [f64; 2] {
        [self.lambda, self.lambda * self.profile.dphi(r)]
    }
    /// The profile is analytic in `s = sqrt(r - 1)`.
    fn chart(&self, s: f64) -> f64 {
        1.0 + s * s
    }
    fn chart_inverse(&self, r: f64) -> f64 {
        (r - 1.0).sqrt()
    }
    fn chart_floor(&self) -> f64 {
        0.0
    }
}

/// The flat member `C_0 = {z = 0} \ B`, parametrized by horizontal radius.
#[derive(Debug, Clone, Copy)]
pub struct FlatSolution {
    pub n: usize,
}

impl FlatSolution {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        Ok(Self { n })
    }
}

impl Meridian for FlatSolution {
    fn dimension(&self) -> usize {
        self.n
    }
    fn start(&self) -> f64 {
        1.0
    }
    fn point(&self, r: f64) -> [f64; 2] {
        [r, 0.0]
    }
    fn velocity(&self, _r: f64) -> [f64; 2] {
        [1.0, 0.0]
    }
}

/// `|F(r)|` along a meridian.
fn meridian_distance<M: Meridian + ?Sized>(surface: &M, r: f64) -> f64 {
    let [rho, z] = surface.point(r);
    rho.hypot(z)
}

/// Largest parameter with `|F(r)| <= radius`, assuming |F| increases along
/// the meridian.
pub fn meridian_cutoff<M: Meridian + ?Sized>(surface: &M, radius: f64) -> Result<f64> {
    let lo = surface.start();
    let target = |r: f64| meridian_distance(surface, r) - radius;
    if target(lo) >= 0.0 {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo.max(1.0);
    while target(hi) < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonConvergence(format!("meridian never leaves ball of radius {radius}")));
        }
    }
    Ok(brent(target, Bracket::new(lo, hi)?, 1e-15 * hi)?.x)
}

/// n-volume inside the centred ball of radius `radius`:
/// `|S^{n-1}| int rho^{n-1} |gamma'| dr` up to the radial cutoff.
pub fn area_in_ball<M: Meridian + ?Sized>(surface: &M, radius: f64) -> Result<f64> {
    if !(radius >= 1.0) {
        return Err(Error::domain(format!("ball radius must be >= 1, got {radius}")));
    }
    let n = surface.dimension();
    let lo = surface.start();
    let hi = meridian_cutoff(surface, radius)?;
    if hi <= lo {
        return Ok(0.0);
    }
    let integrand = |r: f64| {
        let [rho, _] = surface.point(r);
        let [dr, dz] = surface.velocity(r);
        rho.powi(n as i32 - 1) * dr.hypot(dz)
    };
    let q = Integrator::new(VOLUME_TOL).integrate(integrand, lo, hi, None)?;
    Ok(unit_sphere_volume(n - 1) * q.value)
}

/// `|S^{n-1}| rho_0^{n-1}` for the boundary parallel.
pub fn boundary_volume<M: Meridian + ?Sized>(surface: &M) -> f64 {
    let n = surface.dimension();
    let [rho, _] = surface.point(surface.start());
    unit_sphere_volume(n - 1) * rho.powi(n as i32 - 1)
}

/// Total curvature of `C_alpha` for n = 2, as the quadrature
/// `4 pi int_{R_alpha}^inf dr / (r^2 sqrt(r^2 - 1))`.
pub fn total_curvature(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::domain(format!("alpha must lie in (0, pi/2), got {alpha}")));
    }
    let start = r_alpha(2, alpha);
    let q = Integrator::new(1e-14).integrate(
        |r| 1.0 / (r * r * ((r - 1.0) * (r + 1.0)).sqrt()),
        start,
        f64::INFINITY,
        None,
    )?;
    Ok(4.0 * PI * q.value)
}

pub fn make_catenoid(n: usize, alpha: f64) -> Result<CatenoidFamily> {
    CatenoidFamily::new(n, alpha)
}
