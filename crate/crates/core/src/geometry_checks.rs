//! Numerical checks of the geometric identities satisfied by `C_alpha`:
//! the monotonicity formula, orthogonality at the unit sphere and
//! vanishing mean curvature, plus a combined verification suite.

use serde::Serialize;

use crate::catenoid::{boundary_volume, meridian_cutoff, CatenoidFamily, Meridian};
use crate::error::{Error, Result};
use crate::jacobi::{alpha_jacobi_field, rotation_field};
use crate::numerics::quadrature::Integrator;
use crate::numerics::unit_sphere_volume;
use crate::spectrum::radial_operator;

const MOMENT_TOL: f64 = 1e-12;
/// Finite-difference step relative to the chart coordinate.
const FD_FRACTION: f64 = 1e-3;

/// Both sides of
/// `|Σ ∩ B_R| / R^n - (1 - R^{-n}) |∂Σ| / n = ∫_{Σ ∩ B_R} |X^⊥|^2 / |X|^{n+2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub radius: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn monotonicity_report<M: Meridian + ?Sized>(surface: &M, radius: f64) -> Result<MonotonicityReport> {
    if !(radius >= 1.0) {
        return Err(Error::domain(format!("ball radius must be >= 1, got {radius}")));
    }
    let n = surface.dimension();
    let rn = radius.powi(n as i32);
    let area = crate::catenoid::area_in_ball(surface, radius)?;
    let lhs = area / rn - (1.0 - 1.0 / rn) * boundary_volume(surface) / n as f64;

    let lo = surface.start();
    let hi = meridian_cutoff(surface, radius)?;
    let rhs = if hi > lo {
        let moment = |r: f64| {
            let [rho, z] = surface.point(r);
            let [dr, dz] = surface.velocity(r);
            let speed = dr.hypot(dz);
            // (X, N) with N = (-z', rho') / |gamma'| in the meridian plane.
            let perp = (z * dr - rho * dz) / speed;
            let dist2 = rho * rho + z * z;
            rho.powi(n as i32 - 1) * speed * perp * perp / dist2.powf(0.5 * (n as f64 + 2.0))
        };
        unit_sphere_volume(n - 1) * Integrator::new(MOMENT_TOL).integrate(moment, lo, hi, None)?.value
    } else {
        0.0
    };
    Ok(MonotonicityReport {
        radius,
        lhs,
        rhs,
        residual: lhs - rhs,
    })
}

/// Directions on `S^{n-1}` used to sample the boundary: coordinate axes,
/// their negatives and the normalized diagonal.
fn boundary_directions(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut p = vec![0.0; n];
            p[i] = sign;
            out.push(p);
        }
    }
    out.push(vec![1.0 / (n as f64).sqrt(); n]);
    out
}

/// Largest of `||F| - 1| + |T - F|` over boundary samples, where `T` is the
/// unit tangent of the meridian pointing away from the ball.
pub fn free_boundary_residual<M: Meridian + ?Sized>(surface: &M) -> f64 {
    let r0 = surface.start();
    let [rho, z] = surface.point(r0);
    let [dr, dz] = surface.velocity(r0);
    let speed = dr.hypot(dz);
    boundary_directions(surface.dimension())
        .iter()
        .map(|p| {
            let mut position: Vec<f64> = p.iter().map(|x| rho * x).collect();
            position.push(z);
            let mut tangent: Vec<f64> = p.iter().map(|x| dr / speed * x).collect();
            tangent.push(dz / speed);
            let norm = position.iter().map(|x| x * x).sum::<f64>().sqrt();
            let gap = tangent
                .iter()
                .zip(&position)
                .map(|(t, x)| (t - x) * (t - x))
                .sum::<f64>()
                .sqrt();
            (norm - 1.0).abs() + gap
        })
        .fold(0.0, f64::max)
}

/// First and second derivatives of the meridian with respect to the chart
/// coordinate, by fourth-order central differences.
fn meridian_derivatives<M: Meridian + ?Sized>(surface: &M, r: f64) -> ([f64; 2], [f64; 2]) {
    let s = surface.chart_inverse(r);
    let h = (FD_FRACTION * s.abs().max(1.0)).min(0.4 * (s - surface.chart_floor()));
    let f = |k: f64| surface.point(surface.chart(s + k * h));
    let (m2, m1, c, p1, p2) = (f(-2.0), f(-1.0), f(0.0), f(1.0), f(2.0));
    let mut d1 = [0.0; 2];
    let mut d2 = [0.0; 2];
    for i in 0..2 {
        d1[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
        d2[i] = (-m2[i] + 16.0 * m1[i] - 30.0 * c[i] + 16.0 * p1[i] - p2[i]) / (12.0 * h * h);
    }
    (d1, d2)
}

/// Mean curvature `κ1 + (n-1) κ2` from finite differences of the meridian;
/// both curvatures are invariant under reparametrization.
pub fn mean_curvature_fd<M: Meridian + ?Sized>(surface: &M, r: f64) -> f64 {
    let [rho, _] = surface.point(r);
    let ([dr, dz], [ddr, ddz]) = meridian_derivatives(surface, r);
    let speed = dr.hypot(dz);
    let k1 = (dr * ddz - dz * ddr) / speed.powi(3);
    let k2 = dz / (rho * speed);
    k1 + (surface.dimension() - 1) as f64 * k2
}

pub fn minimality_residual<M: Meridian + ?Sized>(surface: &M, r_grid: &[f64]) -> Result<f64> {
    let start = surface.start();
    if let Some(bad) = r_grid.iter().find(|&&r| !(r >= start) || !r.is_finite()) {
        return Err(Error::domain(format!("grid point {bad} lies below the boundary parameter {start}")));
    }
    Ok(r_grid.iter().map(|&r| mean_curvature_fd(surface, r).abs()).fold(0.0, f64::max))
}

/// Round sphere of radius one as a meridian `s -> (sin s, cos s)`; with
/// respect to its outer normal its mean curvature is `-n`.
#[derive(Debug, Clone, Copy)]
pub struct RoundSphere {
    pub n: usize,
}

impl Meridian for RoundSphere {
    fn dimension(&self) -> usize {
        self.n
    }
    fn start(&self) -> f64 {
        0.5
    }
    fn point(&self, s: f64) -> [f64; 2] {
        [s.sin(), s.cos()]
    }
    fn velocity(&self, s: f64) -> [f64; 2] {
        [s.cos(), -s.sin()]
    }
}

/// `count` points from `lo` to `hi`, evenly spaced.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            passed: value.abs() < tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub alpha: f64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub monotonicity: Vec<MonotonicityReport>,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub monotonicity_radii: Vec<f64>,
    pub monotonicity_tol: f64,
    pub free_boundary_tol: f64,
    /// Multiplied by `max(1, |B|(R_alpha))`.
    pub minimality_tol: f64,
    pub robin_tol: f64,
    pub jacobi_tol: f64,
    /// Grid spans `[R_alpha, grid_extent R_alpha]`.
    pub grid_extent: f64,
    pub grid_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            monotonicity_radii: vec![2.0, 5.0, 10.0],
            monotonicity_tol: 1e-6,
            free_boundary_tol: 1e-10,
            minimality_tol: 1e-7,
            robin_tol: 1e-8,
            jacobi_tol: 1e-7,
            grid_extent: 10.0,
            grid_points: 201,
        }
    }
}

/// Largest normalized residual of the explicit Jacobi fields: `u` in mode 0
/// and the rotation field in mode 1.
pub fn jacobi_residual(cat: &CatenoidFamily, grid: &[f64]) -> f64 {
    let u = alpha_jacobi_field(cat);
    let k = rotation_field(cat);
    let (op0, op1) = (radial_operator(cat, 0), radial_operator(cat, 1));
    grid.iter()
        .map(|&r| op0.apply(r, u.jet(r)).normalized().max(op1.apply(r, k.jet(r)).normalized()))
        .fold(0.0, f64::max)
}

/// `|u'(R) - u(R)/R|` for both explicit fields at the boundary parameter.
pub fn robin_residual(cat: &CatenoidFamily) -> f64 {
    let r0 = cat.r_alpha();
    let (u, u1, _) = alpha_jacobi_field(cat).jet(r0);
    let (k, k1, _) = rotation_field(cat).jet(r0);
    (u1 - u / r0).abs().max((k1 - k / r0).abs())
}

pub fn verify(cat: &CatenoidFamily, options: &VerifyOptions) -> Result<VerificationReport> {
    let grid = linear_grid(cat.r_alpha(), options.grid_extent * cat.r_alpha(), options.grid_points);
    let monotonicity = options
        .monotonicity_radii
        .iter()
        .map(|&r| monotonicity_report(cat, r))
        .collect::<Result<Vec<_>>>()?;
    // Finite differences resolve the mean curvature relative to |B|.
    let curvature_scale = cat.second_fundamental_norm(cat.r_alpha())?.sqrt().max(1.0);
    let worst_identity = monotonicity.iter().map(|m| m.residual.abs()).fold(0.0, f64::max);
    let decrease = monotonicity
        .windows(2)
        .map(|w| (w[0].lhs - w[1].lhs).max(0.0))
        .fold(0.0, f64::max);
    let checks = vec![
        CheckResult::below("monotonicity_identity", worst_identity, options.monotonicity_tol),
        CheckResult::below("monotonicity_decrease", decrease, options.monotonicity_tol),
        CheckResult::below("free_boundary", free_boundary_residual(cat), options.free_boundary_tol),
        CheckResult::below(
            "minimality",
            minimality_residual(cat, &grid)?,
            options.minimality_tol * curvature_scale,
        ),
        CheckResult::below("robin", robin_residual(cat), options.robin_tol),
        CheckResult::below("jacobi", jacobi_residual(cat, &grid), options.jacobi_tol),
    ];
    Ok(VerificationReport {
        n: cat.n(),
        alpha: cat.alpha(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        monotonicity,
    })
}
