//! Zero counting for second-order linear ODEs written as 2x2 first-order
//! systems `y' = A(t, E) y`.
//!
//! By Sturm oscillation, for a left boundary condition fixed at `t0` and a
//! Dirichlet condition at `T`, the number of eigenvalues below `E` equals
//! the number of zeros in `(t0, T)` of the first component of the solution
//! launched from the left condition at energy `E`. This needs `A[0][1] > 0`,
//! so that zeros of the first component are crossed in one direction only.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ode::{solve, DenseSolution, OdeOptions};
use crate::numerics::roots::{brent, Bracket};

/// Length of the integration chunks; the state is rescaled to unit length
/// after each one.
const CHUNK: f64 = 2.0;

pub trait Oscillator {
    fn matrix(&self, t: f64, energy: f64) -> [[f64; 2]; 2];
}

impl<O: Oscillator + ?Sized> Oscillator for &O {
    fn matrix(&self, t: f64, energy: f64) -> [[f64; 2]; 2] {
        (**self).matrix(t, energy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShootingMethod {
    /// Direct integration of the linear system with periodic rescaling.
    Linear,
    /// Prüfer angle and log-amplitude, used when the linear shot fails.
    Pruefer,
}

#[derive(Debug, Clone, Serialize)]
pub struct Shot {
    pub method: ShootingMethod,
    pub t_start: f64,
    pub t_end: f64,
    /// Locations of the zeros of the first component in `(t_start, t_end]`.
    pub zeros: Vec<f64>,
    /// End state scaled to unit length.
    pub end_direction: [f64; 2],
    /// `ln |y(t_end)|` relative to the launch normalization.
    pub log_amplitude: f64,
}

impl Shot {
    /// Number of zeros strictly before `t`.
    pub fn zeros_before(&self, t: f64) -> usize {
        self.zeros.partition_point(|&z| z < t)
    }
}

fn normalize_launch(y0: [f64; 2]) -> Result<([f64; 2], f64)> {
    let norm = y0[0].hypot(y0[1]);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::domain("launch state must be finite and non-zero"));
    }
    Ok(([y0[0] / norm, y0[1] / norm], norm.ln()))
}

/// Shoot with the linear system, falling back to the Prüfer form if the
/// linear integration breaks down.
pub fn shoot<O: Oscillator>(osc: &O, t0: f64, y0: [f64; 2], t1: f64, energy: f64, tol: f64) -> Result<Shot> {
    match shoot_linear(osc, t0, y0, t1, energy, tol) {
        Ok(shot) => Ok(shot),
        Err(Error::Stiffness { .. }) | Err(Error::NonConvergence(_)) => shoot_pruefer(osc, t0, y0, t1, energy, tol),
        Err(e) => Err(e),
    }
}

pub fn shoot_linear<O: Oscillator>(osc: &O, t0: f64, y0: [f64; 2], t1: f64, energy: f64, tol: f64) -> Result<Shot> {
    if !(t1 > t0) {
        return Err(Error::domain(format!("shooting interval [{t0}, {t1}] is empty")));
    }
    let (mut y, mut log_amp) = normalize_launch(y0)?;
    let opts = OdeOptions::with_tol(tol);
    let chunks = ((t1 - t0) / CHUNK).ceil().max(1.0) as usize;
    let width = (t1 - t0) / chunks as f64;
    let mut zeros = Vec::new();
    let mut last_sign = if y[0] != 0.0 { y[0].signum() } else { 0.0 };
    let mut last_nonzero_t = t0;

    for k in 0..chunks {
        let a = t0 + width * k as f64;
        let b = if k + 1 == chunks { t1 } else { a + width };
        let sol = solve(
            |t, s, ds| {
                let m = osc.matrix(t, energy);
                ds[0] = m[0][0] * s[0] + m[0][1] * s[1];
                ds[1] = m[1][0] * s[0] + m[1][1] * s[1];
            },
            a,
            &y[..],
            b,
            &opts,
        )?;
        for (t, state) in sol.nodes().into_iter().skip(1) {
            let sign = if state[0] != 0.0 { state[0].signum() } else { 0.0 };
            if sign != 0.0 {
                if last_sign != 0.0 && sign != last_sign {
                    zeros.push(refine_linear_zero(&sol, last_nonzero_t, t)?);
                }
                last_sign = sign;
                last_nonzero_t = t;
            }
        }
        let end = sol.final_state();
        if end.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence("linear shot overflowed".into()));
        }
        let norm = end[0].hypot(end[1]);
        y = [end[0] / norm, end[1] / norm];
        log_amp += norm.ln();
    }
    Ok(Shot {
        method: ShootingMethod::Linear,
        t_start: t0,
        t_end: t1,
        zeros,
        end_direction: [y[0], y[1]],
        log_amplitude: log_amp,
    })
}

fn refine_linear_zero(sol: &DenseSolution, lo: f64, hi: f64) -> Result<f64> {
    // `lo` can belong to an earlier chunk; clamp into this chunk's range.
    let lo = lo.max(sol.t_start());
    let f = |t: f64| sol.eval(t)[0];
    if f(lo) * f(hi) > 0.0 {
        return Ok(lo);
    }
    match brent(f, Bracket::new(lo, hi)?, 1e-13 * hi.abs().max(1.0)) {
        Ok(root) => Ok(root.x),
        Err(Error::Bracket { .. }) => Ok(0.5 * (lo + hi)),
        Err(e) => Err(e),
    }
}

pub fn shoot_pruefer<O: Oscillator>(osc: &O, t0: f64, y0: [f64; 2], t1: f64, energy: f64, tol: f64) -> Result<Shot> {
    if !(t1 > t0) {
        return Err(Error::domain(format!("shooting interval [{t0}, {t1}] is empty")));
    }
    let (mut y, log0) = normalize_launch(y0)?;
    if y[0] < 0.0 || (y[0] == 0.0 && y[1] < 0.0) {
        y = [-y[0], -y[1]];
    }
    let theta0 = y[0].atan2(y[1]);
    let sol = solve(
        |t, s, ds| {
            let m = osc.matrix(t, energy);
            let (sn, cs) = s[0].sin_cos();
            ds[0] = m[0][1] * cs * cs + (m[0][0] - m[1][1]) * sn * cs - m[1][0] * sn * sn;
            ds[1] = m[0][0] * sn * sn + (m[0][1] + m[1][0]) * sn * cs + m[1][1] * cs * cs;
        },
        t0,
        &[theta0, 0.0],
        t1,
        &OdeOptions::with_tol(tol),
    )?;
    let end = sol.final_state();
    let crossings = ((end[0] / PI).ceil() as i64 - 1).max(0) as usize;
    let mut zeros = Vec::with_capacity(crossings);
    let nodes = sol.nodes();
    for k in 1..=crossings {
        let target = k as f64 * PI;
        let idx = nodes.partition_point(|(_, s)| s[0] < target);
        let (lo, hi) = (nodes[idx.saturating_sub(1)].0, nodes[idx.min(nodes.len() - 1)].0);
        let root = if hi > lo {
            brent(|t| sol.eval(t)[0] - target, Bracket::new(lo, hi)?, 1e-13 * hi.abs().max(1.0))
                .map(|r| r.x)
                .unwrap_or(0.5 * (lo + hi))
        } else {
            lo
        };
        zeros.push(root);
    }
    let (sn, cs) = end[0].sin_cos();
    Ok(Shot {
        method: ShootingMethod::Pruefer,
        t_start: t0,
        t_end: t1,
        zeros,
        end_direction: [sn, cs],
        log_amplitude: log0 + end[1],
    })
}

/// Left boundary data for [`SturmLiouville`] in the form
/// `cos(theta) u - sin(theta) p u' = 0`.
#[derive(Debug, Clone, Copy)]
pub enum LeftBoundary {
    Dirichlet,
    /// `p u' = slope * u`.
    Robin { slope: f64 },
}

/// `-(p u')' + q u = E w u` on `[a, b]` with Dirichlet data at `b`.
pub struct SturmLiouville<P, Q, W> {
    pub p: P,
    pub q: Q,
    pub w: W,
    pub a: f64,
    pub b: f64,
    pub left: LeftBoundary,
}

impl<P, Q, W> Oscillator for SturmLiouville<P, Q, W>
where
    P: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    fn matrix(&self, x: f64, energy: f64) -> [[f64; 2]; 2] {
        // state (u, p u')
        [[0.0, 1.0 / (self.p)(x)], [(self.q)(x) - energy * (self.w)(x), 0.0]]
    }
}

impl<P, Q, W> SturmLiouville<P, Q, W>
where
    P: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    fn launch(&self) -> [f64; 2] {
        match self.left {
            LeftBoundary::Dirichlet => [0.0, 1.0],
            LeftBoundary::Robin { slope } => [1.0, slope],
        }
    }

    /// Number of eigenvalues strictly below `energy`.
    pub fn count_below(&self, energy: f64, tol: f64) -> Result<usize> {
        let shot = shoot(self, self.a, self.launch(), self.b, energy, tol)?;
        Ok(shot.zeros_before(self.b))
    }
}
