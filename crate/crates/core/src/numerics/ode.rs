//! Explicit Dormand–Prince 5(4) integration with continuous (dense) output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Hairer's dense-output coefficients for DOPRI5.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on |h|; `None` means the full interval.
    pub max_step: Option<f64>,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 500_000,
            max_step: None,
        }
    }
}

#[derive(Debug, Clone)]
struct Step {
    t: f64,
    h: f64,
    // Five interpolation vectors of length `dim`, stored back to back.
    rcont: Vec<f64>,
}

/// Accepted steps of an integration together with their interpolants.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    dim: usize,
    t0: f64,
    y0: Vec<f64>,
    steps: Vec<Step>,
}

impl DenseSolution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(self.t0, |s| s.t + s.h)
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn final_state(&self) -> Vec<f64> {
        match self.steps.last() {
            Some(step) => self.step_end(step),
            None => self.y0.clone(),
        }
    }

    fn step_end(&self, step: &Step) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|i| step.rcont[i] + step.rcont[d + i]).collect()
    }

    /// Grid of accepted step boundaries `(t, y(t))`, starting at `t0`.
    pub fn nodes(&self) -> Vec<(f64, Vec<f64>)> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push((self.t0, self.y0.clone()));
        for step in &self.steps {
            out.push((step.t + step.h, self.step_end(step)));
        }
        out
    }

    /// Interpolated state at `t` (clamped to the integrated range).
    pub fn eval(&self, t: f64) -> Vec<f64> {
        if self.steps.is_empty() {
            return self.y0.clone();
        }
        let forward = self.steps[0].h > 0.0;
        // Steps are ordered along the direction of integration.
        let idx = self
            .steps
            .partition_point(|s| if forward { s.t + s.h < t } else { s.t + s.h > t })
            .min(self.steps.len() - 1);
        let step = &self.steps[idx];
        let theta = ((t - step.t) / step.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let d = self.dim;
        let r = &step.rcont;
        (0..d)
            .map(|i| {
                r[i] + theta * (r[d + i] + theta1 * (r[2 * d + i] + theta * (r[3 * d + i] + theta1 * r[4 * d + i])))
            })
            .collect()
    }
}

fn error_norm(err: &[f64], y: &[f64], y_new: &[f64], opts: &OdeOptions) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sc = opts.atol + opts.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrate `y' = rhs(t, y)` from `t0` to `t1` with tolerance `tol`
/// (used as both absolute and relative tolerance).
pub fn integrate_ode<F>(rhs: F, t0: f64, y0: &[f64], t1: f64, tol: f64) -> Result<DenseSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    solve(rhs, t0, y0, t1, &OdeOptions::with_tol(tol))
}

pub fn solve<F>(mut rhs: F, t0: f64, y0: &[f64], t1: f64, opts: &OdeOptions) -> Result<DenseSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    if dim == 0 {
        return Err(Error::domain("empty initial state"));
    }
    if !t0.is_finite() || !t1.is_finite() {
        return Err(Error::domain(format!("non-finite integration range [{t0}, {t1}]")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite initial state"));
    }
    let mut solution = DenseSolution {
        dim,
        t0,
        y0: y0.to_vec(),
        steps: Vec::new(),
    };
    if t1 == t0 {
        return Ok(solution);
    }
    let direction = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let max_step = opts.max_step.unwrap_or(span).min(span);

    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut err = vec![0.0; dim];

    rhs(t0, &y, &mut k1);

    // Initial step guess from the scaled size of y and y'.
    let d0 = error_norm(&y, &vec![0.0; dim], &y, opts);
    let d1 = error_norm(&k1, &vec![0.0; dim], &y, opts);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(max_step).max(1e-12 * span);

    let mut t = t0;
    let mut n_steps = 0usize;
    let mut last_reject = false;
    loop {
        if n_steps >= opts.max_steps {
            return Err(Error::NonConvergence(format!(
                "ODE integration exceeded {} steps at t = {t}",
                opts.max_steps
            )));
        }
        let remaining = (t1 - t).abs();
        if remaining <= 1e-14 * span.max(t.abs()) {
            break;
        }
        let min_step = 16.0 * f64::EPSILON * t.abs().max(span * 1e-3);
        if h < min_step {
            return Err(Error::Stiffness { t, step: h });
        }
        let h_try = h.min(remaining) * direction;
        let last = h.min(remaining) == remaining;

        for i in 0..dim {
            tmp[i] = y[i] + h_try * A21 * k1[i];
        }
        rhs(t + C2 * h_try, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + h_try * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h_try, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + h_try * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h_try, &tmp, &mut k4);
        for i in 0..dim {
            tmp[i] = y[i] + h_try * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h_try, &tmp, &mut k5);
        for i in 0..dim {
            tmp[i] = y[i] + h_try * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t1 } else { t + h_try };
        rhs(t_new, &tmp, &mut k6);
        for i in 0..dim {
            y_new[i] = y[i] + h_try * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t_new, &y_new, &mut k7);
        for i in 0..dim {
            err[i] = h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&err, &y, &y_new, opts);
        n_steps += 1;

        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.1;
            last_reject = true;
            continue;
        }

        if en <= 1.0 {
            let mut rcont = vec![0.0; 5 * dim];
            for i in 0..dim {
                let ydiff = y_new[i] - y[i];
                let bspl = h_try * k1[i] - ydiff;
                rcont[i] = y[i];
                rcont[dim + i] = ydiff;
                rcont[2 * dim + i] = bspl;
                rcont[3 * dim + i] = ydiff - h_try * k7[i] - bspl;
                rcont[4 * dim + i] = h_try
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            solution.steps.push(Step { t, h: t_new - t, rcont });
            t = t_new;
            y.copy_from_slice(&y_new);
            k1.copy_from_slice(&k7);
            let mut factor = (0.9 * en.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
            if last_reject {
                factor = factor.min(1.0);
            }
            last_reject = false;
            h = (h * factor).min(max_step);
            if last {
                break;
            }
        } else {
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            last_reject = true;
        }
    }
    Ok(solution)
}
