//! Adaptive Gauss–Kronrod quadrature with endpoint-singularity and
//! infinite-interval substitutions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default absolute tolerance for definite integrals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default cap on integrand evaluations per call.
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, always non-negative.
    pub error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_nan() {
        Err(Error::domain(format!("integrand returned NaN at x = {x}")))
    } else {
        Ok(y)
    }
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = checked(f, center)?;
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let error = rescale_error((res_k - res_g) * scale, res_abs * scale, res_asc * scale);
    Ok(Segment {
        a,
        b,
        value: res_k * scale * half.signum(),
        error,
    })
}

/// Globally adaptive bisection on a finite interval with a smooth integrand.
fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, budget: usize) -> Result<QuadratureResult> {
    let first = gauss_kronrod_15(f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut total_error = first.error;
    heap.push(first);

    while total_error > tol {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Interval can no longer be split in floating point.
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            total_error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
            if heap.is_empty() {
                break;
            }
            continue;
        }
        if evaluations + 30 > budget {
            heap.push(worst);
            let value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
            return Err(Error::BudgetExceeded {
                estimate: value,
                error_estimate: total_error,
                evaluations,
            });
        }
        let left = gauss_kronrod_15(f, worst.a, mid)?;
        let right = gauss_kronrod_15(f, mid, worst.b)?;
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Refresh the running total now and then to shed accumulated rounding.
        if evaluations % 3000 == 0 {
            total_error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
        }
        let value_scale = frozen_value.abs() + heap.iter().map(|s| s.value.abs()).sum::<f64>();
        if total_error <= 64.0 * f64::EPSILON * value_scale {
            break;
        }
    }

    let value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
    let error_estimate = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
    Ok(QuadratureResult {
        value,
        error_estimate: error_estimate.max(0.0),
        evaluations,
    })
}

/// Adaptive quadrature settings. Use [`integrate`] for the common case.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tol: f64,
    pub budget: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl Integrator {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Integrate `f` over `[a, b]`; `b` may be `f64::INFINITY`.
    ///
    /// `singularity_order_at_a`, when given as `Some(k)` with `0 < k < 1`,
    /// declares that `f(t) (t - a)^k` stays bounded near `a`. The
    /// substitution `t = a + s^q` with `q = 1 / (1 - k)` then turns the
    /// integrand into a bounded one (for `k = 1/2`: `t = a + s^2`).
    /// Infinite upper limits are mapped onto a finite range with `t = 1/u`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64, singularity_order_at_a: Option<f64>) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> f64,
    {
        if a.is_nan() || b.is_nan() || !a.is_finite() {
            return Err(Error::domain(format!("invalid integration limits [{a}, {b}]")));
        }
        if a >= b {
            return Err(Error::domain(format!("integration limits must satisfy a < b, got [{a}, {b}]")));
        }
        if let Some(k) = singularity_order_at_a {
            if !(k > 0.0 && k < 1.0) {
                return Err(Error::domain(format!(
                    "singularity order {k} is not integrable (need 0 < order < 1)"
                )));
            }
        }

        if b.is_infinite() {
            // Split so the finite piece carries the singularity and the tail
            // starts at a positive abscissa for the 1/u map.
            let split = if a > 0.0 { 2.0 * a } else { a.abs() + 1.0 };
            let head = self.finite(&f, a, split, singularity_order_at_a)?;
            let tail_map = |u: f64| {
                let t = 1.0 / u;
                f(t) * t * t
            };
            let tail = self.run(&tail_map, 0.0, 1.0 / split, head.evaluations)?;
            return Ok(QuadratureResult {
                value: head.value + tail.value,
                error_estimate: head.error_estimate + tail.error_estimate,
                evaluations: head.evaluations + tail.evaluations,
            });
        }
        self.finite(&f, a, b, singularity_order_at_a)
    }

    fn finite<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, singularity_order_at_a: Option<f64>) -> Result<QuadratureResult> {
        match singularity_order_at_a {
            None => self.run(f, a, b, 0),
            Some(k) => {
                let q = 1.0 / (1.0 - k);
                let mapped = |s: f64| {
                    let sq = s.powf(q);
                    f(a + sq) * q * sq / s
                };
                self.run(&mapped, 0.0, (b - a).powf(1.0 / q), 0)
            }
        }
    }

    fn run<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, spent: usize) -> Result<QuadratureResult> {
        let budget = self.budget.saturating_sub(spent).max(15);
        adaptive(f, a, b, self.tol, budget).map_err(|e| match e {
            Error::BudgetExceeded {
                estimate,
                error_estimate,
                evaluations,
            } => Error::BudgetExceeded {
                estimate,
                error_estimate,
                evaluations: evaluations + spent,
            },
            other => other,
        })
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// See [`Integrator::integrate`] for the meaning of the singularity flag.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64, singularity_order_at_a: Option<f64>) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    Integrator::new(tol).integrate(f, a, b, singularity_order_at_a)
}
