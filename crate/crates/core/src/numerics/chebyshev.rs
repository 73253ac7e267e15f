//! Piecewise Chebyshev interpolation on a fixed panel layout.

use crate::error::Result;

#[derive(Debug, Clone)]
struct Panel {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Panel {
    fn eval(&self, x: f64) -> f64 {
        let s = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        // Clenshaw recurrence.
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * s * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        s * b1 - b2 + self.coeffs[0]
    }
}

/// Interpolant built from samples at Chebyshev points of the first kind
/// on equal-width panels covering `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct PiecewiseChebyshev {
    lo: f64,
    hi: f64,
    panels: Vec<Panel>,
}

impl PiecewiseChebyshev {
    /// `sample` is called once per node; it may fail (e.g. when it runs a
    /// quadrature).
    pub fn build<F>(lo: f64, hi: f64, panels: usize, degree: usize, mut sample: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let n = degree + 1;
        let width = (hi - lo) / panels as f64;
        let mut out = Vec::with_capacity(panels);
        for k in 0..panels {
            let a = lo + width * k as f64;
            let b = if k + 1 == panels { hi } else { a + width };
            let mut values = Vec::with_capacity(n);
            for j in 0..n {
                let theta = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                let x = 0.5 * (a + b) + 0.5 * (b - a) * theta.cos();
                values.push(sample(x)?);
            }
            let coeffs = (0..n)
                .map(|m| {
                    let sum: f64 = values
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v * (std::f64::consts::PI * m as f64 * (j as f64 + 0.5) / n as f64).cos())
                        .sum();
                    let scale = if m == 0 { 1.0 } else { 2.0 };
                    scale * sum / n as f64
                })
                .collect();
            out.push(Panel { lo: a, hi: b, coeffs });
        }
        Ok(Self { lo, hi, panels: out })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Evaluate; arguments outside the domain are clamped to it.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo, self.hi);
        let width = (self.hi - self.lo) / self.panels.len() as f64;
        let idx = (((x - self.lo) / width) as usize).min(self.panels.len() - 1);
        self.panels[idx].eval(x)
    }

    /// Magnitude of the trailing coefficient, the usual truncation proxy.
    pub fn tail_coefficient(&self) -> f64 {
        self.panels
            .iter()
            .map(|p| p.coeffs.last().copied().unwrap_or(0.0).abs())
            .fold(0.0, f64::max)
    }
}
