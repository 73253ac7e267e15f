//! The separated operator against `Δ + |B|^2` computed by finite differences
//! of the embedding, in hyperspherical coordinates on the surface.

use catenoidal::spectrum::radial_operator;
use catenoidal::CatenoidFamily;
use nalgebra::DMatrix;

const H_METRIC: f64 = 1e-4;
const H_DIV: f64 = 1e-3;

fn direction(angles: &[f64]) -> Vec<f64> {
    match angles {
        [t] => vec![t.cos(), t.sin()],
        [t1, t2] => vec![t1.sin() * t2.cos(), t1.sin() * t2.sin(), t1.cos()],
        _ => unreachable!(),
    }
}

/// Fourth-order central first derivative.
fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn shifted(x: &[f64], i: usize, by: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += by;
    y
}

struct Oracle<'a> {
    cat: &'a CatenoidFamily,
}

impl Oracle<'_> {
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        self.cat.embed(x[0], &direction(&x[1..])).unwrap().position
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let dim = x.len();
        let tangents: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                (0..dim + 1)
                    .map(|c| d1(|t| self.embed(&shifted(x, i, t - x[i]))[c], x[i], H_METRIC))
                    .collect()
            })
            .collect();
        DMatrix::from_fn(dim, dim, |i, j| tangents[i].iter().zip(&tangents[j]).map(|(a, b)| a * b).sum::<f64>())
    }

    /// `sqrt(g) g^{ij} d_j f` at `x`.
    fn flux<F: Fn(&[f64]) -> f64>(&self, f: &F, x: &[f64]) -> Vec<f64> {
        let dim = x.len();
        let g = self.metric(x);
        let sqrt_det = g.determinant().sqrt();
        let inv = g.try_inverse().unwrap();
        let grad: Vec<f64> = (0..dim).map(|j| d1(|t| f(&shifted(x, j, t - x[j])), x[j], H_METRIC)).collect();
        (0..dim)
            .map(|i| sqrt_det * (0..dim).map(|j| inv[(i, j)] * grad[j]).sum::<f64>())
            .collect()
    }

    fn laplacian<F: Fn(&[f64]) -> f64>(&self, f: &F, x: &[f64]) -> f64 {
        let div: f64 = (0..x.len())
            .map(|i| d1(|t| self.flux(f, &shifted(x, i, t - x[i]))[i], x[i], H_DIV))
            .sum();
        div / self.metric(x).determinant().sqrt()
    }
}

/// Radial test function with an exact jet.
fn radial(r: f64) -> (f64, f64, f64) {
    (r.sin() / r, (r * r.cos() - r.sin()) / (r * r), ((2.0 - r * r) * r.sin() - 2.0 * r * r.cos()) / r.powi(3))
}

fn harmonic(l: usize, p: &[f64]) -> f64 {
    match l {
        0 => 1.0,
        1 => p[0],
        2 => p[0] * p[1],
        _ => unreachable!(),
    }
}

#[test]
fn separated_operator_matches_embedded_laplacian() {
    for &(n, alpha) in &[(2, 0.7), (2, 1.2), (3, 0.5), (3, 1.0)] {
        let cat = CatenoidFamily::new(n, alpha).unwrap();
        let oracle = Oracle { cat: &cat };
        for l in 0..=2 {
            let op = radial_operator(&cat, l);
            let f = |x: &[f64]| radial(x[0]).0 * harmonic(l, &direction(&x[1..]));
            for &scale in &[1.3, 2.0, 4.0] {
                let r = scale * cat.r_alpha();
                let angles: Vec<f64> = if n == 2 { vec![0.4] } else { vec![1.0, 0.4] };
                let mut x = vec![r];
                x.extend(&angles);
                let b2 = cat.second_fundamental_norm(r).unwrap();
                let lhs = oracle.laplacian(&f, &x) + b2 * f(&x);
                let rhs = op.apply(r, radial(r)).value * harmonic(l, &direction(&angles));
                let size = op.apply(r, radial(r)).scale.max(1e-3);
                assert!(
                    (lhs - rhs).abs() < 1e-6 * size,
                    "n={n} alpha={alpha} l={l} r={r}: {lhs} vs {rhs}"
                );
            }
        }
    }
}
