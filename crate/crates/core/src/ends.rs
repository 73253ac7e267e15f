//! Expansions of regular ends and of Jacobi functions on them, indicial
//! roots of the angular modes, and the flux of the height function.
//!
//! Samples are pairs `(|X|, value)` where `|X|` is the horizontal radius.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::catenoid::{CatenoidFamily, Meridian};
use crate::error::{Error, Result};
use crate::jacobi::RadialJacobiField;
use crate::numerics::roots::{brent, Bracket};
use crate::numerics::unit_sphere_volume;
use crate::spectrum::angular_eigenvalue;

/// Largest accepted condition number of the column-scaled design matrix.
const MAX_CONDITION: f64 = 1e10;
/// Samples must cover at least this ratio of radii.
const MIN_SPAN: f64 = 10.0;
/// Coefficients below this fraction of the data scale count as zero when classifying.
const ZERO_FRACTION: f64 = 1e-7;
/// Relative accuracy assumed for sample values; scaled remainders below
/// this level times `|X|^{decay_power}` are indistinguishable from rounding.
pub const SAMPLE_RESOLUTION: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    /// Height of a graphical end: `A ln|X| + B` (n = 2) or `B + A |X|^{-(n-2)}`.
    Graph,
    /// Jacobi function: `A ln|X| + B` (n = 2) or `A + B |X|^{-(n-2)}`.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    /// `A > 0`.
    PositiveLeading,
    /// `A = 0` and `B > 0`.
    PositiveSecondary,
    Other,
}

#[derive(Debug, Clone, Serialize)]
pub struct EndExpansion {
    pub n: usize,
    pub kind: EndKind,
    pub a: f64,
    pub b: f64,
    /// First-harmonic coefficient; zero for rotationally symmetric data.
    pub c: Vec<f64>,
    /// Coefficient of the `|X|^{-decay_power}` column absorbed by the fit.
    pub correction: f64,
    pub decay_power: f64,
    /// `(|X|, remainder |X|^{decay_power})` with the remainder taken after the
    /// two leading terms.
    pub residual_profile: Vec<(f64, f64)>,
    pub classification: SignClass,
    pub condition_number: f64,
    /// Largest absolute sample value.
    pub data_scale: f64,
}

impl EndExpansion {
    /// Leading part of the expansion at radius `x`.
    pub fn leading(&self, x: f64) -> f64 {
        let (c0, c1) = basis(self.n, x);
        let (k0, k1) = self.leading_coefficients();
        k0 * c0 + k1 * c1
    }

    /// Coefficients of the two leading basis functions in [`basis`] order.
    fn leading_coefficients(&self) -> (f64, f64) {
        match (self.n, self.kind) {
            (2, _) => (self.a, self.b),
            (_, EndKind::Graph) => (self.b, self.a),
            (_, EndKind::Jacobi) => (self.a, self.b),
        }
    }

    /// The largest scaled remainder on the outer half of the samples is at
    /// most twice the largest on the inner half, once the part attributable
    /// to sample rounding is removed.
    pub fn residual_tail_bounded(&self) -> bool {
        let half = self.residual_profile.len() / 2;
        let floor = |x: f64| SAMPLE_RESOLUTION * self.data_scale * x.powf(self.decay_power);
        let inner = self.residual_profile[..half].iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
        let outer = self.residual_profile[half..]
            .iter()
            .map(|&(x, v)| (v.abs() - floor(x)).max(0.0))
            .fold(0.0, f64::max);
        outer <= 2.0 * inner
    }

    /// Limit of the slice flux of the height for a graph expansion.
    pub fn asymptotic_flux(&self) -> Result<f64> {
        if self.kind != EndKind::Graph {
            return Err(Error::domain("asymptotic flux needs a graph expansion"));
        }
        let sphere = unit_sphere_volume(self.n - 1);
        Ok(if self.n == 2 {
            sphere * self.a
        } else {
            -((self.n - 2) as f64) * sphere * self.a
        })
    }
}

/// The two leading basis functions: `(ln x, 1)` for n = 2, `(1, x^{-(n-2)})` otherwise.
fn basis(n: usize, x: f64) -> (f64, f64) {
    if n == 2 {
        (x.ln(), 1.0)
    } else {
        (1.0, x.powi(-(n as i32 - 2)))
    }
}

fn decay_power(n: usize, kind: EndKind) -> f64 {
    match kind {
        EndKind::Graph if n == 2 => 2.0,
        EndKind::Graph => n as f64,
        EndKind::Jacobi => (n - 1) as f64,
    }
}

/// Fit of a graphical end.
pub fn fit_end_graph(samples: &[(f64, f64)], n: usize) -> Result<EndExpansion> {
    fit_end(samples, n, EndKind::Graph)
}

/// Fit of a Jacobi function on a regular end, with its sign classification.
pub fn fit_jacobi_asymptotics(samples: &[(f64, f64)], n: usize) -> Result<EndExpansion> {
    fit_end(samples, n, EndKind::Jacobi)
}

/// Weighted least squares in the two leading basis functions plus one
/// `|X|^{-decay_power}` column, rows weighted by `|X|^{decay_power}`.
pub fn fit_end(samples: &[(f64, f64)], n: usize, kind: EndKind) -> Result<EndExpansion> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if samples.len() < 4 {
        return Err(Error::IllConditioned(format!("{} samples are too few for a three-term fit", samples.len())));
    }
    if samples.iter().any(|(x, f)| !(x.is_finite() && *x > 0.0 && f.is_finite())) {
        return Err(Error::domain("samples need finite positive radii and finite values"));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (x, _)| (lo.min(*x), hi.max(*x)));
    if hi / lo < MIN_SPAN * (1.0 - 1e-12) {
        return Err(Error::IllConditioned(format!("samples span [{lo}, {hi}], less than one decade")));
    }

    let d = decay_power(n, kind);
    let rows = samples.len();
    let mut design = DMatrix::<f64>::zeros(rows, 3);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (i, &(x, f)) in samples.iter().enumerate() {
        let w = x.powf(d);
        let (b0, b1) = basis(n, x);
        design[(i, 0)] = w * b0;
        design[(i, 1)] = w * b1;
        design[(i, 2)] = 1.0;
        rhs[i] = w * f;
    }
    let norms: Vec<f64> = (0..3).map(|j| design.column(j).norm()).collect();
    for (j, &s) in norms.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_number = smax / smin;
    if !(condition_number < MAX_CONDITION) {
        return Err(Error::IllConditioned(format!("design matrix condition number {condition_number:.3e}")));
    }
    let scaled = svd
        .solve(&rhs, smax * f64::EPSILON)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let coef: Vec<f64> = (0..3).map(|j| scaled[j] / norms[j]).collect();

    let (a, b) = match (n, kind) {
        (2, _) => (coef[0], coef[1]),
        (_, EndKind::Graph) => (coef[1], coef[0]),
        (_, EndKind::Jacobi) => (coef[0], coef[1]),
    };
    let residual_profile = samples
        .iter()
        .map(|&(x, f)| {
            let (b0, b1) = basis(n, x);
            (x, (f - coef[0] * b0 - coef[1] * b1) * x.powf(d))
        })
        .collect();
    let scale = samples.iter().map(|(_, f)| f.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let classification = classify(a, b, scale);
    Ok(EndExpansion {
        n,
        kind,
        a,
        b,
        c: vec![0.0; n],
        correction: coef[2],
        decay_power: d,
        residual_profile,
        classification,
        condition_number,
        data_scale: scale,
    })
}

fn classify(a: f64, b: f64, scale: f64) -> SignClass {
    let zero = ZERO_FRACTION * scale;
    if a > zero {
        SignClass::PositiveLeading
    } else if a.abs() <= zero && b > zero {
        SignClass::PositiveSecondary
    } else {
        SignClass::Other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicialRoots {
    pub n: usize,
    pub angular_eigenvalue: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
}

/// Roots of `mu^2 + (n-2) mu - l(l+n-2) = 0` for `l >= 1`.
pub fn mu_roots(n: usize, l: usize) -> Result<IndicialRoots> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if l == 0 {
        return Err(Error::domain("indicial roots are defined for modes l >= 1"));
    }
    let lam = angular_eigenvalue(n, l);
    let half = (n as f64 - 2.0) / 2.0;
    let root = (half * half + lam).sqrt();
    let mu_plus = root - half;
    // Vieta: mu_plus mu_minus = -lam, avoiding cancellation.
    let mu_minus = -lam / mu_plus;
    Ok(IndicialRoots {
        n,
        angular_eigenvalue: lam,
        mu_plus,
        mu_minus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxReport {
    /// Horizontal radius of the slice.
    pub radius: f64,
    /// Integral of the conormal derivative of the height over the slice.
    pub slice_flux: f64,
    /// Integral of `(P, e_z)` over the boundary, `P` the conormal at the sphere.
    pub boundary_flux: f64,
}

/// Flux of the height function through the slice `{|X| = radius}`.
pub fn flux_of_height<M: Meridian + ?Sized>(surface: &M, radius: f64) -> Result<FluxReport> {
    let start = surface.start();
    let rho0 = surface.point(start)[0];
    if !(radius >= rho0) || !radius.is_finite() {
        return Err(Error::domain(format!(
            "slice radius {radius} lies inside the boundary parallel (radius {rho0})"
        )));
    }
    let r = horizontal_parameter(surface, radius)?;
    if !(surface.velocity(r)[0] > 0.0) {
        return Err(Error::domain(format!("the surface is not a graph at |X| = {radius}")));
    }
    let sphere = unit_sphere_volume(surface.dimension() - 1);
    let n = surface.dimension() as i32;
    let conormal_dz = |r: f64| {
        let [dr, dz] = surface.velocity(r);
        dz / dr.hypot(dz)
    };
    Ok(FluxReport {
        radius,
        slice_flux: sphere * radius.powi(n - 1) * conormal_dz(r),
        boundary_flux: sphere * rho0.powi(n - 1) * conormal_dz(start),
    })
}

/// Parameter where the meridian reaches horizontal radius `radius`.
fn horizontal_parameter<M: Meridian + ?Sized>(surface: &M, radius: f64) -> Result<f64> {
    let lo = surface.start();
    let f = |r: f64| surface.point(r)[0] - radius;
    if f(lo) >= 0.0 {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo.max(1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::domain(format!("meridian never reaches |X| = {radius}")));
        }
    }
    Ok(brent(f, Bracket::new(lo, hi)?, 1e-15 * hi)?.x)
}

/// Horizontal radii `lo_ratio..hi_ratio` times the boundary radius, log-spaced.
fn sample_radii(cat: &CatenoidFamily, lo_ratio: f64, hi_ratio: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo_ratio >= 1.0 && hi_ratio > lo_ratio) || count < 2 {
        return Err(Error::domain("sample ratios must satisfy 1 <= lo < hi with at least two samples"));
    }
    let base = cat.lambda() * cat.r_alpha();
    let step = (hi_ratio / lo_ratio).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| base * lo_ratio * (step * i as f64).exp()).collect())
}

/// Height samples `(|X|, z)` of `C_alpha`.
pub fn height_samples(cat: &CatenoidFamily, lo_ratio: f64, hi_ratio: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    Ok(sample_radii(cat, lo_ratio, hi_ratio, count)?
        .into_iter()
        .map(|x| (x, cat.height(x / cat.lambda())))
        .collect())
}

/// Samples `(|X|, u)` of a radial Jacobi field.
pub fn jacobi_samples(
    field: &RadialJacobiField,
    lo_ratio: f64,
    hi_ratio: f64,
    count: usize,
) -> Result<Vec<(f64, f64)>> {
    let cat = field.catenoid();
    Ok(sample_radii(cat, lo_ratio, hi_ratio, count)?
        .into_iter()
        .map(|x| (x, field.value(x / cat.lambda())))
        .collect())
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    radius: f64,
    value: f64,
}

/// Two-column CSV with a header row: `|X|`, value.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path)?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row: SampleRow = row?.deserialize(None)?;
        out.push((row.radius, row.value));
    }
    Ok(out)
}

/// Closed-form leading coefficients of the height of `C_alpha`: `(A, B)`.
pub fn catenoid_graph_coefficients(cat: &CatenoidFamily) -> (f64, f64) {
    let lam = cat.lambda();
    let n = cat.n();
    if n == 2 {
        (lam, cat.mu() + lam * (2.0 / lam).ln())
    } else {
        let phi_inf = cat.profile().phi_infinity().expect("n > 2");
        (-lam.powi(n as i32 - 1) / (n - 2) as f64, cat.mu() + lam * phi_inf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catenoid::FlatSolution;
    use crate::jacobi::{alpha_jacobi_field, critical_angle, limit_at_infinity};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn graph_fit_dimension_two() {
        let cat = CatenoidFamily::new(2, FRAC_PI_4).unwrap();
        let fit = fit_end_graph(&height_samples(&cat, 10.0, 100.0, 60).unwrap(), 2).unwrap();
        let (a, b) = catenoid_graph_coefficients(&cat);
        assert_relative_eq!(a, 0.5, max_relative = 1e-14);
        // Next neglected term is O(|X|^-4).
        assert_relative_eq!(fit.a, a, max_relative = 1e-6);
        assert_relative_eq!(fit.b, b, max_relative = 1e-6);
        assert!(fit.residual_tail_bounded());
    }

    #[test]
    fn graph_fit_higher_dimensions() {
        for n in 3..=5 {
            let cat = CatenoidFamily::new(n, 0.7).unwrap();
            let fit = fit_end_graph(&height_samples(&cat, 10.0, 100.0, 60).unwrap(), n).unwrap();
            let (a, b) = catenoid_graph_coefficients(&cat);
            if n == 3 {
                assert_relative_eq!(a, -cat.lambda().powi(2), max_relative = 1e-14);
            }
            assert_relative_eq!(fit.a, a, max_relative = 1e-6);
            assert_relative_eq!(fit.b, b, max_relative = 1e-8);
            assert!(fit.residual_tail_bounded());
        }
    }

    #[test]
    fn flat_samples_fit_to_zero() {
        let samples: Vec<(f64, f64)> = (0..30).map(|i| (1.0 + i as f64, 0.0)).collect();
        for n in 2..=4 {
            let fit = fit_end_graph(&samples, n).unwrap();
            assert_eq!((fit.a, fit.b), (0.0, 0.0));
            assert!(fit.residual_profile.iter().all(|(_, r)| *r == 0.0));
        }
    }

    #[test]
    fn constant_function_is_the_leading_jacobi_term() {
        let samples: Vec<(f64, f64)> = (0..30).map(|i| (2.0 * 1.2f64.powi(i), 1.0)).collect();
        let fit = fit_jacobi_asymptotics(&samples, 3).unwrap();
        assert_abs_diff_eq!(fit.a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.b, 0.0, epsilon = 1e-10);
        assert!(fit.residual_profile.iter().all(|(_, r)| r.abs() < 1e-9));
        assert_eq!(fit.classification, SignClass::PositiveLeading);
        let log_fit = fit_jacobi_asymptotics(&samples, 2).unwrap();
        assert_abs_diff_eq!(log_fit.a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(log_fit.b, 1.0, epsilon = 1e-12);
        assert_eq!(log_fit.classification, SignClass::PositiveSecondary);
    }

    #[test]
    fn jacobi_fit_recovers_limit() {
        for &(n, alpha) in &[(3, 0.6), (3, 1.0), (4, 0.9), (5, 1.1)] {
            let cat = CatenoidFamily::new(n, alpha).unwrap();
            let u = alpha_jacobi_field(&cat);
            let fit = fit_jacobi_asymptotics(&jacobi_samples(&u, 10.0, 100.0, 60).unwrap(), n).unwrap();
            let g = limit_at_infinity(&cat).unwrap();
            assert_relative_eq!(fit.a, g, max_relative = 1e-5);
            assert_eq!(fit.classification, SignClass::PositiveLeading);
            assert!(fit.residual_tail_bounded());
        }
    }

    #[test]
    fn jacobi_fit_in_dimension_two() {
        for &alpha in &[FRAC_PI_6, FRAC_PI_3, 1.3] {
            let cat = CatenoidFamily::new(2, alpha).unwrap();
            let fit = fit_jacobi_asymptotics(&jacobi_samples(&alpha_jacobi_field(&cat), 10.0, 100.0, 60).unwrap(), 2)
                .unwrap();
            // The remainder is O(ln|X| / |X|^2), outside the fitted columns.
            assert_relative_eq!(fit.a, cat.d_lambda(), max_relative = 5e-3);
            assert_eq!(fit.a > 0.0, alpha < FRAC_PI_4);
            assert!(fit.residual_tail_bounded());
        }
    }

    #[test]
    fn field_at_critical_angle_decays() {
        let c = critical_angle(3, 1e-13).unwrap().critical_angle;
        let cat = CatenoidFamily::new(3, c).unwrap();
        let fit = fit_jacobi_asymptotics(&jacobi_samples(&alpha_jacobi_field(&cat), 10.0, 1000.0, 80).unwrap(), 3)
            .unwrap();
        assert_eq!(fit.classification, SignClass::PositiveSecondary);
        let expected_b = -cat.d_lambda() * 2.0 * cat.lambda();
        assert_relative_eq!(fit.b, expected_b, max_relative = 1e-6);
    }

    #[test]
    fn narrow_samples_are_rejected() {
        let samples: Vec<(f64, f64)> = (0..20).map(|i| (10.0 + 0.1 * i as f64, 1.0)).collect();
        assert!(matches!(fit_end_graph(&samples, 2), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn indicial_roots() {
        let r = mu_roots(2, 1).unwrap();
        assert_eq!((r.mu_plus, r.mu_minus), (1.0, -1.0));
        let r = mu_roots(3, 1).unwrap();
        assert_eq!((r.mu_plus, r.mu_minus), (1.0, -2.0));
        let r = mu_roots(4, 2).unwrap();
        assert_eq!((r.mu_plus, r.mu_minus), (2.0, -4.0));
        assert!(mu_roots(3, 0).is_err());
    }

    #[test]
    fn flux_is_conserved() {
        for &(n, alpha) in &[(2, FRAC_PI_4), (2, 1.2), (3, 0.8), (4, 0.5)] {
            let cat = CatenoidFamily::new(n, alpha).unwrap();
            let expected = unit_sphere_volume(n - 1) * alpha.cos().powi(n as i32 - 1) * alpha.sin();
            for &k in &[1.0, 20.0, 50.0, 100.0] {
                let rep = flux_of_height(&cat, k * cat.lambda() * cat.r_alpha()).unwrap();
                assert_relative_eq!(rep.slice_flux, expected, max_relative = 1e-12);
                assert_relative_eq!(rep.boundary_flux, expected, max_relative = 1e-12);
            }
            let fit = fit_end_graph(&height_samples(&cat, 10.0, 100.0, 60).unwrap(), n).unwrap();
            assert_relative_eq!(fit.asymptotic_flux().unwrap(), expected, max_relative = 1e-6);
        }
        let flat = flux_of_height(&FlatSolution::new(3).unwrap(), 10.0).unwrap();
        assert_eq!((flat.slice_flux, flat.boundary_flux), (0.0, 0.0));
        let cat = CatenoidFamily::new(2, 1.0).unwrap();
        assert!(flux_of_height(&cat, 0.1).is_err());
        assert_relative_eq!(flux_of_height(&CatenoidFamily::new(2, FRAC_PI_4).unwrap(), 100.0).unwrap().slice_flux, PI, max_relative = 1e-12);
    }

    #[test]
    fn csv_samples_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, "radius,value\n1.0, 2.5\n10.0,3.5\n").unwrap();
        assert_eq!(read_samples(&path).unwrap(), vec![(1.0, 2.5), (10.0, 3.5)]);
        std::fs::write(&path, "radius,value\n1.0,x\n").unwrap();
        assert!(read_samples(&path).is_err());
    }
}
