//! Stability operator of `C_alpha` separated into spherical-harmonic modes.
//!
//! Mode `l` reduces `Δu + |B|^2 u` to the radial operator
//! `(1/(λ² r^{n-1} W)) (r^{n-1} W^{-1} u')' + V_l u`, with
//! `V_l = |B|^2 - l(l+n-2)/(λ² r²)`, posed on `[R_alpha, B]` with the Robin
//! condition `u' = u / R_alpha` inside and Dirichlet data at the truncation.
//! Negative eigenvalues are counted by Sturm oscillation at energy zero.
//! Shooting runs in `t = ln r` on the state `(u, r u')`.

use serde::Serialize;

use crate::catenoid::CatenoidFamily;
use crate::error::{Error, Result};
use crate::jacobi::Jet;
use crate::shooting::{shoot, Oscillator, Shot, ShootingMethod};

pub use crate::jacobi::first_zero;

/// Default truncation multipliers of `R_alpha`.
pub const DEFAULT_TRUNCATIONS: [f64; 4] = [10.0, 20.0, 40.0, 80.0];
pub const DEFAULT_L_MAX: usize = 2;
/// Largest `ln r` the adaptive sweep may reach.
pub const MAX_LOG_RADIUS: f64 = 650.0;
/// Growth coefficients below this magnitude mark a marginal (near-zero) eigenvalue.
pub const MARGINAL_GROWTH: f64 = 1e-6;
/// Non-autonomous parts of the shooting matrix must be below this for the
/// tail forecast to be trusted.
const ASYMPTOTIC_TOL: f64 = 1e-6;
const SHOOTING_TOL: f64 = 1e-11;

/// Eigenvalue `l(l+n-2)` of the Laplacian on the unit sphere `S^{n-1}`.
pub fn angular_eigenvalue(n: usize, l: usize) -> f64 {
    (l * (l + n - 2)) as f64
}

/// Dimension of the space of degree-`l` spherical harmonics on `S^{n-1}`.
pub fn harmonic_multiplicity(n: usize, l: usize) -> usize {
    fn binom(top: usize, k: usize) -> usize {
        if k > top {
            return 0;
        }
        (0..k).fold(1usize, |acc, i| acc * (top - i) / (i + 1))
    }
    let lower = if l >= 2 { binom(l + n - 3, n - 1) } else { 0 };
    binom(l + n - 1, n - 1) - lower
}

/// Value of `L u` at a point, together with the sum of the absolute sizes of
/// the terms that make it up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorValue {
    pub value: f64,
    pub scale: f64,
}

impl OperatorValue {
    /// Residual relative to the size of its terms (absolute when those are below one).
    pub fn normalized(&self) -> f64 {
        self.value.abs() / self.scale.max(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct SturmLiouvilleProblem {
    cat: CatenoidFamily,
    l: usize,
    truncation: f64,
}

/// Factory for mode `l`, truncated at `50 R_alpha`.
pub fn radial_operator(cat: &CatenoidFamily, l: usize) -> SturmLiouvilleProblem {
    SturmLiouvilleProblem {
        cat: cat.clone(),
        l,
        truncation: 50.0 * cat.r_alpha(),
    }
}

impl SturmLiouvilleProblem {
    pub fn new(cat: &CatenoidFamily, l: usize, truncation: f64) -> Result<Self> {
        radial_operator(cat, l).with_truncation(truncation)
    }

    pub fn with_truncation(mut self, truncation: f64) -> Result<Self> {
        if !(truncation > self.cat.r_alpha()) || !truncation.is_finite() {
            return Err(Error::domain(format!(
                "truncation {truncation} must be finite and exceed R_alpha = {}",
                self.cat.r_alpha()
            )));
        }
        self.truncation = truncation;
        Ok(self)
    }

    pub fn catenoid(&self) -> &CatenoidFamily {
        &self.cat
    }

    pub fn mode(&self) -> usize {
        self.l
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    fn w(&self, r: f64) -> f64 {
        self.cat.profile().metric_factor(r).sqrt()
    }

    /// `P(r) = λ^{n-2} r^{n-1} / W`.
    pub fn flux_coefficient(&self, r: f64) -> f64 {
        let n = self.cat.n() as i32;
        self.cat.lambda().powi(n - 2) * r.powi(n - 1) / self.w(r)
    }

    /// `w(r) = λ^n W r^{n-1}`, the area density.
    pub fn weight(&self, r: f64) -> f64 {
        let n = self.cat.n() as i32;
        self.cat.lambda().powi(n) * self.w(r) * r.powi(n - 1)
    }

    pub fn potential(&self, r: f64) -> f64 {
        let lam = self.cat.lambda();
        let n = self.cat.n();
        let b2 = (n * (n - 1)) as f64 / (lam * lam * r.powi(2 * n as i32));
        b2 - angular_eigenvalue(n, self.l) / (lam * lam * r * r)
    }

    /// `L u` for a radial jet `(u, u', u'')`.
    pub fn apply(&self, r: f64, (u, u1, u2): Jet) -> OperatorValue {
        let n = self.cat.n();
        let m = (n - 1) as f64;
        let q = self.cat.profile().metric_factor(r);
        let lam2 = self.cat.lambda().powi(2);
        let inv = 1.0 / (lam2 * q);
        // r W'/W = -m (q - 1)
        let terms = [
            inv * u2,
            inv * m / r * u1,
            inv * m * (q - 1.0) / r * u1,
            (n * (n - 1)) as f64 / (lam2 * r.powi(2 * n as i32)) * u,
            -angular_eigenvalue(n, self.l) / (lam2 * r * r) * u,
        ];
        OperatorValue {
            value: terms.iter().sum(),
            scale: terms.iter().map(|t| t.abs()).sum(),
        }
    }

    fn oscillator(&self) -> ModeOscillator {
        ModeOscillator {
            n: self.cat.n(),
            angular: angular_eigenvalue(self.cat.n(), self.l),
            lambda2: self.cat.lambda().powi(2),
        }
    }

    fn t_start(&self) -> f64 {
        self.cat.r_alpha().ln()
    }

    /// Solution launched from the Robin condition, integrated to `ln(radius)`.
    pub fn shoot_to(&self, radius: f64, energy: f64) -> Result<Shot> {
        shoot(&self.oscillator(), self.t_start(), [1.0, 1.0], radius.ln(), energy, SHOOTING_TOL)
    }

    /// Number of eigenvalues strictly below `energy`.
    pub fn count_below(&self, energy: f64) -> Result<usize> {
        let end = self.truncation.ln();
        Ok(self.shoot_to(self.truncation, energy)?.zeros_before(end))
    }

    /// The `k` lowest eigenvalues, by bisection on [`Self::count_below`].
    pub fn lowest_eigenvalues(&self, k: usize, rel_tol: f64) -> Result<Vec<f64>> {
        if k == 0 {
            return Ok(Vec::new());
        }
        let r0 = self.cat.r_alpha();
        let scale = self.potential(r0).abs().max(1.0 / (self.cat.lambda() * self.truncation).powi(2));
        let mut lo = -scale;
        let mut tries = 0;
        while self.count_below(lo)? > 0 {
            lo *= 2.0;
            tries += 1;
            if tries > 80 {
                return Err(Error::NonConvergence("no lower bound for the spectrum".into()));
            }
        }
        let mut hi = scale;
        tries = 0;
        while self.count_below(hi)? < k {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::NonConvergence("eigenvalue upper bound search failed".into()));
            }
        }
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let (mut a, mut b) = (lo, hi);
            while b - a > rel_tol * scale.max(b.abs()) {
                let mid = 0.5 * (a + b);
                if self.count_below(mid)? > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            out.push(0.5 * (a + b));
            lo = a;
        }
        Ok(out)
    }
}

/// Mode equation in `t = ln r` for the state `(u, v = r u')`:
/// `u_t = v`, `v_t = (1 - m q) v - q (n(n-1) e^{(2-2n)t} - l(l+n-2) + λ² E e^{2t}) u`.
struct ModeOscillator {
    n: usize,
    angular: f64,
    lambda2: f64,
}

impl ModeOscillator {
    fn q(&self, t: f64) -> f64 {
        let m = (self.n - 1) as f64;
        -1.0 / (-2.0 * m * t).exp_m1()
    }
}

impl Oscillator for ModeOscillator {
    fn matrix(&self, t: f64, energy: f64) -> [[f64; 2]; 2] {
        let n = self.n as f64;
        let q = self.q(t);
        let curvature = n * (n - 1.0) * ((2.0 - 2.0 * n) * t).exp();
        let spectral = if energy == 0.0 { 0.0 } else { self.lambda2 * energy * (2.0 * t).exp() };
        [[0.0, 1.0], [-q * (curvature - self.angular + spectral), 1.0 - (n - 1.0) * q]]
    }
}

/// Behaviour of an energy-zero shot beyond its end point, read off from
/// the indicial roots `μ² + (n-2) μ - l(l+n-2) = 0` of the limiting Euler equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailForecast {
    /// Both non-autonomous parts of the equation are negligible at the end point.
    pub asymptotic: bool,
    /// Coefficient of the dominant solution, in the launch normalization.
    pub growth: f64,
    /// Radius of the one further zero the dominant solution forces, if any.
    pub pending_zero: Option<f64>,
    pub marginal: bool,
}

fn tail_forecast(n: usize, l: usize, shot: &Shot) -> TailForecast {
    let t = shot.t_end;
    let nf = n as f64;
    let m = nf - 1.0;
    let q_minus_one = 1.0 / (2.0 * m * t).exp_m1();
    let curvature = nf * (nf - 1.0) * ((2.0 - 2.0 * nf) * t).exp();
    let asymptotic = q_minus_one.abs() < ASYMPTOTIC_TOL && curvature < ASYMPTOTIC_TOL;
    let [u, v] = shot.end_direction;
    let c = angular_eigenvalue(n, l);
    let disc = ((nf - 2.0).powi(2) + 4.0 * c).sqrt();
    let (growth_dir, tau) = if disc == 0.0 {
        // Double root 0: u ≈ a t + b with a = v.
        (v, -u / v)
    } else {
        let mu_plus = 0.5 * (-(nf - 2.0) + disc);
        let mu_minus = 0.5 * (-(nf - 2.0) - disc);
        let c_plus = (v - mu_minus * u) / disc;
        let c_minus = (mu_plus * u - v) / disc;
        (c_plus, (-c_minus / c_plus).ln() / disc)
    };
    let log_growth = growth_dir.abs().ln() + shot.log_amplitude;
    let marginal = log_growth < MARGINAL_GROWTH.ln();
    let growth = growth_dir.signum() * log_growth.min(700.0).exp();
    let pending_zero = (growth_dir != 0.0 && growth_dir.signum() != u.signum() && u != 0.0 && tau > 0.0)
        .then(|| (t + tau).exp());
    TailForecast {
        asymptotic,
        growth,
        pending_zero,
        marginal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexStatus {
    /// The last three counts agree and no further zero is forecast.
    Stabilized,
    /// As `Stabilized`, but a mode sits at a near-zero eigenvalue; a far zero
    /// beyond the last truncation cannot be excluded.
    Marginal,
    /// The counts did not settle within the admissible truncations.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationCount {
    pub multiplier: f64,
    pub truncation: f64,
    pub negative_count: usize,
    /// Zero count of each mode, without multiplicity.
    pub mode_counts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeSummary {
    pub l: usize,
    pub multiplicity: usize,
    pub method: ShootingMethod,
    pub forecast: TailForecast,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexResult {
    pub n: usize,
    pub alpha: f64,
    pub l_max: usize,
    pub per_truncation: Vec<TruncationCount>,
    pub stabilized_index: Option<usize>,
    pub status: IndexStatus,
    pub modes: Vec<ModeSummary>,
    /// Lowest `l = 0` eigenvalues at the last requested truncation.
    pub lowest_eigenvalues: Option<Vec<f64>>,
}

impl IndexResult {
    pub fn is_conclusive(&self) -> bool {
        self.status != IndexStatus::Inconclusive
    }

    pub fn marginal(&self) -> bool {
        self.status == IndexStatus::Marginal
    }
}

#[derive(Debug, Clone)]
pub struct IndexOptions {
    /// Increasing multipliers of `R_alpha`.
    pub truncations: Vec<f64>,
    pub l_max: usize,
    /// Extend the ladder until the counts and the tail forecast settle.
    pub adaptive: bool,
    pub eigenvalues: usize,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self {
            truncations: DEFAULT_TRUNCATIONS.to_vec(),
            l_max: DEFAULT_L_MAX,
            adaptive: true,
            eigenvalues: 0,
        }
    }
}

impl IndexOptions {
    pub fn with_truncations(truncations: &[f64]) -> Self {
        Self {
            truncations: truncations.to_vec(),
            ..Self::default()
        }
    }

    pub fn fixed(truncations: &[f64]) -> Self {
        Self {
            adaptive: false,
            ..Self::with_truncations(truncations)
        }
    }
}

/// Number of negative eigenvalues of one truncated mode problem.
pub fn eigen_count_negative(problem: &SturmLiouvilleProblem) -> Result<usize> {
    problem.count_below(0.0)
}

/// Index of `C_alpha` from a sweep of truncations `B = k R_alpha`.
pub fn morse_index(cat: &CatenoidFamily, options: &IndexOptions) -> Result<IndexResult> {
    let truncations = &options.truncations;
    if truncations.is_empty() {
        return Err(Error::domain("at least one truncation is required"));
    }
    if truncations.windows(2).any(|w| !(w[1] > w[0])) || !(truncations[0] > 1.0) {
        return Err(Error::domain("truncation multipliers must increase and exceed 1"));
    }
    let n = cat.n();
    let r0 = cat.r_alpha();
    let log_cap = MAX_LOG_RADIUS - r0.ln();
    let problems: Vec<SturmLiouvilleProblem> = (0..=options.l_max).map(|l| radial_operator(cat, l)).collect();
    let mut multipliers = truncations.clone();

    let (shots, forecasts) = loop {
        let last = *multipliers.last().unwrap();
        let shots = problems
            .iter()
            .map(|p| p.shoot_to(last * r0, 0.0))
            .collect::<Result<Vec<_>>>()?;
        let forecasts: Vec<TailForecast> = shots.iter().enumerate().map(|(l, s)| tail_forecast(n, l, s)).collect();
        if !options.adaptive {
            break (shots, forecasts);
        }
        let totals: Vec<usize> = multipliers.iter().map(|&k| total_count(n, &shots, k * r0)).collect();
        let settled = totals.len() >= 3 && totals[totals.len() - 3..].windows(2).all(|w| w[0] == w[1]);
        let pending = forecasts
            .iter()
            .filter(|f| !f.marginal)
            .filter_map(|f| f.pending_zero)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        let asymptotic = forecasts.iter().all(|f| f.asymptotic);
        let next: Vec<f64> = if let Some(r) = pending {
            [10.0, 100.0, 1000.0].iter().map(|f| f * r / r0).collect()
        } else if !asymptotic || !settled {
            vec![last * 10.0]
        } else {
            break (shots, forecasts);
        };
        let next: Vec<f64> = next.into_iter().filter(|&k| k > last && k.ln() <= log_cap).collect();
        if next.is_empty() {
            break (shots, forecasts);
        }
        multipliers.extend(next);
    };

    let per_truncation: Vec<TruncationCount> = multipliers
        .iter()
        .map(|&k| {
            let b = k * r0;
            TruncationCount {
                multiplier: k,
                truncation: b,
                negative_count: total_count(n, &shots, b),
                mode_counts: shots.iter().map(|s| s.zeros_before(b.ln())).collect(),
            }
        })
        .collect();
    let counts: Vec<usize> = per_truncation.iter().map(|c| c.negative_count).collect();
    let settled = counts.len() >= 3 && counts[counts.len() - 3..].windows(2).all(|w| w[0] == w[1]);
    let unresolved_zero = forecasts.iter().any(|f| !f.marginal && f.pending_zero.is_some());
    let tail_trusted = forecasts.iter().all(|f| f.asymptotic);
    let status = if !settled || unresolved_zero || !tail_trusted {
        IndexStatus::Inconclusive
    } else if forecasts.iter().any(|f| f.marginal) {
        IndexStatus::Marginal
    } else {
        IndexStatus::Stabilized
    };
    let stabilized_index = (status != IndexStatus::Inconclusive).then(|| *counts.last().unwrap());
    let modes = shots
        .iter()
        .zip(&forecasts)
        .enumerate()
        .map(|(l, (s, f))| ModeSummary {
            l,
            multiplicity: harmonic_multiplicity(n, l),
            method: s.method,
            forecast: *f,
        })
        .collect();
    let lowest_eigenvalues = if options.eigenvalues > 0 {
        let b = truncations.last().unwrap() * r0;
        Some(problems[0].clone().with_truncation(b)?.lowest_eigenvalues(options.eigenvalues, 1e-10)?)
    } else {
        None
    };
    Ok(IndexResult {
        n,
        alpha: cat.alpha(),
        l_max: options.l_max,
        per_truncation,
        stabilized_index,
        status,
        modes,
        lowest_eigenvalues,
    })
}

fn total_count(n: usize, shots: &[Shot], radius: f64) -> usize {
    shots
        .iter()
        .enumerate()
        .map(|(l, s)| harmonic_multiplicity(n, l) * s.zeros_before(radius.ln()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catenoid::alpha_n;
    use crate::jacobi::{alpha_jacobi_field, critical_angle, rotation_field};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn grid() -> Vec<CatenoidFamily> {
        let mut out = Vec::new();
        for n in 2..=5 {
            for k in 1..10 {
                out.push(CatenoidFamily::new(n, FRAC_PI_2 * k as f64 / 10.0).unwrap());
            }
        }
        out
    }

    #[test]
    fn multiplicities() {
        assert_eq!((0..4).map(|l| harmonic_multiplicity(2, l)).collect::<Vec<_>>(), vec![1, 2, 2, 2]);
        assert_eq!((0..4).map(|l| harmonic_multiplicity(3, l)).collect::<Vec<_>>(), vec![1, 3, 5, 7]);
        assert_eq!((0..4).map(|l| harmonic_multiplicity(4, l)).collect::<Vec<_>>(), vec![1, 4, 9, 16]);
    }

    #[test]
    fn alpha_field_solves_mode_zero() {
        for cat in grid() {
            let op = radial_operator(&cat, 0);
            let u = alpha_jacobi_field(&cat);
            let r0 = cat.r_alpha();
            for i in 0..=200 {
                let r = r0 * (1.0 + 9.0 * i as f64 / 200.0);
                let res = op.apply(r, u.jet(r));
                assert!(res.normalized() < 1e-7, "n={} alpha={} r={r}: {res:?}", cat.n(), cat.alpha());
            }
        }
    }

    #[test]
    fn rotation_field_solves_mode_one() {
        for cat in grid() {
            let op = radial_operator(&cat, 1);
            let k = rotation_field(&cat);
            let r0 = cat.r_alpha();
            for i in 0..=200 {
                let r = r0 * (1.0 + 9.0 * i as f64 / 200.0);
                assert!(op.apply(r, k.jet(r)).normalized() < 1e-7);
            }
        }
    }

    #[test]
    fn constant_function_gives_curvature() {
        let cat = CatenoidFamily::new(3, 0.6).unwrap();
        let op = radial_operator(&cat, 0);
        for &r in &[cat.r_alpha(), 2.0, 7.0] {
            let b2 = cat.second_fundamental_norm(r).unwrap();
            assert_relative_eq!(op.apply(r, (1.0, 0.0, 0.0)).value, b2, max_relative = 1e-13);
        }
    }

    #[test]
    fn coefficients_are_positive_and_potential_decays() {
        for cat in grid() {
            for l in 0..=2 {
                let op = radial_operator(&cat, l);
                let mut r = cat.r_alpha() * (1.0 + 1e-9);
                while r < 1e8 {
                    assert!(op.flux_coefficient(r) > 0.0 && op.weight(r) > 0.0);
                    r *= 1.7;
                }
                assert!(op.potential(1e8).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn higher_modes_have_lower_potential() {
        for cat in grid() {
            let (p1, p2) = (radial_operator(&cat, 1), radial_operator(&cat, 2));
            let mut r = cat.r_alpha();
            while r < 1e6 {
                assert!(p2.potential(r) <= p1.potential(r));
                r *= 1.2;
            }
        }
    }

    #[test]
    fn counts_in_dimension_two() {
        let stable = CatenoidFamily::new(2, FRAC_PI_6).unwrap();
        let b = 50.0 * stable.r_alpha();
        assert_eq!(eigen_count_negative(&SturmLiouvilleProblem::new(&stable, 0, b).unwrap()).unwrap(), 0);
        let unstable = CatenoidFamily::new(2, FRAC_PI_3).unwrap();
        let b = 50.0 * unstable.r_alpha();
        assert_eq!(eigen_count_negative(&SturmLiouvilleProblem::new(&unstable, 0, b).unwrap()).unwrap(), 1);
        for cat in grid() {
            let b = 50.0 * cat.r_alpha();
            assert_eq!(eigen_count_negative(&SturmLiouvilleProblem::new(&cat, 1, b).unwrap()).unwrap(), 0);
        }
    }

    #[test]
    fn mode_zero_zeros_are_zeros_of_alpha_field() {
        let cat = CatenoidFamily::new(2, FRAC_PI_3).unwrap();
        let shot = radial_operator(&cat, 0).shoot_to(1e3, 0.0).unwrap();
        assert_eq!(shot.zeros.len(), 1);
        let expected = first_zero(&alpha_jacobi_field(&cat)).unwrap().unwrap();
        assert_relative_eq!(shot.zeros[0].exp(), expected, max_relative = 1e-8);
    }

    #[test]
    fn shot_reproduces_alpha_field() {
        let cat = CatenoidFamily::new(4, 0.9).unwrap();
        let u = alpha_jacobi_field(&cat);
        let op = radial_operator(&cat, 0);
        for &r in &[1.5, 4.0, 30.0] {
            let shot = op.shoot_to(r, 0.0).unwrap();
            let value = shot.end_direction[0] * shot.log_amplitude.exp();
            assert_relative_eq!(value, u.value(r), max_relative = 1e-8);
        }
    }

    #[test]
    fn index_in_dimension_two() {
        let stable = morse_index(&CatenoidFamily::new(2, FRAC_PI_6).unwrap(), &IndexOptions::default()).unwrap();
        assert_eq!(stable.status, IndexStatus::Stabilized);
        assert_eq!(stable.stabilized_index, Some(0));
        let unstable = morse_index(&CatenoidFamily::new(2, FRAC_PI_3).unwrap(), &IndexOptions::default()).unwrap();
        assert_eq!(unstable.stabilized_index, Some(1));
        // The zero of u sits at r = 17.44, between 10 and 20 R_alpha.
        let counts: Vec<usize> = unstable.per_truncation.iter().map(|c| c.negative_count).collect();
        assert_eq!(&counts[..4], &[0, 1, 1, 1]);
    }

    #[test]
    fn far_zero_is_found_by_extension() {
        let cat = CatenoidFamily::new(2, 0.8).unwrap();
        let res = morse_index(&cat, &IndexOptions::default()).unwrap();
        assert_eq!(res.status, IndexStatus::Stabilized);
        assert_eq!(res.stabilized_index, Some(1));
        assert!(res.per_truncation.last().unwrap().truncation > 1.7e21);
        let fixed = morse_index(&cat, &IndexOptions::fixed(&DEFAULT_TRUNCATIONS)).unwrap();
        assert_eq!(fixed.status, IndexStatus::Inconclusive);
        assert_eq!(fixed.stabilized_index, None);
    }

    #[test]
    fn counts_never_decrease() {
        for cat in grid() {
            let res = morse_index(&cat, &IndexOptions::default()).unwrap();
            for w in res.per_truncation.windows(2) {
                assert!(w[0].negative_count <= w[1].negative_count);
            }
            assert!(res.is_conclusive(), "n={} alpha={}", cat.n(), cat.alpha());
        }
    }

    #[test]
    fn index_agrees_with_alpha_field_positivity() {
        for cat in grid() {
            let res = morse_index(&cat, &IndexOptions::default()).unwrap();
            let zero = first_zero(&alpha_jacobi_field(&cat)).unwrap();
            assert_eq!(res.per_truncation.last().unwrap().mode_counts[0] > 0, zero.is_some());
            assert!(res.stabilized_index.unwrap() <= 1);
            assert_eq!(res.modes[1].forecast.pending_zero, None);
        }
    }

    #[test]
    fn transition_in_dimension_three() {
        let c = critical_angle(3, 1e-13).unwrap().critical_angle;
        let above = morse_index(&CatenoidFamily::new(3, c + 1e-3).unwrap(), &IndexOptions::default()).unwrap();
        assert_eq!(above.stabilized_index, Some(1));
        let below = morse_index(&CatenoidFamily::new(3, c - 1e-3).unwrap(), &IndexOptions::default()).unwrap();
        assert_eq!(below.stabilized_index, Some(0));
        let at = morse_index(&CatenoidFamily::new(3, c).unwrap(), &IndexOptions::default()).unwrap();
        assert!(at.marginal());
        assert!(at.stabilized_index.is_some());
    }

    #[test]
    fn bounded_field_at_transition() {
        // At the critical angle the energy-zero l = 0 solution decays like 1/r.
        let c = critical_angle(3, 1e-13).unwrap().critical_angle;
        let cat = CatenoidFamily::new(3, c).unwrap();
        let op = radial_operator(&cat, 0);
        let far = |r: f64| {
            let s = op.shoot_to(r, 0.0).unwrap();
            r * s.end_direction[0] * s.log_amplitude.exp()
        };
        assert_relative_eq!(far(1e3), far(1e4), max_relative = 1e-3);
        assert!(cat.alpha() > alpha_n(3));
    }

    #[test]
    fn quarter_pi_is_marginal_in_dimension_two() {
        let res = morse_index(&CatenoidFamily::new(2, FRAC_PI_4).unwrap(), &IndexOptions::default()).unwrap();
        assert!(res.marginal());
        assert_eq!(res.stabilized_index, Some(0));
    }

    #[test]
    fn eigenvalues_bracket_the_count() {
        let cat = CatenoidFamily::new(2, FRAC_PI_3).unwrap();
        let problem = SturmLiouvilleProblem::new(&cat, 0, 40.0 * cat.r_alpha()).unwrap();
        let eig = problem.lowest_eigenvalues(3, 1e-10).unwrap();
        assert!(eig[0] < 0.0 && eig[1] > 0.0);
        assert!(eig.windows(2).all(|w| w[0] < w[1]));
        for (j, e) in eig.iter().enumerate() {
            assert_eq!(problem.count_below(e * (1.0 - 1e-6f64.copysign(*e))).unwrap(), j);
        }
    }

    #[test]
    fn shooting_method_is_reported() {
        let res = morse_index(&CatenoidFamily::new(3, 0.5).unwrap(), &IndexOptions::default()).unwrap();
        assert!(res.modes.iter().all(|m| m.method == ShootingMethod::Linear));
    }
}
