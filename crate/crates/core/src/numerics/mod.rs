//! Shared numerical primitives.

pub mod chebyshev;
pub mod ode;
pub mod quadrature;
pub mod roots;

pub use ode::{integrate_ode, DenseSolution, OdeOptions};
pub use quadrature::{integrate, Integrator, QuadratureResult};
pub use roots::{brent, find_root, Bracket, Root};

/// (k)-dimensional volume of the unit sphere S^k in R^{k+1}.
pub fn unit_sphere_volume(k: usize) -> f64 {
    use std::f64::consts::PI;
    // |S^0| = 2, |S^1| = 2 pi, |S^{k+1}| = 2 pi |S^{k-1}| / k.
    let mut even = 2.0;
    let mut odd = 2.0 * PI;
    let mut j = 0;
    while j + 2 <= k {
        let next_even = 2.0 * PI * even / (j + 1) as f64;
        let next_odd = 2.0 * PI * odd / (j + 2) as f64;
        even = next_even;
        odd = next_odd;
        j += 2;
    }
    if k % 2 == 0 {
        even
    } else {
        odd
    }
}
