use std::f64::consts::FRAC_PI_2;

use catenoidal::ends::{flux_of_height, mu_roots};
use catenoidal::geometry_checks::{free_boundary_residual, monotonicity_report};
use catenoidal::jacobi::{alpha_jacobi_field, criticality_indicator, first_zero};
use catenoidal::numerics::unit_sphere_volume;
use catenoidal::spectrum::{morse_index, IndexOptions};
use catenoidal::CatenoidFamily;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundary_lies_on_the_sphere(n in 2usize..6, alpha in 0.01f64..(FRAC_PI_2 - 0.01)) {
        let cat = CatenoidFamily::new(n, alpha).unwrap();
        prop_assert!(free_boundary_residual(&cat) < 1e-10);
        prop_assert!((cat.height(cat.r_alpha()) - alpha.sin()).abs() < 1e-12);
    }

    #[test]
    fn flux_matches_boundary(n in 2usize..5, alpha in 0.05f64..1.5, k in 1.0f64..200.0) {
        let cat = CatenoidFamily::new(n, alpha).unwrap();
        let rep = flux_of_height(&cat, k * cat.lambda() * cat.r_alpha()).unwrap();
        let expected = unit_sphere_volume(n - 1) * alpha.cos().powi(n as i32 - 1) * alpha.sin();
        prop_assert!((rep.slice_flux - expected).abs() < 1e-12 * expected.max(1.0));
    }

    #[test]
    fn density_increases(alpha in 0.1f64..1.4, r1 in 1.0f64..20.0, dr in 0.5f64..20.0) {
        let cat = CatenoidFamily::new(3, alpha).unwrap();
        let a = monotonicity_report(&cat, r1).unwrap();
        let b = monotonicity_report(&cat, r1 + dr).unwrap();
        prop_assert!(a.lhs <= b.lhs + 1e-12);
        prop_assert!(a.residual.abs() < 1e-8 && b.residual.abs() < 1e-8);
    }

    #[test]
    fn vieta_relations(n in 2usize..9, l in 1usize..12) {
        let r = mu_roots(n, l).unwrap();
        let lam = (l * (l + n - 2)) as f64;
        prop_assert!((r.mu_plus + r.mu_minus + (n as f64 - 2.0)).abs() < 1e-12 * lam.max(1.0));
        prop_assert!((r.mu_plus * r.mu_minus + lam).abs() < 1e-12 * lam);
        prop_assert!(r.mu_plus >= 1.0 - 1e-15 && r.mu_minus <= -(n as f64 - 1.0) + 1e-12);
    }

    #[test]
    fn index_matches_sign_of_indicator(n in 2usize..5, alpha in 0.05f64..1.5) {
        let cat = CatenoidFamily::new(n, alpha).unwrap();
        let g = criticality_indicator(&cat).unwrap();
        prop_assume!(g.abs() > 1e-4);
        let res = morse_index(&cat, &IndexOptions::default()).unwrap();
        prop_assert_eq!(res.stabilized_index, Some(usize::from(g < 0.0)));
        prop_assert_eq!(first_zero(&alpha_jacobi_field(&cat)).unwrap().is_some(), g < 0.0);
    }
}
