use masscheck_core::bartnik::{brown_york, shi_tam_mass, BartnikData};
use masscheck_core::conformal::Potential;
use masscheck_core::eigen::{neumann_principal_eigenvalue, EigenProblem};
use masscheck_core::geometry::grid::uniform;
use masscheck_core::geometry::{presets, ricci_from_jet, scalar_from_jet, EndKind, Orientation, ProfileMetric};
use masscheck_core::numerics::Jet;
use masscheck_core::shield::{check_shield, ShieldSpec};
use proptest::prelude::*;

fn annulus() -> ProfileMetric {
    presets::analytic(
        3,
        uniform(1.0, 2.0, 161),
        |s| Jet {
            value: s,
            d1: 1.0,
            d2: 0.0,
        },
        [EndKind::Boundary; 2],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn scalar_is_trace_of_ricci(n in 3usize..=7, h in 0.1f64..10.0, d1 in -3.0f64..3.0, d2 in -5.0f64..5.0) {
        let j = Jet { value: h, d1, d2 };
        let ric = ricci_from_jet(n, j);
        let r = scalar_from_jet(n, j);
        let trace = ric.radial + (n as f64 - 1.0) * ric.tangential;
        prop_assert!((r - trace).abs() <= 1e-12 * (1.0 + r.abs()));
    }

    #[test]
    fn mean_curvature_flips_with_orientation(n in 3usize..=7, radius in 0.2f64..20.0) {
        let g = presets::flat_ball(n, radius, 101).unwrap();
        for i in 1..g.len() {
            let up = g.mean_curvature_sphere(i, Orientation::Increasing).unwrap();
            let down = g.mean_curvature_sphere(i, Orientation::Decreasing).unwrap();
            prop_assert_eq!(up, -down);
            prop_assert!(up > 0.0);
        }
    }

    #[test]
    fn brown_york_is_affine_and_order_reversing(
        n in 3usize..=7, rho in 0.1f64..50.0, a in -5.0f64..5.0, b in -5.0f64..5.0,
    ) {
        let m = |eta: f64| brown_york(&BartnikData::constant(n, rho, eta).unwrap());
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(m(lo) >= m(hi));
        let mid = m(0.5 * (a + b));
        prop_assert!((m(a) + m(b) - 2.0 * mid).abs() <= 1e-9 * (1.0 + mid.abs()));
        // Euclidean data carry no mass
        let h0 = (n as f64 - 1.0) / rho;
        prop_assert!(m(h0).abs() <= 1e-12 * rho.powi(n as i32 - 2).max(1.0));
    }

    #[test]
    fn shi_tam_never_exceeds_brown_york(n in 3usize..=7, r0 in 0.1f64..20.0, eta in 1e-3f64..10.0) {
        let c = shi_tam_mass(n, r0, eta);
        let m = brown_york(&BartnikData::constant(n, r0, eta).unwrap());
        prop_assert!(c <= m + 1e-12 * m.abs().max(1.0));
    }

    #[test]
    fn misner_sharp_scales_with_length(n in 3usize..=7, mass in 0.1f64..5.0, c in 0.2f64..5.0) {
        let r_h = (2.0 * mass).powf(1.0 / (n as f64 - 2.0));
        let r_max = presets::recommended_outer_radius(n, mass, 1.5 * r_h);
        let g = presets::schwarzschild(n, mass, 1.5 * r_h, r_max, 400, 0.0).unwrap();
        let scaled = g.scaled(c).unwrap();
        let expected = mass * c.powi(n as i32 - 2);
        // far out 1 - h'^2 cancels to roundoff
        for i in (0..g.len()).filter(|i| g.jet(*i).d1 < 0.99) {
            let ms = scaled.misner_sharp_mass(i).unwrap();
            prop_assert!((ms - expected).abs() <= 1e-9 * expected);
        }
    }

    #[test]
    fn shield_verdict_is_scale_invariant(c in 0.1f64..10.0, cut in 2.5f64..6.0, kappa in 0.5f64..1.0) {
        let g = presets::cylinder(3, 2f64.sqrt(), 0.0, 10.0, 1001, [EndKind::Boundary; 2]).unwrap();
        let spec = ShieldSpec { u0: [0.0, cut], u1: [0.0, 2.0], u2: [0.0, 1.5], kappa, eta_bound: 1.0 };
        let base = check_shield(&g, &spec).unwrap();
        let scaled = check_shield(&g.scaled(c).unwrap(), &spec.scaled(c)).unwrap();
        prop_assert_eq!(base.verdict(), scaled.verdict());
        for (a, b) in base.items.iter().zip(&scaled.items) {
            prop_assert_eq!(a.pass, b.pass);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn principal_eigenvalue_is_monotone_in_potential(
        base in -2.0f64..2.0, center in 1.0f64..2.0, width in 0.05f64..0.5, lift in 0.0f64..3.0,
    ) {
        let g = annulus();
        let v1 = Potential::constant(&g, base).unwrap();
        let bump = Potential::bump(&g, center, width, lift).unwrap();
        let v2 = Potential::from_fn(&g, |s, _| base + bump.values()[g.nearest_index(s)]).unwrap();
        let mu = |v: &Potential| neumann_principal_eigenvalue(&EigenProblem::new(&g, (1.0, 2.0), v).unwrap()).unwrap().mu;
        let (m1, m2) = (mu(&v1), mu(&v2));
        prop_assert!(m1 <= m2 + 1e-10, "{} > {}", m1, m2);
        prop_assert!(m2 <= base + lift + 1e-10);
    }
}
