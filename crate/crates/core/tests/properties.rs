use hardy_core::constants::{a_coeff, d0_threshold, kp_constant, sphere_moment};
use hardy_core::functional::{
    dirichlet_p_energy, hardy_term, verify_classical, verify_theorem_a, Classical, Integrator, TestFunction,
};
use hardy_core::geometry::ConvexDomain;
use hardy_core::hardyfn::{check_a_monotone, check_lemma22_ii, LemmaConfig};
use hardy_core::logtower::{bsum, eta, xk};
use hardy_core::HardyParams;
use proptest::prelude::*;

fn boxed(extents: &[f64]) -> ConvexDomain {
    ConvexDomain::boxed(vec![0.0; extents.len()], extents.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tower_bounds_and_sandwich(k in 1usize..6, t in 1e-12f64..0.999) {
        let x = xk(k, t).unwrap();
        prop_assert!(x > 0.0 && x < 1.0);
        prop_assert!(xk(k, t * 0.5).unwrap() < x);
        let e = eta(k, t).unwrap();
        let b = bsum(k, t).unwrap();
        prop_assert!(e * e / k as f64 <= b * (1.0 + 1e-14));
        prop_assert!(b <= e * e * (1.0 + 1e-14));
    }

    #[test]
    fn kp_relation(n in 2usize..8, p in 1.1f64..6.0) {
        let kp = kp_constant(n, p).unwrap();
        let big_k = sphere_moment(n, p).unwrap();
        prop_assert!(kp > 0.0 && big_k > 0.0 && big_k <= 1.0);
    }
}

// each case below solves for the threshold, which is the expensive part
proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn condition_i_above_threshold(p in 1.2f64..4.0, k in 0usize..4, mult in 1.0f64..50.0) {
        let diam = 2.0;
        let d0 = d0_threshold(p, k, diam);
        let hp = HardyParams::new(2, p, k, mult * d0, diam).unwrap();
        let e = hp.eta_d();
        prop_assert!(1.0 - e - a_coeff(p, k) * e * e >= -1e-12);
    }

    #[test]
    fn refined_inequality_on_random_boxes(
        a in 0.2f64..3.0,
        b in 0.2f64..3.0,
        p in 1.2f64..4.0,
        k in 0usize..4,
        mult in 1.0f64..30.0,
        which in 0usize..5,
    ) {
        let dom = boxed(&[a, b]);
        let diam = dom.diameter();
        let u = TestFunction::suite(&dom).unwrap()[which];
        let hp = HardyParams::new(2, p, k, mult * d0_threshold(p, k, diam), diam).unwrap();
        let r = verify_theorem_a(&dom, &u, &hp, &Integrator::default()).unwrap();
        prop_assert!(r.passed, "{:?}", r);
        let hi = verify_classical(&dom, &u, p, Classical::Hi, &Integrator::default()).unwrap();
        prop_assert!(hi.passed && hi.rhs <= r.rhs * (1.0 + 1e-12));
    }

    #[test]
    fn refined_inequality_on_random_balls(
        r in 0.1f64..5.0,
        n in 2usize..5,
        p in 1.2f64..4.0,
        k in 0usize..3,
        which in 0usize..5,
    ) {
        let dom = ConvexDomain::ball(vec![0.3; n], r).unwrap();
        let diam = dom.diameter();
        let mut funcs = TestFunction::suite(&dom).unwrap();
        funcs.extend(TestFunction::radial_suite(&dom).unwrap());
        let hp = HardyParams::new(n, p, k, 2.0 * d0_threshold(p, k, diam), diam).unwrap();
        for u in [funcs[which], funcs[5 + which % 2]] {
            let rep = verify_theorem_a(&dom, &u, &hp, &Integrator::default()).unwrap();
            prop_assert!(rep.passed, "{:?}", rep);
        }
    }

    #[test]
    fn refined_inequality_on_random_triangles(
        theta in 0.0f64..6.3,
        gap1 in 1.3f64..2.8,
        gap2 in 1.3f64..2.8,
        p in 1.2f64..4.0,
        k in 0usize..3,
        which in 0usize..5,
    ) {
        // three outward normals with every angular gap below pi: a bounded triangle around the origin
        prop_assume!(gap1 + gap2 > std::f64::consts::PI + 0.2);
        let angles = [theta, theta + gap1, theta + gap1 + gap2];
        let normals: Vec<Vec<f64>> = angles.iter().map(|a| vec![a.cos(), a.sin()]).collect();
        let dom = ConvexDomain::polytope(normals, vec![1.0; 3]).unwrap();
        let diam = dom.diameter();
        let vol = dom.volume().unwrap();
        let lin = TestFunction::Distance(hardy_core::Profile::Linear);
        let e = dirichlet_p_energy(&dom, &lin, p, &Integrator::default()).unwrap();
        prop_assert!((e.value - vol).abs() <= 1e-10 * vol);
        let u = TestFunction::suite(&dom).unwrap()[which];
        let hp = HardyParams::new(2, p, k, 2.0 * d0_threshold(p, k, diam), diam).unwrap();
        let r = verify_theorem_a(&dom, &u, &hp, &Integrator::default()).unwrap();
        prop_assert!(r.passed, "{:?}", r);
    }

    #[test]
    fn lemma_grids_above_threshold(p in 1.2f64..4.0, k in 1usize..4, mult in 1.0f64..20.0) {
        let diam = 2.0;
        let big_d = mult * d0_threshold(p, k, diam);
        let cfg = LemmaConfig::with_geometric_grid(p, k, big_d, 0.5 * diam, 1000).unwrap();
        prop_assert!(check_lemma22_ii(&cfg).passed);
        prop_assert!(check_a_monotone(&cfg).passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_has_unit_gradient(a in 0.2f64..3.0, b in 0.2f64..3.0, c in 0.2f64..3.0, p in 1.2f64..4.0) {
        let dom = boxed(&[a, b, c]);
        let u = TestFunction::Distance(hardy_core::Profile::Linear);
        let vol = a * b * c;
        let e = dirichlet_p_energy(&dom, &u, p, &Integrator::default()).unwrap();
        let h = hardy_term(&dom, &u, p, &Integrator::default()).unwrap();
        prop_assert!((e.value - vol).abs() <= 1e-12 * vol);
        prop_assert!((h.value - vol).abs() <= 1e-12 * vol);
    }

    #[test]
    fn exit_distance_dominates_depth(seed in 0u64..1000, wx in -1.0f64..1.0, wy in -1.0f64..1.0, wz in -1.0f64..1.0) {
        let norm = (wx * wx + wy * wy + wz * wz).sqrt();
        prop_assume!(norm > 1e-3);
        let w = [wx / norm, wy / norm, wz / norm];
        for dom in [ConvexDomain::unit_cube(3), ConvexDomain::unit_ball(3)] {
            for x in dom.sample_interior(4, 1e-3, seed) {
                let d = dom.boundary_distance(&x).unwrap();
                prop_assert!(dom.rho(&x, &w).unwrap() >= d * (1.0 - 1e-12));
            }
        }
    }
}
