use proptest::prelude::*;

use rcatenoid::analysis::{
    alpha_of, count_bvp_solutions, envelope_min, height_threshold_t, neck_threshold_m, phi,
    profile_intersections, scan_phi,
};
use rcatenoid::curvature::{
    elementary_symmetric, mean_curvatures, newton_eigenvalues, principal_curvatures, verify_hj_signs,
};
use rcatenoid::export::fmt_num;
use rcatenoid::family::{ball_embed, normal_vector};
use rcatenoid::profile::{integrate_profile, OdeSettings};
use rcatenoid::quadrature::{half_height, lambda_height};
use rcatenoid::{FamilyParams, ProfilePoint, QuadratureSettings};

fn qs() -> QuadratureSettings {
    QuadratureSettings::default()
}

fn unit_vector(raw: Vec<f64>) -> Option<Vec<f64>> {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 1e-3).then(|| raw.iter().map(|x| x / norm).collect())
}

/// Families with q > 0 and n up to 8.
fn catenoid_family() -> impl Strategy<Value = FamilyParams> {
    (2i64..=8).prop_flat_map(|n| (Just(n), 0..n - 1)).prop_map(|(n, r)| FamilyParams::new(n, r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normal_has_unit_length(
        f in 1e-3f64..8.0,
        f_t in -1e3f64..1e3,
        f_tt in -10.0f64..10.0,
        t in -3.0f64..3.0,
        raw in proptest::collection::vec(-1.0f64..1.0, 2..6),
    ) {
        let Some(zeta) = unit_vector(raw) else { return Ok(()); };
        let p = ProfilePoint::new(t, f, f_t, f_tt).unwrap();
        let x = ball_embed(f, t, &zeta).unwrap().x;
        let norm = normal_vector(&p, &zeta).unwrap().product_norm(&x).unwrap();
        prop_assert!((norm - 1.0).abs() < 1e-10, "norm {}", norm);
    }

    #[test]
    fn embedded_points_stay_in_the_ball(rho in 1e-6f64..30.0, raw in proptest::collection::vec(-1.0f64..1.0, 2..6)) {
        let Some(zeta) = unit_vector(raw) else { return Ok(()); };
        let x = ball_embed(rho, 0.0, &zeta).unwrap().x;
        prop_assert!(x.iter().map(|c| c * c).sum::<f64>().sqrt() < 1.0);
    }

    #[test]
    fn exported_numbers_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn newton_trace_identity(k in proptest::collection::vec(-3.0f64..3.0, 2..9)) {
        let n = k.len();
        let e = elementary_symmetric(&k);
        let p = newton_eigenvalues(&k, n - 1).unwrap();
        for (j, pj) in p.iter().enumerate() {
            let trace: f64 = pj.iter().sum();
            let scale = 1.0 + e[j].abs() * (n - j) as f64;
            prop_assert!((trace - (n - j) as f64 * e[j]).abs() < 1e-10 * scale * 3f64.powi(j as i32));
        }
    }

    #[test]
    fn umbilic_mean_curvatures(c in -2.0f64..2.0, n in 1usize..10) {
        let h = mean_curvatures(&vec![c; n]);
        for (j, hj) in h.iter().enumerate() {
            let expected = c.powi(j as i32 + 1);
            prop_assert!((hj - expected).abs() <= 1e-13 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn catenoid_sign_pattern_from_k(fp in catenoid_family(), k1 in 1e-3f64..50.0) {
        // k = (k1, …, k1, -q k1): H_j has the sign of r + 1 - j
        let n = fp.n();
        let mut k = vec![k1; n];
        k[n - 1] = -fp.q() * k1;
        let h = mean_curvatures(&k);
        for (idx, hj) in h.iter().enumerate() {
            let j = idx + 1;
            let scale = k1.powi(j as i32);
            if j == fp.r() + 1 {
                prop_assert!(hj.abs() < 1e-13 * scale);
            } else {
                prop_assert_eq!(hj.signum(), if j < fp.r() + 1 { 1.0 } else { -1.0 });
                prop_assert!(hj.abs() > 1e-6 * scale);
            }
        }
        let pr = &newton_eigenvalues(&k, fp.r()).unwrap()[fp.r()];
        prop_assert!(pr.iter().all(|e| *e > 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lambda_increases_in_rho(fp in catenoid_family(), a in 0.01f64..5.0, d1 in 1e-6f64..5.0, d2 in 1e-6f64..5.0) {
        let (lo, hi) = (a + d1.min(d2), a + d1.max(d2) + 1e-6);
        let l1 = lambda_height(&fp, a, lo, &qs()).unwrap();
        let l2 = lambda_height(&fp, a, hi, &qs()).unwrap();
        let l = half_height(&fp, a, &qs()).unwrap();
        // near L the increments drop below the quadrature error
        let slack = l1.error_estimate + l2.error_estimate + l.error_estimate;
        prop_assert!(l1.value > 0.0);
        prop_assert!(l1.value < l2.value + slack, "{:?} {:?}", l1, l2);
        prop_assert!(l2.value < l.value + slack, "{:?} {:?}", l2, l);
        if l.value - l1.value > 10.0 * slack {
            prop_assert!(l1.value < l2.value);
        }
    }

    #[test]
    fn alpha_inverts_half_height(a in 0.1f64..5.0) {
        let fp = FamilyParams::new(4, 1).unwrap();
        let l = half_height(&fp, a, &QuadratureSettings::tight()).unwrap().value;
        let alpha = alpha_of(&fp, l, &QuadratureSettings::tight()).unwrap();
        prop_assert!((alpha - a).abs() < 1e-8, "{} vs {}", alpha, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn first_integral_is_conserved(fp in catenoid_family(), a in 0.05f64..3.0) {
        let c = integrate_profile(&fp, a, &OdeSettings::default(), &qs()).unwrap();
        let scale = a.sinh().powf(fp.q()).max(1.0);
        prop_assert!(c.max_residual() < 1e-8 * scale, "{} (scale {})", c.max_residual(), scale);
    }

    #[test]
    fn hj_signs_along_trajectories(fp in catenoid_family(), a in 0.1f64..2.0) {
        let rep = verify_hj_signs(&fp, a, 40, &OdeSettings::default(), &qs()).unwrap();
        prop_assert!(rep.pass, "{:?}", rep.violations.first());
        // principal curvatures of the neck
        let p = ProfilePoint::new(0.0, a, 0.0, fp.q() / a.tanh()).unwrap();
        let k = principal_curvatures(&fp, &p);
        prop_assert!((k[fp.n() - 1] + fp.q() * k[0]).abs() < 1e-12 * k[0]);
    }

    #[test]
    fn two_profiles_cross_once(a in 0.1f64..3.0, ratio in 1.05f64..4.0) {
        let fp = FamilyParams::new(4, 1).unwrap();
        let c = profile_intersections(&fp, a, a * ratio, &qs()).unwrap();
        prop_assert_eq!(c.len(), 1);
        prop_assert!(c[0].rho > a * ratio && c[0].t > 0.0 && c[0].residual < 1e-8);
    }

    #[test]
    fn phi_is_unimodal_below_threshold((n, r) in prop_oneof![Just((4i64, 1i64)), Just((3, 1)), Just((6, 2))], frac in 0.05f64..0.95) {
        let fp = FamilyParams::new(n, r).unwrap();
        let t0 = frac * height_threshold_t(&fp, &qs()).unwrap();
        let env = envelope_min(&fp, t0, &qs()).unwrap();
        prop_assert!(env.unimodal);
        let alpha = alpha_of(&fp, t0, &qs()).unwrap();
        let values: Vec<f64> = (1..=40)
            .map(|i| alpha + (3.0 * env.m - alpha) * (i as f64 / 40.0).powi(3))
            .map(|a| phi(&fp, t0, a, &qs()).unwrap_or(f64::INFINITY))
            .collect();
        let k = values.iter().enumerate().fold(0, |b, (i, v)| if *v < values[b] { i } else { b });
        prop_assert!(values[..=k].windows(2).all(|w| w[1] < w[0] || w[0].is_infinite()));
        prop_assert!(values[k..].windows(2).all(|w| w[1] > w[0]));
        prop_assert!(values.iter().all(|v| *v >= env.m));
    }

    #[test]
    fn envelope_is_continuous(frac in 0.05f64..0.9) {
        let fp = FamilyParams::new(4, 1).unwrap();
        let t = frac * std::f64::consts::FRAC_PI_2;
        let (d, big) = (1e-4, 1e-2);
        let m = envelope_min(&fp, t, &qs()).unwrap().m;
        let m_small = envelope_min(&fp, t + d, &qs()).unwrap().m;
        let m_big = envelope_min(&fp, t + big, &qs()).unwrap().m;
        let lipschitz = (m_big - m).abs() / big;
        prop_assert!((m_small - m).abs() <= 10.0 * d * lipschitz.max(1e-3));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn bvp_count_matches_grid_scan_q_at_least_one(frac in 0.05f64..0.9, u in 0.5f64..2.0) {
        let fp = FamilyParams::new(4, 1).unwrap();
        check_against_scan(&fp, frac * std::f64::consts::FRAC_PI_2, u)?;
    }

    #[test]
    fn bvp_count_matches_grid_scan_q_below_one(frac in 0.05f64..0.9, u in 0.5f64..2.0) {
        let fp = FamilyParams::new(3, 1).unwrap();
        let t0 = frac * height_threshold_t(&fp, &qs()).unwrap();
        let m0 = envelope_min(&fp, t0, &qs()).unwrap().m;
        // stay inside J_q = (0, M]
        prop_assume!(u * m0 <= neck_threshold_m(&fp).unwrap());
        check_against_scan(&fp, t0, u)?;
    }
}

fn check_against_scan(fp: &FamilyParams, t0: f64, u: f64) -> Result<(), TestCaseError> {
    let env = envelope_min(fp, t0, &qs()).unwrap();
    let radius = u * env.m;
    let res = count_bvp_solutions(fp, t0, radius, &qs()).unwrap();
    let scan = scan_phi(fp, t0, radius.max(env.m) * 1.5, &qs()).unwrap();
    prop_assert_eq!(res.count, scan.count(radius));
    prop_assert!(res.validated);
    for w in res.roots.windows(2) {
        prop_assert!(w[0] < env.a_star && env.a_star < w[1]);
    }
    Ok(())
}
