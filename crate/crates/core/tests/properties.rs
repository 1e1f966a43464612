use proptest::prelude::*;

use satqkd::beam::{plob, BeamParams};
use satqkd::bounds::{bound_b, thermal_lower, thermal_upper};
use satqkd::cvqkd::{asymptotic_rate, holevo_bound, Detection, ProtocolParams};
use satqkd::fading::FadingModel;
use satqkd::geometry::{altitude_from_slant, slant_range};
use satqkd::orbit::{repeater_rate, CircularOrbit};
use satqkd::turbulence::spot_sizes;
use satqkd::Direction;

fn detection() -> impl Strategy<Value = Detection> {
    prop_oneof![Just(Detection::Homodyne), Just(Detection::Heterodyne)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn slant_altitude_round_trip(h in 1e3f64..4e7, t in 0.0f64..1.5) {
        let z = slant_range(h, t).unwrap();
        prop_assert!(z >= h * (1.0 - 1e-12));
        let back = altitude_from_slant(z, t).unwrap();
        prop_assert!((back / h - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_precision_tracks_double(h in 1e5f64..4e7, t in 0.0f64..1.2) {
        let z64 = slant_range(h, t).unwrap();
        let z32 = slant_range(h as f32, t as f32).unwrap() as f64;
        prop_assert!((z32 / z64 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn plob_increasing_and_convex(a in 0.0f64..0.98, d in 1e-4f64..0.01) {
        let (x, y, z) = (a, a + d, a + 2.0 * d);
        prop_assert!(plob(y) > plob(x));
        prop_assert!(plob(x) + plob(z) >= 2.0 * plob(y) - 1e-12);
    }

    #[test]
    fn holevo_rate_below_plob(tau in 1e-4f64..0.999, mu in 1.01f64..80.0, nbar in 0.0f64..0.2, det in detection()) {
        let chi = holevo_bound(tau, nbar, mu, det).unwrap();
        prop_assert!(chi >= -1e-12);
        let p = ProtocolParams { beta: 1.0, mu, detection: det, ..ProtocolParams::collective() };
        prop_assert!(asymptotic_rate(tau, 0.0, &p).unwrap() <= plob(tau) + 1e-12);
    }

    #[test]
    fn fading_cdf_and_quantile(w in 0.5f64..300.0, rel_s2 in 0.01f64..10.0, q in 0.001f64..0.999) {
        let shape = FadingModel::new(0.38, 0.4, w, 1.0).unwrap();
        let m = FadingModel::new(0.38, 0.4, w, shape.r0 * shape.r0 * rel_s2).unwrap();
        let x = m.quantile(q);
        prop_assert!(x > 0.0 && x <= m.eta);
        prop_assert!((m.cdf(x) - q).abs() < 1e-9);
        prop_assert!(m.cdf(0.5 * x) <= m.cdf(x));
    }

    #[test]
    fn bounds_ordering(w in 0.5f64..300.0, rel_s2 in 0.01f64..10.0, frac in 0.0f64..0.1) {
        let shape = FadingModel::new(0.38, 0.4, w, 1.0).unwrap();
        let m = FadingModel::new(0.38, 0.4, w, shape.r0 * shape.r0 * rel_s2).unwrap();
        let n = frac * m.eta;
        let b = bound_b(m.eta, &m).unwrap();
        let up = thermal_upper(n, &m).unwrap().value;
        let lo = thermal_lower(n, &m).unwrap();
        prop_assert!(b <= plob(m.eta) * (1.0 + 1e-12));
        prop_assert!(up <= b + 1e-15);
        prop_assert!(lo.integral.value <= up + 1e-12);
        prop_assert!(lo.simple.value <= lo.integral.value + 1e-12);
    }

    #[test]
    fn spot_size_identity(h in 1e5f64..4e7, t in 0.0f64..1.0, w0 in 0.1f64..0.5) {
        let beam = BeamParams::collimated(800e-9, w0).unwrap();
        let z = slant_range(h, t).unwrap();
        let s = spot_sizes(z, t, &beam, 2.2354e-12, Direction::Up).unwrap();
        let gap = s.w_lt * s.w_lt - s.w_st * s.w_st - s.sigma_tb2;
        prop_assert!(gap.abs() <= 1e-12 * s.w_lt * s.w_lt);
        prop_assert!(s.w_st >= s.w_d);
    }

    #[test]
    fn pass_time_round_trip(h in 1.5e5f64..2e6, theta in -1.5f64..1.5) {
        let o = CircularOrbit::new(h).unwrap();
        let t = o.time_of_zenith(theta).unwrap();
        prop_assert!((o.zenith_angle_at(t).unwrap() - theta).abs() < 1e-8);
    }

    #[test]
    fn repeaters_help(d in 1e3f64..1e7, n in 0u32..40) {
        prop_assert!(repeater_rate(d, n + 1).unwrap() > repeater_rate(d, n).unwrap());
    }
}
