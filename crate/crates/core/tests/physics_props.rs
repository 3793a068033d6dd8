use approx::assert_relative_eq;
use proptest::prelude::*;
use wpucn::channel::{sample_rician, steering_vector, Link, LOS_ONLY_KAPPA};
use wpucn::propagation::{attenuation_constants, downlink_loss};
use wpucn::scenario::{compute_geometry, load_scenario, sample_ud_positions, PhysicalConstants, Position};
use wpucn::soil::{permittivity_override, soil_permittivity};
use wpucn::units::linear_to_db;
use wpucn::Scenario;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scenario_round_trips(
        radius in 0.5f64..50.0,
        n in 1usize..200,
        depth in 0.05f64..2.0,
        vwc in 0.0f64..0.6,
        q in 2usize..128,
        kappa in 0.0f64..50.0,
    ) {
        let s = Scenario {
            radius,
            num_uds: n,
            burial_depth: depth,
            vwc,
            num_antennas: q,
            rician_p2u: kappa,
            ..Scenario::default()
        };
        let back = load_scenario(&s.to_toml()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn placement_is_pure_and_inside_disk(seed in any::<u64>(), radius in 0.1f64..100.0, n in 1usize..100) {
        let s = Scenario { radius, num_uds: n, ..Scenario::default() };
        let a = sample_ud_positions(&s, seed);
        prop_assert_eq!(&a, &sample_ud_positions(&s, seed));
        prop_assert_eq!(a.len(), n);
        for p in a {
            prop_assert!(p.x * p.x + p.y * p.y <= radius * radius);
            prop_assert_eq!(p.z, -s.burial_depth);
        }
    }

    #[test]
    fn beta_dominates_alpha(re in 1.0f64..80.0, im in 0.0f64..60.0, f in 45e6f64..3e9) {
        let m = permittivity_override(re, im).unwrap();
        let (alpha, beta) = attenuation_constants(&m, f, &PhysicalConstants::default());
        prop_assert!(alpha >= 0.0);
        prop_assert!(beta >= alpha);
    }

    #[test]
    fn losses_grow_with_distance_depth_and_frequency(
        l in 1.0f64..1000.0,
        d in 0.05f64..1.5,
        f in 100e6f64..1e9,
        re in 2.0f64..40.0,
        im in 0.1f64..10.0,
        bump in 1.01f64..2.0,
    ) {
        let m = permittivity_override(re, im).unwrap();
        let k = PhysicalConstants::default();
        let base = downlink_loss(l, d, &m, 2.4, f, &k).total_delta;
        prop_assert!(downlink_loss(l * bump, d, &m, 2.4, f, &k).total_delta > base);
        prop_assert!(downlink_loss(l, d * bump, &m, 2.4, f, &k).total_delta > base);
        prop_assert!(downlink_loss(l, d, &m, 2.4, f * bump, &k).total_delta > base);
    }

    #[test]
    fn db_terms_add_up(l in 1.0f64..1000.0, d in 0.05f64..1.5, re in 1.0f64..40.0, im in 0.0f64..10.0) {
        let m = permittivity_override(re, im).unwrap();
        let b = downlink_loss(l, d, &m, 2.0, 433e6, &PhysicalConstants::default());
        let [j, kk, mm, total] = b.db();
        prop_assert!((j + kk + mm - total).abs() <= 1e-9);
    }

    #[test]
    fn channel_is_seed_deterministic(seed in any::<u64>(), theta in -3.2f64..3.2, q in 1usize..64) {
        let a = sample_rician(theta, 3.0, q, Link::HapToUd, seed);
        let b = sample_rician(theta, 3.0, q, Link::HapToUd, seed);
        prop_assert_eq!(a.h, b.h);
    }

    #[test]
    fn los_channel_is_a_phase_ramp(theta in -3.2f64..3.2, q in 2usize..64) {
        let h = sample_rician(theta, LOS_ONLY_KAPPA, q, Link::UavToUd, 9).h;
        let ratio = h[1] / h[0];
        for t in 0..q {
            prop_assert!((h[t].norm() - 1.0).abs() < 1e-12);
            if t > 0 {
                prop_assert!((h[t] / h[t - 1] - ratio).norm() < 1e-9);
            }
        }
        let a = steering_vector(theta, q);
        prop_assert!((ratio - a[1]).norm() < 1e-12);
    }
}

#[test]
fn lossless_soil_has_no_attenuation() {
    let m = permittivity_override(9.0, 0.0).unwrap();
    let (alpha, beta) = attenuation_constants(&m, 433e6, &PhysicalConstants::default());
    assert_eq!(alpha, 0.0);
    assert!(beta > 0.0);
}

#[test]
fn permittivity_is_continuous_and_rising_in_vwc() {
    let mut prev = soil_permittivity(0.0, 0.38, 433e6).unwrap();
    let h = 1e-3;
    for i in 1..=600 {
        let m = soil_permittivity(i as f64 * h, 0.38, 433e6).unwrap();
        assert!(m.eps_real > prev.eps_real, "eps' not increasing at vwc {}", i as f64 * h);
        assert!(m.eps_imag >= prev.eps_imag);
        // A jump at the bound-water transition would show up as a step far
        // larger than the local slope.
        assert!(m.eps_real - prev.eps_real < 0.2, "eps' jumps at vwc {}", i as f64 * h);
        assert!(m.eps_imag - prev.eps_imag < 0.2);
        prev = m;
    }
}

#[test]
fn centre_sensor_sits_under_the_uav() {
    let s = Scenario::default();
    let g = compute_geometry(&s, Position { x: 0.0, y: 0.0, z: -s.burial_depth });
    assert_eq!(g.air_len_v2u, s.h_uav);
    assert_relative_eq!(g.air_len_p2u, (s.d_fly.powi(2) + s.h_hap.powi(2)).sqrt(), max_relative = 1e-15);
    assert_eq!(g.soil_len, s.burial_depth);
}

#[test]
fn rician_gain_averages_to_array_size() {
    for (q, kappa) in [(8, 3.0), (32, 10.0), (4, 0.0)] {
        let total: f64 = (0..100_000u64)
            .map(|i| sample_rician(0.7, kappa, q, Link::HapToUd, i).h.iter().map(|e| e.norm_sqr()).sum::<f64>())
            .sum();
        let mean = total / 100_000.0;
        assert!((mean / q as f64 - 1.0).abs() < 0.02, "Q = {q}: mean gain {mean}");
    }
}

#[test]
fn linear_to_db_examples() {
    assert_eq!(linear_to_db(1.0), 0.0);
    assert_relative_eq!(linear_to_db(100.0), 20.0, epsilon = 1e-12);
}
