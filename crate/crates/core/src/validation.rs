//! Oracle checks behind `harness::run_validation`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde_json::Value;

use crate::allocation::{min_charging_time, required_tau, solve_time_allocation, LinkCoefficients};
use crate::channel::{steering_vector, ChannelRealization, Link};
use crate::harness::{close, record, ValidationReport};
use crate::link::{offload_time, uav_receive_power};
use crate::maxmin::{brute_force_maxmin, solve_maxmin, CVector, MaxMinInstance};
use crate::propagation::{air_loss, attenuation_constants, refraction_loss_a2u, soil_loss};
use crate::scenario::{compute_geometry, load_scenario, sample_disk, PhysicalConstants, Position, Scenario};
use crate::seed;
use crate::soil::{permittivity_override, soil_permittivity};
use crate::uav_energy::{accel_energy, hover_power, propulsion_power, round_trip_leg, UavPhysics};
use crate::wet::{incident_power, transmit_power, MotorParams, Precoder, Scheme};

fn f(v: &Value, k: &str) -> f64 {
    v[k].as_f64().unwrap_or(f64::NAN)
}

fn check(r: &mut ValidationReport, m: &'static str, name: &str, got: f64, want: f64, tol: f64) {
    record(r, m, name, close(got, want, tol), format!("got {got:.12e}, expected {want:.12e}"));
}

pub(crate) fn scenario(r: &mut ValidationReport) {
    let m = "scenario";
    let ok = load_scenario("").map(|s| s == Scenario::default()).unwrap_or(false);
    record(r, m, "empty_document_defaults", ok, String::new());
    record(r, m, "zero_sensors_rejected", load_scenario("num_uds_N = 0").is_err(), String::new());
    let s = Scenario::default();
    let g = compute_geometry(&s, Position { x: 0.0, y: 0.0, z: -0.4 });
    check(r, m, "centre_uav_distance", g.air_len_v2u, 5.5, 0.0);
    let pts = sample_disk(100_000, 5.0, 0.4, 1);
    let mean = pts.iter().map(|p| p.x.hypot(p.y)).sum::<f64>() / pts.len() as f64;
    check(r, m, "uniform_disk_mean_radius", mean, 10.0 / 3.0, 0.01);
}

pub(crate) fn soil(r: &mut ValidationReport, golden: &Value) {
    let m = "soil";
    let tol = golden["rel_tol"].as_f64().unwrap_or(1e-9);
    for p in golden["points"].as_array().into_iter().flatten() {
        let name = format!("golden_vwc{}_clay{}_f{:e}", f(p, "vwc"), f(p, "clay"), f(p, "freq"));
        match soil_permittivity(f(p, "vwc"), f(p, "clay"), f(p, "freq")) {
            Ok(s) => {
                let ok = close(s.eps_real, f(p, "eps_real"), tol) && close(s.eps_imag, f(p, "eps_imag"), tol);
                record(r, m, &name, ok, format!("got ({}, {})", s.eps_real, s.eps_imag));
            }
            Err(e) => record(r, m, &name, false, e.to_string()),
        }
    }
    let dry = soil_permittivity(0.0, 0.38, 433e6).unwrap();
    record(r, m, "oven_dry_band", (2.0..=6.0).contains(&dry.eps_real) && dry.eps_imag < 0.1, String::new());
    let a = soil_permittivity(0.1, 0.38, 433e6).unwrap();
    let b = soil_permittivity(0.3, 0.38, 433e6).unwrap();
    record(r, m, "wetter_is_denser", b.eps_real > a.eps_real, String::new());
    record(r, m, "override_rejects_subunity", permittivity_override(0.5, 1.0).is_err(), String::new());
}

pub(crate) fn propagation(r: &mut ValidationReport, golden: &Value) {
    let m = "propagation";
    let k = PhysicalConstants::default();
    let tol = golden["rel_tol"].as_f64().unwrap_or(1e-8);
    let at = &golden["attenuation"];
    let med = permittivity_override(f(at, "eps_real"), f(at, "eps_imag")).unwrap();
    let (alpha, beta) = attenuation_constants(&med, f(at, "freq"), &k);
    check(r, m, "golden_alpha", alpha, f(at, "alpha"), tol);
    check(r, m, "golden_beta", beta, f(at, "beta"), tol);
    check(r, m, "golden_soil_m", soil_loss(f(at, "depth"), alpha, beta), f(at, "soil_m"), tol);
    for (i, p) in golden["refraction"].as_array().into_iter().flatten().enumerate() {
        let med = permittivity_override(f(p, "eps_real"), f(p, "eps_imag")).unwrap();
        check(r, m, &format!("golden_refraction_{i}"), refraction_loss_a2u(&med), f(p, "k"), tol);
    }
    let j = &golden["air_loss_unit"];
    check(r, m, "golden_air_loss", air_loss(1.0, 2.0, f(j, "freq"), k.c), f(j, "j"), tol);
    let g = compute_geometry(&Scenario::default(), Position { x: 0.0, y: 0.0, z: -0.4 });
    check(r, m, "golden_hap_distance", g.air_len_p2u, f(golden, "hap_centre_distance"), tol);
    let lossless = permittivity_override(4.0, 0.0).unwrap();
    record(r, m, "lossless_alpha_zero", attenuation_constants(&lossless, 433e6, &k).0 == 0.0, String::new());
    check(r, m, "vacuum_refraction", refraction_loss_a2u(&permittivity_override(1.0, 0.0).unwrap()), 0.25, 0.0);
}

pub(crate) fn channel(r: &mut ValidationReport) {
    let m = "channel";
    let v = steering_vector(PI / 6.0, 2);
    record(r, m, "steering_pi_over_6", (v[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15, String::new());
    let mut rng = seed::rng(17, &[]);
    let n = 20_000;
    let e: f64 = (0..n)
        .map(|_| {
            ChannelRealization::draw(0.7, 3.0, 8, Link::HapToUd, &mut rng).h.iter().map(|x| x.norm_sqr()).sum::<f64>()
        })
        .sum::<f64>()
        / n as f64;
    check(r, m, "mean_channel_energy", e, 8.0, 0.02);
}

pub(crate) fn wet(r: &mut ValidationReport) {
    let m = "wet";
    let motor = MotorParams { t0_ms: 0.5, tf_ms: 20.0, voltage: 5.0, current: 0.25 };
    let rab = transmit_power(10.0, Scheme::Rab, 32, 0.38, 0.06, 0.1, &motor).map(|b| b.transmit_power);
    check(r, m, "rab_budget", rab.unwrap_or(f64::NAN), 0.38 * (10.0 - 0.06 - 0.1 - 2.0625), 1e-12);
    let full = transmit_power(10.0, Scheme::FullCsi, 32, 0.38, 0.06, 0.1, &motor).map(|b| b.transmit_power);
    check(r, m, "full_csi_budget", full.unwrap_or(f64::NAN), 0.38 * (10.0 - 32.0 * 0.06 - 0.1), 1e-12);
    record(
        r,
        m,
        "aais_budget_exhausted",
        transmit_power(10.0, Scheme::Aais, 256, 0.38, 0.06, 0.1, &motor).is_err(),
        String::new(),
    );
    for scheme in Scheme::CSI_FREE {
        let p = Precoder::csi_free(scheme, 16, 2.5).unwrap();
        let ok = p.radiated_power().iter().all(|&x| close(x, 2.5, 1e-12));
        record(r, m, &format!("power_conservation_{scheme}"), ok, String::new());
    }
    let mut rng = seed::rng(5, &[]);
    let mut same = true;
    for _ in 0..100 {
        let ch = ChannelRealization::draw(rng.random::<f64>() * PI, 2.0, 1, Link::UavToUd, &mut rng);
        let a = incident_power(&Precoder::csi_free(Scheme::Rab, 1, 1.0).unwrap(), &ch, 3.0).unwrap();
        let b = incident_power(&Precoder::csi_free(Scheme::AassII, 1, 1.0).unwrap(), &ch, 3.0).unwrap();
        same &= close(a, b, 1e-12);
    }
    record(r, m, "rab_single_antenna_is_aass2", same, String::new());
}

fn random_instance<R: Rng>(rng: &mut R, q: usize, n: usize) -> MaxMinInstance {
    let payoffs =
        (0..n).map(|_| CVector::from_iterator(q, (0..q).map(|_| crate::channel::complex_gaussian(rng)))).collect();
    MaxMinInstance::new(payoffs)
}

pub(crate) fn maxmin(r: &mut ValidationReport) {
    let m = "maxmin";
    let h = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
    let s = solve_maxmin(&MaxMinInstance::from_channels(&[&h], 1.0, &[1.0])).unwrap();
    check(r, m, "single_sensor_mrt", s.xi_csi, 2.0, 1e-9);
    let mut rng = seed::rng(2024, &[]);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let inst = random_instance(&mut rng, 2, 3);
        let a = solve_maxmin(&inst).unwrap().xi_csi;
        let (b, _) = brute_force_maxmin(&inst).unwrap();
        worst = worst.max((a - b).abs() / b);
    }
    record(r, m, "agrees_with_brute_force", worst <= 1e-3, format!("worst relative gap {worst:.2e}"));
}

pub(crate) fn uav_energy(r: &mut ValidationReport, golden: &Value) {
    let m = "uav_energy";
    let ph = UavPhysics::default();
    let tol = golden["rel_tol"].as_f64().unwrap_or(1e-8);
    check(r, m, "hover_power", hover_power(&ph), 56.2926, 1e-12);
    check(r, m, "golden_cruise_power", propulsion_power(&ph, 10.0), f(golden, "cruise_power_10"), tol);
    check(r, m, "golden_accel_energy", accel_energy(&ph), f(golden, "accel_energy"), tol);
    match round_trip_leg(&ph, 600.0) {
        Ok(leg) => {
            check(r, m, "flight_time", leg.t_fly, 70.0, 0.0);
            check(r, m, "cruise_time", leg.t_fly_v, 50.0, 0.0);
            check(r, m, "golden_leg_energy", leg.energy, f(golden, "leg_energy"), tol);
        }
        Err(e) => record(r, m, "round_trip_leg", false, e.to_string()),
    }
}

pub(crate) fn link(r: &mut ValidationReport) {
    let m = "link";
    let s = Scenario::default();
    check(r, m, "uav_receive_power", uav_receive_power(&s), 656.0, 0.005);
    check(r, m, "offload_time_calibration", offload_time(64.0 * 12.5e6, &s), 126.87, 0.01);
}

pub(crate) fn allocation(r: &mut ValidationReport) {
    let m = "allocation";
    let t = required_tau(1.0, 0.0, 100.0, 12.5e6, 125e3).unwrap_or(f64::NAN);
    check(r, m, "tau_fixed_point", t, 100.0, 1e-10);
    let (g, w) = (12.5e6, 125e3);
    let k = [LinkCoefficients { c: 1.0, b: 0.0 }];
    match solve_time_allocation(&k, &[g], w) {
        Ok(a) => {
            let obj = a.t_p2 + a.taus[0];
            let grid = (1..100_000)
                .map(|i| {
                    let t2 = 69.4 + i as f64 * 2e-3;
                    t2 + required_tau(1.0, 0.0, t2, g, w).unwrap()
                })
                .fold(f64::INFINITY, f64::min);
            check(r, m, "single_sensor_grid_oracle", obj, grid, 1e-4);
            record(r, m, "kkt_residual", a.kkt_residual <= 1e-6 * g, format!("{:.3e} bits", a.kkt_residual));
        }
        Err(e) => record(r, m, "single_sensor_grid_oracle", false, e.to_string()),
    }
    check(r, m, "charging_time", min_charging_time(56_450.0, &Scenario::default()), 79.23, 0.005);
}
