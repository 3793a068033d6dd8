//! One test per acceptance criterion. Each prints a PASS/FAIL line per
//! sub-check, then fails if any sub-check failed.
//!
//! Monte Carlo criteria use seed 1 and 500 trials/draws.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wpucn::allocation::{
    expected_incident_powers, min_charging_time, plan_from_powers, required_tau, solve_time_allocation,
    throughput_constraint, ApproachKind, Field, LinkCoefficients, WetApproach,
};
use wpucn::channel::{complex_gaussian, sample_rician, ChannelRealization, Link};
use wpucn::harness::{default_series, run_allocation_table, run_wet_sweep, MetricRow, SweepAxis, SweepSpec};
use wpucn::link::offload_time;
use wpucn::maxmin::{brute_force_maxmin, solve_maxmin, CVector, MaxMinInstance};
use wpucn::uav_energy::{hover_power, round_trip_leg, UavPhysics};
use wpucn::wet::{incident_power, Precoder, Scheme};
use wpucn::Scenario;

const SEED: u64 = 1;
const TRIALS: usize = 500;

struct Report {
    criterion: u32,
    failed: Vec<String>,
}

impl Report {
    fn new(criterion: u32) -> Self {
        Self { criterion, failed: Vec::new() }
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        println!("{} criterion {} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, self.criterion);
        if !pass {
            self.failed.push(name.to_string());
        }
    }

    fn finish(self) {
        assert!(self.failed.is_empty(), "criterion {} failed: {:?}", self.criterion, self.failed);
    }
}

fn within_rel(got: f64, want: f64, tol: f64) -> bool {
    (got / want - 1.0).abs() <= tol
}

#[test]
fn criterion_01_hover_power() {
    let mut r = Report::new(1);
    let p = hover_power(&UavPhysics::default());
    r.check("P(0)", (p - 56.2926).abs() <= 1e-9, format!("{p:.6} W, expected 56.2926 W"));
    r.finish();
}

#[test]
fn criterion_02_flight_time() {
    let mut r = Report::new(2);
    let leg = round_trip_leg(&UavPhysics::default(), 600.0).unwrap();
    r.check("T_fly", (leg.t_fly - 70.0).abs() <= 1e-9, format!("{} s, expected 70 s", leg.t_fly));
    r.check("T_fly_V", (leg.t_fly_v - 50.0).abs() <= 1e-9, format!("{} s, expected 50 s", leg.t_fly_v));
    r.finish();
}

#[test]
fn criterion_03_charging_time() {
    const TOL: f64 = 0.005;
    let mut r = Report::new(3);
    let t = min_charging_time(56_450.0, &Scenario::default());
    r.check("T_p1", within_rel(t, 79.23, TOL), format!("{t:.3} s, expected 79.23 s +/- 0.5%"));
    r.finish();
}

#[test]
fn criterion_04_offload_time() {
    const TOL: f64 = 0.01;
    let mut r = Report::new(4);
    let s = Scenario::default();
    let t = offload_time(64.0 * 12.5e6, &s);
    r.check("T_p4", within_rel(t, 126.87, TOL), format!("{t:.3} s, expected 126.87 s +/- 1%"));
    r.finish();
}

/// (label, csi, E_s kJ, T_total s) in the order the table is produced.
const TABLE: [(&str, &str, f64, f64); 6] = [
    ("PS", "full-CSI", 66.07, 1161.96),
    ("UAV", "full-CSI", 64.41, 1123.66),
    ("Hybrid", "full-CSI", 59.16, 1030.22),
    ("PS", "CSI-free", 65.20, 1145.95),
    ("UAV", "CSI-free", 59.66, 1036.46),
    ("Hybrid", "CSI-free", 56.45, 979.49),
];

fn ranking(xs: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    idx
}

#[test]
fn criterion_05_allocation_table() {
    const TOL: f64 = 0.08;
    let mut r = Report::new(5);
    let s = Scenario { fading_draws: TRIALS, ..Scenario::default() };
    let rows = run_allocation_table(&s, SEED).unwrap();
    assert_eq!(rows.len(), TABLE.len());
    for (row, (kind, csi, e, t)) in rows.iter().zip(TABLE) {
        assert!(row.approach.starts_with(kind) && row.csi == csi, "row order changed: {} {}", row.approach, row.csi);
        let name = format!("{kind} {csi}");
        r.check(
            &format!("{name} E_s"),
            within_rel(row.e_s_kj, e, TOL),
            format!("{:.2} kJ vs {e} kJ +/- 8%", row.e_s_kj),
        );
        r.check(
            &format!("{name} T_total"),
            within_rel(row.t_total, t, TOL),
            format!("{:.2} s vs {t} s +/- 8%", row.t_total),
        );
    }
    let energy: Vec<f64> = rows.iter().map(|x| x.e_s_kj).collect();
    let time: Vec<f64> = rows.iter().map(|x| x.t_total).collect();
    let paper_energy: Vec<f64> = TABLE.iter().map(|x| x.2).collect();
    let paper_time: Vec<f64> = TABLE.iter().map(|x| x.3).collect();
    let names =
        |o: Vec<usize>| o.iter().map(|&i| format!("{} {}", TABLE[i].0, TABLE[i].1)).collect::<Vec<_>>().join(" < ");
    r.check(
        "hybrid CSI-free minimal",
        ranking(&energy)[0] == 5 && ranking(&time)[0] == 5,
        format!("min E_s row {}, min T_total row {}", names(vec![ranking(&energy)[0]]), names(vec![ranking(&time)[0]])),
    );
    r.check(
        "E_s ordering",
        ranking(&energy) == ranking(&paper_energy),
        format!("got {}; published {}", names(ranking(&energy)), names(ranking(&paper_energy))),
    );
    r.check(
        "T_total ordering",
        ranking(&time) == ranking(&paper_time),
        format!("got {}; published {}", names(ranking(&time)), names(ranking(&paper_time))),
    );
    r.finish();
}

fn sweep(axis: SweepAxis, values: Vec<f64>, approaches: Vec<WetApproach>) -> Vec<MetricRow> {
    let spec = SweepSpec { axis, values, approaches, trials: TRIALS, base: Scenario::default(), seed: SEED };
    run_wet_sweep(&spec).unwrap()
}

fn metric(rows: &[MetricRow], axis: f64, approach: &str, scheme: &str) -> f64 {
    rows.iter()
        .find(|r| r.axis == axis && r.approach == approach && r.scheme == scheme)
        .and_then(|r| r.avg_worst_case_dbm)
        .unwrap_or(f64::NEG_INFINITY)
}

#[test]
fn criterion_06_antenna_sweep_shape() {
    let mut r = Report::new(6);
    let qs = vec![8.0, 16.0, 32.0, 64.0];
    let mut series: Vec<WetApproach> = [Scheme::Sa, Scheme::Aais, Scheme::AassI, Scheme::AassII]
        .into_iter()
        .map(|s| WetApproach::new(ApproachKind::TraditionalPs, s, Scheme::Rab))
        .collect();
    series.push(WetApproach::new(ApproachKind::UavWet, Scheme::AassII, Scheme::Rab));
    let rows = sweep(SweepAxis::NumAntennas, qs.clone(), series);
    for &q in &qs {
        let best = metric(&rows, q, "PS", "AASS-II");
        let others = ["SA", "AAIS", "AASS-I"].map(|s| metric(&rows, q, "PS", s));
        let runner_up = others.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        r.check(
            &format!("PS AASS-II dominates at Q = {q}"),
            others.iter().all(|&o| best > o),
            format!("AASS-II {best:.2} dBm, best other {runner_up:.2} dBm"),
        );
    }
    let (m32, m64) = (metric(&rows, 32.0, "UAV", "RAB"), metric(&rows, 64.0, "UAV", "RAB"));
    r.check("UAV RAB falls past Q = 32", m32 > m64, format!("Q = 32 {m32:.2} dBm, Q = 64 {m64:.2} dBm"));
    r.finish();
}

#[test]
fn criterion_07_depth_sweep() {
    const DROP: f64 = 30.0;
    const DROP_TOL: f64 = 5.0;
    const ABS: f64 = -18.51;
    const ABS_TOL: f64 = 3.0;
    let mut r = Report::new(7);
    let rows = sweep(SweepAxis::BurialDepth, vec![0.2, 1.0], vec![WetApproach::csi_free(ApproachKind::Hybrid)]);
    let (shallow, deep) = (metric(&rows, 0.2, "Hybrid", "AASS-II+RAB"), metric(&rows, 1.0, "Hybrid", "AASS-II+RAB"));
    let drop = shallow - deep;
    r.check(
        "drop 0.2 m to 1.0 m",
        (drop - DROP).abs() <= DROP_TOL,
        format!("{drop:.2} dB, expected {DROP} +/- {DROP_TOL} dB"),
    );
    r.check(
        "hybrid at 1.0 m",
        (deep - ABS).abs() <= ABS_TOL,
        format!("{deep:.2} dBm, expected {ABS} +/- {ABS_TOL} dBm"),
    );
    r.finish();
}

#[test]
fn criterion_08_moisture_sweep() {
    const TOL: f64 = 3.0;
    const PSI: f64 = -22.0;
    let mut r = Report::new(8);
    let rows = sweep(SweepAxis::Vwc, vec![0.1, 0.4], default_series());
    let (dry, wet) = (metric(&rows, 0.1, "Hybrid", "AASS-II+RAB"), metric(&rows, 0.4, "Hybrid", "AASS-II+RAB"));
    r.check("hybrid at m_v = 0.1", (dry - 5.63).abs() <= TOL, format!("{dry:.2} dBm, expected 5.63 +/- {TOL} dBm"));
    r.check("hybrid at m_v = 0.4", (wet + 23.18).abs() <= TOL, format!("{wet:.2} dBm, expected -23.18 +/- {TOL} dBm"));
    let worst =
        rows.iter().filter(|x| x.axis == 0.4).filter_map(|x| x.avg_worst_case_dbm).fold(f64::NEG_INFINITY, f64::max);
    r.check("all below psi + 2 dB at m_v = 0.4", worst < PSI + 2.0, format!("largest metric {worst:.2} dBm"));
    r.finish();
}

#[test]
fn criterion_09_throughput_energy() {
    const TOL_POINTS: f64 = 3.0;
    let mut r = Report::new(9);
    let base = Scenario { fading_draws: TRIALS, ..Scenario::default() };
    let field = Field::sample(&base, SEED).unwrap();
    // Incident powers do not depend on the data volume, so both volumes share them.
    let xi = |hap: bool, scheme| expected_incident_powers(&base, &field, hap, scheme, TRIALS, SEED).unwrap();
    let classes = [
        ("full-CSI", Scheme::FullCsi, Scheme::FullCsi, xi(true, Scheme::FullCsi), xi(false, Scheme::FullCsi)),
        ("CSI-free", Scheme::AassII, Scheme::Rab, xi(true, Scheme::AassII), xi(false, Scheme::Rab)),
    ];
    for gamma in [12.5e6, 125e6] {
        let s = Scenario { throughput_gamma: gamma, ..base.clone() };
        for (csi, hs, us, xh, xu) in &classes {
            let e = |kind| {
                plan_from_powers(&s, WetApproach::new(kind, *hs, *us), &field, xh, xu).unwrap().energy.total / 1e3
            };
            let (ps, uav, hy) = (e(ApproachKind::TraditionalPs), e(ApproachKind::UavWet), e(ApproachKind::Hybrid));
            let mbit = gamma / 1e6;
            r.check(
                &format!("{csi} hybrid cheapest at {mbit} Mbit"),
                hy < ps && hy < uav,
                format!("PS {ps:.2} kJ, UAV {uav:.2} kJ, Hybrid {hy:.2} kJ"),
            );
            if gamma == 125e6 && *csi == "full-CSI" {
                let (vs_ps, vs_uav) = (100.0 * (1.0 - hy / ps), 100.0 * (1.0 - hy / uav));
                r.check(
                    "full-CSI reduction vs PS at 125 Mbit",
                    (vs_ps - 8.15).abs() <= TOL_POINTS,
                    format!("{vs_ps:.2}%, expected 8.15 +/- {TOL_POINTS} points"),
                );
                r.check(
                    "full-CSI reduction vs UAV at 125 Mbit",
                    (vs_uav - 10.74).abs() <= TOL_POINTS,
                    format!("{vs_uav:.2}%, expected 10.74 +/- {TOL_POINTS} points"),
                );
            }
        }
    }
    r.finish();
}

const W: f64 = 125e3;

fn allocation_objective(k: &[LinkCoefficients], gammas: &[f64], t2: f64) -> f64 {
    t2 + k.iter().zip(gammas).map(|(k, &g)| required_tau(k.c, k.b, t2, g, W).unwrap_or(f64::INFINITY)).sum::<f64>()
}

/// Independent 1-D search: log-spaced scan, then linear zooms.
fn grid_search(k: &[LinkCoefficients], gammas: &[f64]) -> f64 {
    let lo = k.iter().zip(gammas).map(|(k, g)| (g * LN_2 / W - k.b) / k.c).fold(0.0, f64::max) * (1.0 + 1e-10) + 1e-9;
    let hi = (lo + 1.0) * 1e4;
    let h = |t: f64| allocation_objective(k, gammas, t);
    let argmin = |pts: &[f64]| (0..pts.len()).min_by(|&a, &b| h(pts[a]).total_cmp(&h(pts[b]))).unwrap();
    let mut pts: Vec<f64> =
        (0..=4000).map(|i| lo + (hi - lo) * ((i as f64 / 4000.0 * 12.0).exp() - 1.0) / (12f64.exp() - 1.0)).collect();
    let mut best = f64::INFINITY;
    for _ in 0..5 {
        let i = argmin(&pts);
        best = best.min(h(pts[i]));
        let (a, b) = (pts[i.saturating_sub(1)], pts[(i + 1).min(pts.len() - 1)]);
        pts = (0..=2000).map(|j| a + (b - a) * j as f64 / 2000.0).collect();
    }
    best
}

#[test]
fn criterion_10_solver_oracles() {
    let mut r = Report::new(10);
    let mut rng = ChaCha8Rng::seed_from_u64(10);

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..7);
        let inst = MaxMinInstance::new(
            (0..n)
                .map(|_| {
                    let s = rng.random_range(0.2..5.0);
                    CVector::from_fn(2, |_, _| complex_gaussian(&mut rng) * s)
                })
                .collect(),
        );
        let (brute, _) = brute_force_maxmin(&inst).unwrap();
        worst = worst.max((solve_maxmin(&inst).unwrap().xi_csi - brute).abs() / brute);
    }
    r.check("max-min vs exhaustive search, 100 instances", worst <= 1e-3, format!("worst relative gap {worst:.2e}"));

    let mut worst: f64 = 0.0;
    for n in std::iter::repeat_n(1, 20).chain(std::iter::repeat_n(2, 5)) {
        let (k, g): (Vec<_>, Vec<_>) = (0..n)
            .map(|_| {
                let c = 10f64.powf(rng.random_range(-1.5..1.0));
                let b = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..150.0) };
                (LinkCoefficients { c, b }, rng.random_range(1e5..2e7))
            })
            .unzip();
        let a = solve_time_allocation(&k, &g, W).unwrap();
        let got = a.t_p2 + a.taus.iter().sum::<f64>();
        worst = worst.max((got / grid_search(&k, &g) - 1.0).abs());
    }
    r.check("allocation vs grid search, 20 + 5 instances", worst <= 1e-4, format!("worst relative gap {worst:.2e}"));

    let s = Scenario { num_uds: 16, fading_draws: 50, ..Scenario::default() };
    let mut worst_kkt: f64 = 0.0;
    for seed in 1..=3 {
        let field = Field::sample(&s, seed).unwrap();
        let xi = |hap, scheme| expected_incident_powers(&s, &field, hap, scheme, s.fading_draws, seed).unwrap();
        for (hs, us) in [(Scheme::FullCsi, Scheme::FullCsi), (Scheme::AassII, Scheme::Rab)] {
            let (xh, xu) = (xi(true, hs), xi(false, us));
            for kind in [ApproachKind::TraditionalPs, ApproachKind::UavWet, ApproachKind::Hybrid] {
                let p = plan_from_powers(&s, WetApproach::new(kind, hs, us), &field, &xh, &xu).unwrap();
                worst_kkt = worst_kkt.max(p.kkt_residual / s.throughput_gamma);
            }
        }
    }
    r.check("KKT residual on every plan", worst_kkt <= 1e-6, format!("worst residual {worst_kkt:.2e} gamma"));
    r.finish();
}

#[test]
fn criterion_11_property_suites() {
    let mut r = Report::new(11);
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let q = rng.random_range(1..65);
        let p = rng.random_range(1e-3..100.0);
        for scheme in Scheme::CSI_FREE {
            for radiated in Precoder::csi_free(scheme, q, p).unwrap().radiated_power() {
                worst = worst.max((radiated / p - 1.0).abs());
            }
        }
        let g = nalgebra::DMatrix::from_fn(q, q, |_, _| complex_gaussian(&mut rng));
        let v = &g * g.adjoint();
        let v = &v / v.trace();
        worst = worst.max((Precoder::full_csi(p, v).unwrap().radiated_power()[0] / p - 1.0).abs());
    }
    r.check("power conservation, 1000 draws", worst <= 1e-12, format!("worst relative error {worst:.2e}"));

    let q = 16;
    let draws = 100_000u64;
    let mean = (0..draws)
        .map(|i| sample_rician(0.4, 3.0, q, Link::HapToUd, i).h.iter().map(|e| e.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        / draws as f64;
    r.check("E|h|^2 = Q", within_rel(mean, q as f64, 0.02), format!("{mean:.4} for Q = {q} over {draws} draws"));

    let (mut worst_flat, mut worst_z) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let k = LinkCoefficients { c: 10f64.powf(rng.random_range(-1.0..1.0)), b: rng.random_range(0.0..100.0) };
        let (gamma, tau, t2) =
            (rng.random_range(1e6..2e7), rng.random_range(20.0..400.0), rng.random_range(0.0..200.0));
        let f = |x: f64, y: f64| throughput_constraint(&k, x, y, gamma, W);
        let x = gamma * LN_2 / (tau * W);
        let z11 = gamma * gamma * LN_2 * LN_2 / (k.c * W * W * tau.powi(3)) * x.exp();
        let ht = 1e-3 * tau;
        let hs = 1.0;
        let f_tt = (f(tau + ht, t2) - 2.0 * f(tau, t2) + f(tau - ht, t2)) / (ht * ht);
        let f_ss = (f(tau, t2 + hs) - 2.0 * f(tau, t2) + f(tau, t2 - hs)) / (hs * hs);
        let f_ts = (f(tau + ht, t2 + hs) - f(tau + ht, t2 - hs) - f(tau - ht, t2 + hs) + f(tau - ht, t2 - hs))
            / (4.0 * ht * hs);
        worst_flat = worst_flat.max(f_ss.abs().max(f_ts.abs()) / z11.max(f(tau, t2).abs()));
        worst_z = worst_z.max(if f_tt > 0.0 { (f_tt / z11 - 1.0).abs() } else { f64::INFINITY });
    }
    r.check("Hessian zero entries", worst_flat <= 1e-6, format!("largest relative entry {worst_flat:.2e}"));
    r.check("Hessian curvature entry", worst_z <= 1e-2, format!("worst relative error {worst_z:.2e}"));

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let ch = ChannelRealization::draw(
            rng.random_range(-3.2..3.2),
            rng.random_range(0.0..20.0),
            1,
            Link::UavToUd,
            &mut rng,
        );
        let rab = incident_power(&Precoder::csi_free(Scheme::Rab, 1, 2.0).unwrap(), &ch, 10.0).unwrap();
        let aass = incident_power(&Precoder::csi_free(Scheme::AassII, 1, 2.0).unwrap(), &ch, 10.0).unwrap();
        worst = worst.max((rab - aass).abs() / aass.max(f64::MIN_POSITIVE));
    }
    r.check("RAB(Q = 1) equals AASS-II", worst <= 1e-12, format!("worst relative difference {worst:.2e}"));
    r.finish();
}
