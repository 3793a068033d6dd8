//! Energy-minimal time allocation over the four mission phases.
//!
//! Phase 1: the HAP charges the UAV. Phase 2 (`T_p2`): the sensors are powered
//! by the HAP, the UAV or both. Phase 3: each sensor n uploads for `tau_n`
//! seconds. Phase 4 (`T_p4`): the UAV offloads everything to the HAP.
//!
//! With `x_n = C_n T_p2 + b_n` the accumulated uplink SNR-energy of sensor n,
//! its throughput is `tau_n W log2(1 + x_n / tau_n)`. Requiring `gamma_n`
//! bits and minimizing `T_p2 + sum tau_n` is convex; for fixed `T_p2` each
//! constraint binds and gives `tau_n` in closed implicit form, leaving a 1-D
//! convex search over `T_p2`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelRealization, Link};
use crate::error::{Error, Result};
use crate::link::{offload_time, uav_receive_power};
use crate::maxmin::{solve_maxmin, MaxMinInstance};
use crate::numeric::{golden_section, safeguarded_newton};
use crate::propagation::{total_downlink_loss, uplink_loss, Source};
use crate::scenario::{compute_geometry, sample_ud_positions, Position, Scenario, UdGeometry};
use crate::seed;
use crate::soil::scenario_medium;
use crate::uav_energy::{hover_power, round_trip_leg, total_uav_energy, EnergyBreakdown, UavPhysics};
use crate::wet::{incident_power, scenario_transmit_power, Precoder, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ApproachKind {
    #[serde(rename = "PS")]
    TraditionalPs,
    #[serde(rename = "UAV")]
    UavWet,
    #[serde(rename = "Hybrid")]
    Hybrid,
}

impl ApproachKind {
    pub fn name(self) -> &'static str {
        match self {
            ApproachKind::TraditionalPs => "PS",
            ApproachKind::UavWet => "UAV",
            ApproachKind::Hybrid => "Hybrid",
        }
    }

    pub fn uses_hap(self) -> bool {
        self != ApproachKind::UavWet
    }

    pub fn uses_uav(self) -> bool {
        self != ApproachKind::TraditionalPs
    }
}

impl fmt::Display for ApproachKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ApproachKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ps" | "traditional" | "traditional-ps" | "hap" => Ok(ApproachKind::TraditionalPs),
            "uav" | "uav-wet" => Ok(ApproachKind::UavWet),
            "hybrid" => Ok(ApproachKind::Hybrid),
            _ => Err(Error::Parse(format!("unknown approach '{s}'"))),
        }
    }
}

/// Which power sources run during phase 2 and with which scheme. The scheme of
/// an unused source is carried along but ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WetApproach {
    pub kind: ApproachKind,
    pub hap_scheme: Scheme,
    pub uav_scheme: Scheme,
}

impl WetApproach {
    pub fn new(kind: ApproachKind, hap_scheme: Scheme, uav_scheme: Scheme) -> Self {
        Self { kind, hap_scheme, uav_scheme }
    }

    /// AASS-II at the HAP, RAB at the UAV.
    pub fn csi_free(kind: ApproachKind) -> Self {
        Self::new(kind, Scheme::AassII, Scheme::Rab)
    }

    pub fn full_csi(kind: ApproachKind) -> Self {
        Self::new(kind, Scheme::FullCsi, Scheme::FullCsi)
    }

    pub fn label(&self) -> String {
        match self.kind {
            ApproachKind::TraditionalPs => format!("PS ({})", self.hap_scheme),
            ApproachKind::UavWet => format!("UAV ({})", self.uav_scheme),
            ApproachKind::Hybrid if self.hap_scheme == self.uav_scheme => format!("Hybrid ({})", self.hap_scheme),
            ApproachKind::Hybrid => format!("Hybrid ({}+{})", self.hap_scheme, self.uav_scheme),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkCoefficients {
    /// SNR-energy accrued per second of phase 2.
    pub c: f64,
    /// SNR-energy accrued from HAP charging while the UAV flies in.
    pub b: f64,
}

/// Coefficients of one sensor. `xi_hap` and `xi_uav` are expected incident
/// powers before antenna gains; the unused one is ignored.
pub fn link_coefficients(
    kind: ApproachKind,
    s: &Scenario,
    uplink: f64,
    xi_hap: f64,
    xi_uav: f64,
    t_fly: f64,
) -> LinkCoefficients {
    let scale = s.wit_portion_phi * s.energy_conv_zeta * s.g_ud() * s.g_uav() / (uplink * s.noise_power());
    let hap = s.g_hap() * xi_hap;
    let uav = s.g_uav() * xi_uav;
    match kind {
        ApproachKind::TraditionalPs => LinkCoefficients { c: scale * hap, b: scale * t_fly * hap },
        ApproachKind::UavWet => LinkCoefficients { c: scale * uav, b: 0.0 },
        ApproachKind::Hybrid => LinkCoefficients { c: scale * (hap + uav), b: scale * t_fly * hap },
    }
}

/// `ln((2^x - 1) / x)` and its derivative, stable for small and large x.
fn ln_phi(x: f64) -> (f64, f64) {
    let c = LN_2;
    let value = if x < 1.0 { ((c * x).exp_m1() / x).ln() } else { c * x + (-(-c * x).exp_m1()).ln() - x.ln() };
    (value, c / (-(-c * x).exp_m1()) - 1.0 / x)
}

/// Shortest upload slot meeting `gamma` bits given SNR-energy `c * t2 + b`.
pub fn required_tau(c: f64, b: f64, t2: f64, gamma: f64, w: f64) -> Result<f64> {
    let rhs = c * t2 + b;
    let floor = gamma * LN_2 / w;
    if !(rhs > floor) {
        return Err(Error::InfeasibleEnergy { available: rhs, required: floor });
    }
    // Substituting x = gamma / (tau W) turns the constraint into (2^x - 1)/x = k.
    let ln_k = (rhs * w / gamma).ln();
    let mut hi = 1.0;
    while ln_phi(hi).0 < ln_k {
        hi *= 2.0;
    }
    let x = safeguarded_newton(
        |x| {
            let (v, d) = ln_phi(x);
            (v - ln_k, d)
        },
        1e-300,
        hi,
        1e-15,
    );
    Ok(gamma / (w * x))
}

/// Throughput constraint in convex form, `tau/C (2^(gamma/(tau W)) - 1) - b/C - T_p2`;
/// nonpositive exactly when the sensor meets `gamma`.
pub fn throughput_constraint(k: &LinkCoefficients, tau: f64, t2: f64, gamma: f64, w: f64) -> f64 {
    tau / k.c * (gamma * LN_2 / (tau * w)).exp_m1() - k.b / k.c - t2
}

/// Bits delivered with slot `tau` and SNR-energy `x`.
pub fn throughput_bits(tau: f64, x: f64, w: f64) -> f64 {
    tau * w * (x / tau).ln_1p() / LN_2
}

pub const MIN_TIME: f64 = 1e-9;
pub const GOLDEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub t_p2: f64,
    pub taus: Vec<f64>,
    /// Largest `|R_n - gamma_n|`, bits.
    pub kkt_residual: f64,
}

/// Minimizes `T_p2 + sum_n tau_n` subject to every sensor delivering `gammas[n]` bits.
pub fn solve_time_allocation(coeffs: &[LinkCoefficients], gammas: &[f64], w: f64) -> Result<Allocation> {
    if coeffs.len() != gammas.len() {
        return Err(Error::DimensionMismatch { expected: coeffs.len(), got: gammas.len() });
    }
    if let Some(bad) = coeffs.iter().find(|k| !(k.c > 0.0) || !(k.b >= 0.0)) {
        return Err(Error::Infeasible(format!("non-positive link coefficient C = {}, b = {}", bad.c, bad.b)));
    }
    let t_min = coeffs.iter().zip(gammas).map(|(k, g)| (g * LN_2 / w - k.b) / k.c).fold(0.0, f64::max);
    let lo = t_min * (1.0 + 1e-12) + MIN_TIME;

    let taus_at = |t2: f64| -> Option<Vec<f64>> {
        coeffs
            .iter()
            .zip(gammas)
            .map(|(k, &g)| required_tau(k.c, k.b, t2, g, w).ok().map(|t| t.max(MIN_TIME)))
            .collect()
    };
    let h = |t2: f64| taus_at(t2).map_or(f64::INFINITY, |ts| t2 + ts.iter().sum::<f64>());

    // Expand geometrically until h turns upwards; h is convex so the minimum
    // lies between the last three probes.
    let step0 = lo.max(gammas.iter().cloned().fold(0.0, f64::max) / w * 1e-6).max(1e-6);
    let (mut a, mut mid) = (lo, lo + step0);
    let mut f_mid = h(mid);
    let mut step = step0;
    let b = if h(lo) <= f_mid {
        mid
    } else {
        loop {
            step *= 2.0;
            let next = lo + step;
            let f_next = h(next);
            if f_next > f_mid {
                break next;
            }
            if step > 1e12 {
                return Err(Error::Infeasible("time allocation diverges".into()));
            }
            a = mid;
            mid = next;
            f_mid = f_next;
        }
    };
    let (t2, _) = golden_section(h, a, b, GOLDEN_TOL);
    let taus = taus_at(t2).ok_or_else(|| Error::Infeasible("no feasible slot at optimum".into()))?;
    let kkt_residual = coeffs
        .iter()
        .zip(gammas)
        .zip(&taus)
        .map(|((k, g), &tau)| (throughput_bits(tau, k.c * t2 + k.b, w) - g).abs())
        .fold(0.0, f64::max);
    Ok(Allocation { t_p2: t2, taus, kkt_residual })
}

/// Phase-1 duration needed to bank `e_s` joules. The hover power enters with
/// a plus sign, matching the published charging-time expression.
pub fn min_charging_time(e_s: f64, s: &Scenario) -> f64 {
    e_s / (uav_receive_power(s) + hover_power(&UavPhysics::from_scenario(s)))
}

/// Sensor positions with their losses towards both sources.
#[derive(Debug, Clone)]
pub struct Field {
    pub geometry: Vec<UdGeometry>,
    pub delta_hap: Vec<f64>,
    pub delta_uav: Vec<f64>,
    /// Sensor-to-UAV loss.
    pub uplink: Vec<f64>,
}

impl Field {
    pub fn sample(s: &Scenario, seed_value: u64) -> Result<Self> {
        Self::from_positions(s, &sample_ud_positions(s, seed_value))
    }

    pub fn from_positions(s: &Scenario, positions: &[Position]) -> Result<Self> {
        let medium = scenario_medium(s)?;
        let k = s.constants();
        let f = s.carrier_freq;
        let geometry: Vec<UdGeometry> = positions.iter().map(|&p| compute_geometry(s, p)).collect();
        Ok(Self {
            delta_hap: geometry
                .iter()
                .map(|g| total_downlink_loss(g, Source::Hap, &medium, s.pathloss_exp_p2u, f, &k).total_delta)
                .collect(),
            delta_uav: geometry
                .iter()
                .map(|g| total_downlink_loss(g, Source::Uav, &medium, s.pathloss_exp_v2u, f, &k).total_delta)
                .collect(),
            uplink: geometry.iter().map(|g| uplink_loss(g, Source::Uav, &medium, s.pathloss_exp_v2u, f, &k)).collect(),
            geometry,
        })
    }

    pub fn len(&self) -> usize {
        self.geometry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geometry.is_empty()
    }

    fn link(&self, hap: bool) -> (Vec<f64>, &[f64]) {
        if hap {
            (self.geometry.iter().map(|g| g.azimuth_p2u).collect(), &self.delta_hap)
        } else {
            (self.geometry.iter().map(|g| g.azimuth_v2u).collect(), &self.delta_uav)
        }
    }
}

/// One fading draw for every sensor towards one source.
pub fn draw_channels<R: rand::Rng + ?Sized>(
    s: &Scenario,
    field: &Field,
    hap: bool,
    rng: &mut R,
) -> Vec<ChannelRealization> {
    let (thetas, _) = field.link(hap);
    let (kappa, link) = if hap { (s.kappa_p2u(), Link::HapToUd) } else { (s.kappa_v2u(), Link::UavToUd) };
    thetas.iter().map(|&t| ChannelRealization::draw(t, kappa, s.num_antennas, link, rng)).collect()
}

/// Incident power at every sensor for one set of channel draws.
pub fn incident_powers(
    s: &Scenario,
    field: &Field,
    hap: bool,
    scheme: Scheme,
    channels: &[ChannelRealization],
) -> Result<Vec<f64>> {
    let p = scenario_transmit_power(s, scheme, hap)?.transmit_power;
    let (_, deltas) = field.link(hap);
    if scheme == Scheme::FullCsi {
        let hs: Vec<&[Complex64]> = channels.iter().map(|c| c.h.as_slice()).collect();
        let sol = solve_maxmin(&MaxMinInstance::from_channels(&hs, p, deltas))?;
        let pre = Precoder::full_csi(p, sol.v)?;
        return channels.iter().zip(deltas).map(|(c, &d)| incident_power(&pre, c, d)).collect();
    }
    let pre = Precoder::csi_free(scheme, s.num_antennas, p)?;
    channels.iter().zip(deltas).map(|(c, &d)| incident_power(&pre, c, d)).collect()
}

/// Mean incident power per sensor over `draws` fading realizations.
pub fn expected_incident_powers(
    s: &Scenario,
    field: &Field,
    hap: bool,
    scheme: Scheme,
    draws: usize,
    seed_value: u64,
) -> Result<Vec<f64>> {
    let tag = if hap { seed::stream::FADING_HAP } else { seed::stream::FADING_UAV };
    let per_draw: Vec<Vec<f64>> = (0..draws)
        .into_par_iter()
        .map(|d| {
            let mut rng = seed::rng(seed_value, &[tag, d as u64]);
            let channels = draw_channels(s, field, hap, &mut rng);
            incident_powers(s, field, hap, scheme, &channels)
        })
        .collect::<Result<_>>()?;
    let mut mean = vec![0.0; field.len()];
    for row in &per_draw {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x / draws as f64;
        }
    }
    Ok(mean)
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeAllocationPlan {
    pub approach: WetApproach,
    pub t_p1: f64,
    pub t_p2: f64,
    pub taus: Vec<f64>,
    pub t_p3: f64,
    pub t_p4: f64,
    pub t_total: f64,
    pub t_fly: f64,
    pub energy: EnergyBreakdown,
    pub feasible: bool,
    pub kkt_residual: f64,
    pub coefficients: Vec<LinkCoefficients>,
}

/// Builds the plan from precomputed expected incident powers. Powers of a
/// source the approach does not use may be empty.
pub fn plan_from_powers(
    s: &Scenario,
    approach: WetApproach,
    field: &Field,
    xi_hap: &[f64],
    xi_uav: &[f64],
) -> Result<TimeAllocationPlan> {
    let n = field.len();
    for (used, xs) in [(approach.kind.uses_hap(), xi_hap), (approach.kind.uses_uav(), xi_uav)] {
        if used && xs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: xs.len() });
        }
    }
    let physics = UavPhysics::from_scenario(s);
    let leg = round_trip_leg(&physics, s.d_fly)?;
    let pick = |xs: &[f64], i: usize| xs.get(i).copied().unwrap_or(0.0);
    let coefficients: Vec<LinkCoefficients> = (0..n)
        .map(|i| link_coefficients(approach.kind, s, field.uplink[i], pick(xi_hap, i), pick(xi_uav, i), leg.t_fly))
        .collect();
    let gammas = vec![s.throughput_gamma; n];
    let alloc = solve_time_allocation(&coefficients, &gammas, s.bandwidth)?;
    let t_p3: f64 = alloc.taus.iter().sum();
    let delivered: f64 = coefficients
        .iter()
        .zip(&alloc.taus)
        .map(|(k, &tau)| throughput_bits(tau, k.c * alloc.t_p2 + k.b, s.bandwidth))
        .sum();
    let t_p4 = offload_time(delivered, s);
    let energy = total_uav_energy(&physics, s.p_uav(), alloc.t_p2, t_p3, t_p4, s.d_fly)?;
    let t_p1 = min_charging_time(energy.total, s);
    Ok(TimeAllocationPlan {
        approach,
        t_p1,
        t_p2: alloc.t_p2,
        t_p3,
        t_p4,
        t_total: t_p1 + alloc.t_p2 + t_p3 + t_p4,
        t_fly: leg.t_fly,
        energy,
        feasible: alloc.kkt_residual <= 1e-6 * s.throughput_gamma,
        kkt_residual: alloc.kkt_residual,
        coefficients,
        taus: alloc.taus,
    })
}

/// Samples sensors, estimates incident powers with `fading_draws` draws and
/// solves the allocation.
pub fn plan(s: &Scenario, approach: WetApproach, seed_value: u64) -> Result<TimeAllocationPlan> {
    s.validate()?;
    let field = Field::sample(s, seed_value)?;
    let xi_hap = if approach.kind.uses_hap() {
        expected_incident_powers(s, &field, true, approach.hap_scheme, s.fading_draws, seed_value)?
    } else {
        Vec::new()
    };
    let xi_uav = if approach.kind.uses_uav() {
        expected_incident_powers(s, &field, false, approach.uav_scheme, s.fading_draws, seed_value)?
    } else {
        Vec::new()
    };
    plan_from_powers(s, approach, &field, &xi_hap, &xi_uav)
}
