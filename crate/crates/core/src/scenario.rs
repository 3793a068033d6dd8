//! Scenario configuration, physical constants, sensor placement and geometry.
//!
//! Coordinates put the centre of the monitoring disk at the origin. The HAP
//! stands at `(-d_fly, 0, h_hap)` and the UAV hovers at `(0, 0, h_uav)` during
//! the energy-transfer and upload phases. Sensors sit at `(x, y, -d_u)`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::units::db_to_linear;

/// Full simulation configuration. `Default` reproduces the reference farm
/// scenario (N = 64 sensors in a 5 m disk, 0.4 m deep, 433 MHz, Q = 32).
///
/// The serialized form is a flat TOML table whose keys are the `rename`d
/// names below; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    /// Monitoring disk radius, m.
    #[serde(rename = "radius_R")]
    pub radius: f64,
    #[serde(rename = "num_uds_N")]
    pub num_uds: usize,
    /// Burial depth shared by every sensor, m.
    #[serde(rename = "burial_depth_du")]
    pub burial_depth: f64,
    /// Volumetric water content, fraction.
    #[serde(rename = "vwc_mv")]
    pub vwc: f64,
    /// Clay mass fraction (0.38 for 38 %).
    #[serde(rename = "clay_mc")]
    pub clay: f64,
    /// Carrier frequency, Hz.
    #[serde(rename = "carrier_f")]
    pub carrier_freq: f64,
    /// Uplink / offload channel bandwidth, Hz.
    #[serde(rename = "bandwidth_W")]
    pub bandwidth: f64,
    pub p_hap_dbw: f64,
    pub p_uav_dbw: f64,
    /// Antenna gains, dBi.
    pub gain_hap: f64,
    pub gain_uav: f64,
    pub gain_ud: f64,
    /// Antenna heights above ground, m.
    pub h_hap: f64,
    pub h_uav: f64,
    /// Horizontal HAP to disk-centre distance, m.
    pub d_fly: f64,
    pub pathloss_exp_p2u: f64,
    pub pathloss_exp_v2u: f64,
    pub rician_p2u: f64,
    pub rician_v2u: f64,
    /// Treat the HAP-to-sensor channel as pure line of sight (Rician factor to infinity).
    pub los_only_p2u: bool,
    pub los_only_v2u: bool,
    #[serde(rename = "num_antennas_Q")]
    pub num_antennas: usize,
    /// Receiver noise power, dBW. Not part of the published parameter table;
    /// -147 dBW makes the offload time of 64 x 12.5 Mbit come out at 126.87 s.
    pub noise_var_dbw: f64,
    /// Energy-harvesting sensitivity, dBm.
    pub eh_threshold_psi: f64,
    pub energy_conv_zeta: f64,
    pub wit_portion_phi: f64,
    pub amp_eff_eta: f64,
    /// Fixed circuit power, W.
    pub p_circuit: f64,
    /// Baseband power per RF chain, W.
    pub p_rf_chain: f64,
    /// Servo pulse width at the initial shaft angle, ms.
    pub motor_t0_ms: f64,
    /// Servo PWM period, ms.
    pub motor_tf_ms: f64,
    pub motor_voltage: f64,
    pub motor_current: f64,
    /// Cruise speed V, m/s.
    pub uav_speed: f64,
    /// Acceleration and deceleration magnitude a, m/s^2.
    pub uav_accel: f64,
    /// Blade profile power P_0, W.
    pub uav_p0: f64,
    /// Induced power in hover P_i, W.
    pub uav_pi: f64,
    pub uav_u_tip: f64,
    pub uav_v0: f64,
    pub uav_d0: f64,
    pub air_density: f64,
    pub rotor_solidity: f64,
    pub rotor_area: f64,
    /// Per-sensor data volume gamma_n, bits.
    pub throughput_gamma: f64,
    /// Fading draws used to estimate expected incident power per sensor.
    pub fading_draws: usize,
    /// Relative permeability of the soil.
    pub mu_r: f64,
    /// Bypass the dielectric model with a fixed permittivity. Set both or neither.
    pub soil_eps_real: Option<f64>,
    pub soil_eps_imag: Option<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            radius: 5.0,
            num_uds: 64,
            burial_depth: 0.4,
            vwc: 0.15,
            clay: 0.38,
            carrier_freq: 433e6,
            bandwidth: 125e3,
            p_hap_dbw: 35.56,
            p_uav_dbw: 10.0,
            gain_hap: 15.0,
            gain_uav: 5.0,
            gain_ud: 2.15,
            h_hap: 4.5,
            h_uav: 5.5,
            d_fly: 600.0,
            pathloss_exp_p2u: 2.4,
            pathloss_exp_v2u: 2.0,
            rician_p2u: 3.0,
            rician_v2u: 10.0,
            los_only_p2u: false,
            los_only_v2u: false,
            num_antennas: 32,
            noise_var_dbw: -147.0,
            eh_threshold_psi: -22.0,
            energy_conv_zeta: 0.6,
            wit_portion_phi: 0.6,
            amp_eff_eta: 0.38,
            p_circuit: 0.1,
            p_rf_chain: 0.06,
            motor_t0_ms: 1.0,
            motor_tf_ms: 20.0,
            motor_voltage: 5.0,
            motor_current: 0.25,
            uav_speed: 10.0,
            uav_accel: 1.0,
            uav_p0: 14.7517,
            uav_pi: 41.5409,
            uav_u_tip: 80.0,
            uav_v0: 5.0463,
            uav_d0: 0.5009,
            air_density: 1.225,
            rotor_solidity: 0.1248,
            rotor_area: 0.1256,
            throughput_gamma: 12.5e6,
            fading_draws: 200,
            mu_r: 1.0,
            soil_eps_real: None,
            soil_eps_imag: None,
        }
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(key, format!("must be positive and finite, got {v}")))
    }
}

fn fraction(key: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::validation(key, format!("must lie in [0, 1], got {v}")))
    }
}

fn finite(key: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(key, "must be finite"))
    }
}

impl Scenario {
    /// Checks every invariant and names the first offending key.
    pub fn validate(&self) -> Result<()> {
        positive("radius_R", self.radius)?;
        if self.num_uds == 0 {
            return Err(Error::validation("num_uds_N", "must be at least 1"));
        }
        positive("burial_depth_du", self.burial_depth)?;
        fraction("vwc_mv", self.vwc)?;
        fraction("clay_mc", self.clay)?;
        positive("carrier_f", self.carrier_freq)?;
        positive("bandwidth_W", self.bandwidth)?;
        for (k, v) in [
            ("p_hap_dbw", self.p_hap_dbw),
            ("p_uav_dbw", self.p_uav_dbw),
            ("gain_hap", self.gain_hap),
            ("gain_uav", self.gain_uav),
            ("gain_ud", self.gain_ud),
            ("noise_var_dbw", self.noise_var_dbw),
            ("eh_threshold_psi", self.eh_threshold_psi),
        ] {
            finite(k, v)?;
        }
        positive("h_hap", self.h_hap)?;
        positive("h_uav", self.h_uav)?;
        if self.h_uav <= self.h_hap {
            return Err(Error::validation(
                "h_uav",
                format!("must exceed h_hap ({} m), got {} m", self.h_hap, self.h_uav),
            ));
        }
        positive("d_fly", self.d_fly)?;
        positive("pathloss_exp_p2u", self.pathloss_exp_p2u)?;
        positive("pathloss_exp_v2u", self.pathloss_exp_v2u)?;
        for (k, v) in [("rician_p2u", self.rician_p2u), ("rician_v2u", self.rician_v2u)] {
            if !(v >= 0.0) {
                return Err(Error::validation(k, format!("must be non-negative, got {v}")));
            }
        }
        if self.num_antennas == 0 {
            return Err(Error::validation("num_antennas_Q", "must be at least 1"));
        }
        fraction("energy_conv_zeta", self.energy_conv_zeta)?;
        fraction("wit_portion_phi", self.wit_portion_phi)?;
        fraction("amp_eff_eta", self.amp_eff_eta)?;
        positive("p_circuit", self.p_circuit)?;
        positive("p_rf_chain", self.p_rf_chain)?;
        positive("motor_t0_ms", self.motor_t0_ms)?;
        positive("motor_tf_ms", self.motor_tf_ms)?;
        positive("motor_voltage", self.motor_voltage)?;
        positive("motor_current", self.motor_current)?;
        positive("uav_speed", self.uav_speed)?;
        positive("uav_accel", self.uav_accel)?;
        positive("uav_p0", self.uav_p0)?;
        positive("uav_pi", self.uav_pi)?;
        positive("uav_u_tip", self.uav_u_tip)?;
        positive("uav_v0", self.uav_v0)?;
        positive("uav_d0", self.uav_d0)?;
        positive("air_density", self.air_density)?;
        positive("rotor_solidity", self.rotor_solidity)?;
        positive("rotor_area", self.rotor_area)?;
        if self.uav_speed > self.uav_u_tip {
            return Err(Error::validation("uav_speed", "must not exceed the rotor tip speed"));
        }
        positive("throughput_gamma", self.throughput_gamma)?;
        if self.fading_draws == 0 {
            return Err(Error::validation("fading_draws", "must be at least 1"));
        }
        positive("mu_r", self.mu_r)?;
        match (self.soil_eps_real, self.soil_eps_imag) {
            (None, None) => {}
            (Some(_), None) => return Err(Error::validation("soil_eps_imag", "required when soil_eps_real is set")),
            (None, Some(_)) => return Err(Error::validation("soil_eps_real", "required when soil_eps_imag is set")),
            (Some(re), Some(im)) => {
                if !(re >= 1.0) {
                    return Err(Error::validation("soil_eps_real", "must be at least 1"));
                }
                if !(im >= 0.0) {
                    return Err(Error::validation("soil_eps_imag", "must be non-negative"));
                }
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn p_hap(&self) -> f64 {
        db_to_linear(self.p_hap_dbw)
    }

    pub fn p_uav(&self) -> f64 {
        db_to_linear(self.p_uav_dbw)
    }

    pub fn g_hap(&self) -> f64 {
        db_to_linear(self.gain_hap)
    }

    pub fn g_uav(&self) -> f64 {
        db_to_linear(self.gain_uav)
    }

    pub fn g_ud(&self) -> f64 {
        db_to_linear(self.gain_ud)
    }

    pub fn noise_power(&self) -> f64 {
        db_to_linear(self.noise_var_dbw)
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants { mu_r: self.mu_r, ..PhysicalConstants::default() }
    }

    /// Rician factor of the HAP-to-sensor link, `f64::INFINITY` when `los_only_p2u`.
    pub fn kappa_p2u(&self) -> f64 {
        if self.los_only_p2u {
            f64::INFINITY
        } else {
            self.rician_p2u
        }
    }

    pub fn kappa_v2u(&self) -> f64 {
        if self.los_only_v2u {
            f64::INFINITY
        } else {
            self.rician_v2u
        }
    }
}

/// Parses a flat TOML document, filling absent keys with defaults.
pub fn load_scenario(config_text: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(config_text).map_err(|e| Error::Parse(e.message().to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<Scenario> {
    load_scenario(&std::fs::read_to_string(path)?)
}

/// CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub mu_0: f64,
    pub eps_0: f64,
    pub mu_r: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { c: 299_792_458.0, mu_0: 1.256_637_062_12e-6, eps_0: 8.854_187_812_8e-12, mu_r: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Draws `n` points uniformly over a disk of radius `radius` centred at the
/// origin, at depth `depth`.
pub fn sample_disk(n: usize, radius: f64, depth: f64, seed: u64) -> Vec<Position> {
    let mut rng = seed::rng(seed, &[seed::stream::PLACEMENT]);
    let r2 = radius * radius;
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = TAU * rng.random::<f64>();
            let (mut x, mut y) = (r * phi.cos(), r * phi.sin());
            let d2 = x * x + y * y;
            if d2 > r2 {
                let s = radius / d2.sqrt();
                x *= s;
                y *= s;
                while x * x + y * y > r2 {
                    x = f64::from_bits(x.to_bits() - 1);
                }
            }
            Position { x, y, z: -depth }
        })
        .collect()
}

pub fn sample_ud_positions(scenario: &Scenario, seed: u64) -> Vec<Position> {
    sample_disk(scenario.num_uds, scenario.radius, scenario.burial_depth, seed)
}

/// Distances and azimuths of one buried sensor as seen from both power sources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UdGeometry {
    pub position: Position,
    pub air_len_p2u: f64,
    pub air_len_v2u: f64,
    pub soil_len: f64,
    /// Angle from the HAP array broadside. The HAP array axis points at the disk
    /// centre, so sensors sit near +pi/2.
    pub azimuth_p2u: f64,
    /// Angle from the UAV array reference heading (+x).
    pub azimuth_v2u: f64,
}

pub fn compute_geometry(scenario: &Scenario, position: Position) -> UdGeometry {
    let Position { x, y, .. } = position;
    let dx = x + scenario.d_fly;
    let air_len_p2u = (dx * dx + y * y + scenario.h_hap * scenario.h_hap).sqrt();
    let air_len_v2u = (x * x + y * y + scenario.h_uav * scenario.h_uav).sqrt();
    UdGeometry {
        position,
        air_len_p2u,
        air_len_v2u,
        soil_len: scenario.burial_depth,
        azimuth_p2u: FRAC_PI_2 - y.atan2(dx),
        azimuth_v2u: y.atan2(x),
    }
}
