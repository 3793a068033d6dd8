//! HAP-to-UAV charging, sensor uplink and UAV-to-HAP offload.

use std::f64::consts::PI;

use serde::Serialize;

use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkBudget {
    /// G_hap * G_uav, linear.
    pub hap_uav_gain_product: f64,
    /// Free-space loss over the vertical HAP-UAV separation.
    pub fspl_hap_uav: f64,
    /// sigma^2, W.
    pub noise: f64,
    /// HAP-UAV small-scale gain, fixed to one.
    pub h0: f64,
}

impl LinkBudget {
    pub fn from_scenario(s: &Scenario) -> Self {
        let g = 4.0 * PI * s.carrier_freq * (s.h_uav - s.h_hap) / s.constants().c;
        Self { hap_uav_gain_product: s.g_hap() * s.g_uav(), fspl_hap_uav: g * g, noise: s.noise_power(), h0: 1.0 }
    }

    /// SNR at the HAP while the UAV offloads.
    pub fn offload_snr(&self, p_uav: f64) -> f64 {
        p_uav * self.hap_uav_gain_product * self.h0 / (self.fspl_hap_uav * self.noise)
    }
}

/// RF-to-DC power the UAV collects from the HAP in phase 1, W.
pub fn uav_receive_power(s: &Scenario) -> f64 {
    let lb = LinkBudget::from_scenario(s);
    s.energy_conv_zeta * s.p_hap() * lb.hap_uav_gain_product * lb.h0 / lb.fspl_hap_uav
}

/// Bits a sensor delivers in `tau` seconds when it spends a fraction `phi`
/// of its harvested energy `e` on transmission.
#[allow(clippy::too_many_arguments)]
pub fn ud_throughput(tau: f64, e: f64, uplink_loss: f64, g_ud: f64, g_uav: f64, phi: f64, w: f64, noise: f64) -> f64 {
    if e <= 0.0 || tau <= 0.0 {
        return 0.0;
    }
    tau * w * (phi * e * g_ud * g_uav / (tau * uplink_loss * noise)).ln_1p() / std::f64::consts::LN_2
}

/// Offload rate to the HAP, bit/s.
pub fn offload_rate(s: &Scenario) -> f64 {
    let lb = LinkBudget::from_scenario(s);
    s.bandwidth * lb.offload_snr(s.p_uav()).ln_1p() / std::f64::consts::LN_2
}

/// Phase-4 duration for `r_uav` bits.
pub fn offload_time(r_uav: f64, s: &Scenario) -> f64 {
    r_uav / offload_rate(s)
}
