//! Complex relative permittivity of moist soil.
//!
//! The default model is the mineralogy-based spectroscopic dielectric model of
//! Mironov, Kosolapova and Fomin (IEEE TGRS 47(7), 2009, "Physically and
//! mineralogically based spectroscopic dielectric model for moist soils").
//! Soil is treated as dry matrix plus bound water up to the maximum bound water
//! fraction `mvt`, plus free water beyond it. Each water component follows a
//! Debye relaxation with ohmic loss; mixing is linear in the complex refractive
//! index.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{PhysicalConstants, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermittivitySource {
    Model,
    UserSpecified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoilMedium {
    pub eps_real: f64,
    pub eps_imag: f64,
    pub source: PermittivitySource,
}

impl SoilMedium {
    pub fn modulus(&self) -> f64 {
        self.eps_real.hypot(self.eps_imag)
    }
}

pub const MIN_FREQ: f64 = 45e6;
pub const MAX_FREQ: f64 = 26.5e9;
pub const MAX_VWC: f64 = 0.6;

/// A dielectric model mapping (vwc, clay fraction, frequency) to permittivity.
pub trait DielectricModel {
    fn permittivity(&self, vwc: f64, clay: f64, freq: f64, eps_0: f64) -> Result<SoilMedium>;
}

/// Regression coefficients of the mineralogy-based model, clay `C` in percent.
/// Each quadratic is `c0 + c1*C + c2*C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MironovCoefficients {
    /// Dry-soil refractive index n_d.
    pub n_dry: [f64; 3],
    /// Dry-soil normalized attenuation k_d.
    pub k_dry: [f64; 3],
    /// Maximum bound water fraction m_vt.
    pub mv_bound_max: [f64; 3],
    /// Bound water static permittivity.
    pub eps_static_bound: [f64; 3],
    /// Bound water relaxation time, s.
    pub tau_bound: [f64; 3],
    /// Bound water conductivity, S/m.
    pub sigma_bound: [f64; 3],
    /// Free water conductivity, S/m.
    pub sigma_free: [f64; 3],
    pub eps_static_free: f64,
    pub tau_free: f64,
    pub eps_inf: f64,
}

/// Table 1 of the 2009 paper, fitted over 0.3 to 26.5 GHz, clay 0 to 76 %.
pub const MIRONOV_2009: MironovCoefficients = MironovCoefficients {
    n_dry: [1.634, -0.539e-2, 0.2748e-4],
    k_dry: [0.03952, -0.04038e-2, 0.0],
    mv_bound_max: [0.02863, 0.30673e-2, 0.0],
    eps_static_bound: [79.8, -85.4e-2, 32.7e-4],
    tau_bound: [1.062e-11, 3.450e-12 * 1e-2, 0.0],
    sigma_bound: [0.3112, 0.467e-2, 0.0],
    sigma_free: [0.3631, 1.217e-2, 0.0],
    eps_static_free: 100.0,
    tau_free: 8.5e-12,
    eps_inf: 4.9,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MironovModel {
    pub coefficients: MironovCoefficients,
}

impl Default for MironovModel {
    fn default() -> Self {
        Self { coefficients: MIRONOV_2009 }
    }
}

fn quad(c: [f64; 3], x: f64) -> f64 {
    c[0] + c[1] * x + c[2] * x * x
}

/// Debye relaxation plus conductivity, returned as refractive index (n, k).
fn debye_index(eps_s: f64, eps_inf: f64, tau: f64, sigma: f64, freq: f64, eps_0: f64) -> (f64, f64) {
    let w = 2.0 * PI * freq * tau;
    let den = 1.0 + w * w;
    let re = eps_inf + (eps_s - eps_inf) / den;
    let im = (eps_s - eps_inf) * w / den + sigma / (2.0 * PI * eps_0 * freq);
    let m = re.hypot(im);
    (((m + re) / 2.0).sqrt(), ((m - re) / 2.0).sqrt())
}

impl DielectricModel for MironovModel {
    fn permittivity(&self, vwc: f64, clay: f64, freq: f64, eps_0: f64) -> Result<SoilMedium> {
        check_domain(vwc, clay, freq)?;
        let k = &self.coefficients;
        let c = clay * 100.0;
        let nd = quad(k.n_dry, c);
        let kd = quad(k.k_dry, c);
        let mvt = quad(k.mv_bound_max, c);
        let (nb, kb) = debye_index(
            quad(k.eps_static_bound, c),
            k.eps_inf,
            quad(k.tau_bound, c),
            quad(k.sigma_bound, c),
            freq,
            eps_0,
        );
        let (nu, ku) = debye_index(k.eps_static_free, k.eps_inf, k.tau_free, quad(k.sigma_free, c), freq, eps_0);
        let (n, kappa) = if vwc <= mvt {
            (nd + (nb - 1.0) * vwc, kd + kb * vwc)
        } else {
            (nd + (nb - 1.0) * mvt + (nu - 1.0) * (vwc - mvt), kd + kb * mvt + ku * (vwc - mvt))
        };
        Ok(SoilMedium { eps_real: n * n - kappa * kappa, eps_imag: 2.0 * n * kappa, source: PermittivitySource::Model })
    }
}

fn check_domain(vwc: f64, clay: f64, freq: f64) -> Result<()> {
    if !(MIN_FREQ..=MAX_FREQ).contains(&freq) {
        return Err(Error::Domain { quantity: "frequency", value: freq, range: "45 MHz to 26.5 GHz" });
    }
    if !(0.0..=MAX_VWC).contains(&vwc) {
        return Err(Error::Domain { quantity: "vwc", value: vwc, range: "0 to 0.6" });
    }
    if !(0.0..=1.0).contains(&clay) {
        return Err(Error::Domain { quantity: "clay fraction", value: clay, range: "0 to 1" });
    }
    Ok(())
}

/// Mironov model with CODATA vacuum permittivity.
pub fn soil_permittivity(vwc: f64, clay: f64, freq: f64) -> Result<SoilMedium> {
    MironovModel::default().permittivity(vwc, clay, freq, PhysicalConstants::default().eps_0)
}

pub fn permittivity_override(eps_real: f64, eps_imag: f64) -> Result<SoilMedium> {
    if !(eps_real >= 1.0) || !eps_real.is_finite() {
        return Err(Error::Domain { quantity: "eps_real", value: eps_real, range: ">= 1" });
    }
    if !(eps_imag >= 0.0) || !eps_imag.is_finite() {
        return Err(Error::Domain { quantity: "eps_imag", value: eps_imag, range: ">= 0" });
    }
    Ok(SoilMedium { eps_real, eps_imag, source: PermittivitySource::UserSpecified })
}

/// The scenario's soil: the override when both parts are set, the model otherwise.
pub fn scenario_medium(s: &Scenario) -> Result<SoilMedium> {
    match (s.soil_eps_real, s.soil_eps_imag) {
        (Some(re), Some(im)) => permittivity_override(re, im),
        _ => MironovModel::default().permittivity(s.vwc, s.clay, s.carrier_freq, s.constants().eps_0),
    }
}
