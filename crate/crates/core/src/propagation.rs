//! Modified Friis path loss for air-to-soil links. All factors are linear.

use std::f64::consts::PI;

use serde::Serialize;

use crate::scenario::{PhysicalConstants, UdGeometry};
use crate::soil::SoilMedium;
use crate::units::linear_to_db;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathLossBreakdown {
    pub air_j: f64,
    pub refraction_k_a2u: f64,
    pub soil_m: f64,
    pub total_delta: f64,
    /// Np/m
    pub alpha: f64,
    /// rad/m
    pub beta: f64,
}

impl PathLossBreakdown {
    pub fn db(&self) -> [f64; 4] {
        [
            linear_to_db(self.air_j),
            linear_to_db(self.refraction_k_a2u),
            linear_to_db(self.soil_m),
            linear_to_db(self.total_delta),
        ]
    }
}

/// Attenuation constant alpha and phase constant beta of the soil.
pub fn attenuation_constants(medium: &SoilMedium, freq: f64, k: &PhysicalConstants) -> (f64, f64) {
    let ratio = medium.eps_imag / medium.eps_real;
    let root = (1.0 + ratio * ratio).sqrt();
    let base = k.mu_r * k.mu_0 * medium.eps_real * k.eps_0 / 2.0;
    let w = 2.0 * PI * freq;
    // root - 1 loses precision for tiny loss tangents; ratio^2/(root+1) is exact.
    let minus = ratio * ratio / (root + 1.0);
    (w * (base * minus).sqrt(), w * (base * (root + 1.0)).sqrt())
}

pub fn air_loss(l: f64, exponent: f64, freq: f64, c: f64) -> f64 {
    let g = 4.0 * PI * freq / c;
    g * g * l.powf(exponent)
}

pub fn refraction_loss_a2u(medium: &SoilMedium) -> f64 {
    let inner = ((medium.modulus() + medium.eps_real) / 2.0).sqrt();
    let v = (inner + 1.0) / 4.0;
    v * v
}

pub fn soil_loss(d: f64, alpha: f64, beta: f64) -> f64 {
    let v = 2.0 * beta * d * (alpha * d).exp();
    v * v
}

fn parts(l: f64, d: f64, medium: &SoilMedium, exponent: f64, freq: f64, k: &PhysicalConstants) -> (f64, f64, f64, f64) {
    let (alpha, beta) = attenuation_constants(medium, freq, k);
    (air_loss(l, exponent, freq, k.c), soil_loss(d, alpha, beta), alpha, beta)
}

/// Downlink loss over `l` metres of air and `d` metres of soil.
pub fn downlink_loss(
    l: f64,
    d: f64,
    medium: &SoilMedium,
    exponent: f64,
    freq: f64,
    k: &PhysicalConstants,
) -> PathLossBreakdown {
    let (air_j, soil_m, alpha, beta) = parts(l, d, medium, exponent, freq, k);
    let refraction_k_a2u = refraction_loss_a2u(medium);
    PathLossBreakdown { air_j, refraction_k_a2u, soil_m, total_delta: air_j * refraction_k_a2u * soil_m, alpha, beta }
}

/// Which end of the geometry the air segment starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Hap,
    Uav,
}

fn air_len(g: &UdGeometry, src: Source) -> f64 {
    match src {
        Source::Hap => g.air_len_p2u,
        Source::Uav => g.air_len_v2u,
    }
}

pub fn total_downlink_loss(
    g: &UdGeometry,
    src: Source,
    medium: &SoilMedium,
    exponent: f64,
    freq: f64,
    k: &PhysicalConstants,
) -> PathLossBreakdown {
    downlink_loss(air_len(g, src), g.soil_len, medium, exponent, freq, k)
}

/// Soil-to-air loss; refraction at the soil-air interface is neglected.
pub fn uplink_loss(
    g: &UdGeometry,
    dst: Source,
    medium: &SoilMedium,
    exponent: f64,
    freq: f64,
    k: &PhysicalConstants,
) -> f64 {
    let (j, m, _, _) = parts(air_len(g, dst), g.soil_len, medium, exponent, freq, k);
    j * m
}
