//! Rotary-wing propulsion power and mission energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavPhysics {
    /// Blade profile power in hover, W.
    pub p0: f64,
    /// Induced power in hover, W.
    pub pi: f64,
    pub u_tip: f64,
    /// Mean rotor induced velocity in hover, m/s.
    pub v0: f64,
    /// Fuselage drag ratio.
    pub d0: f64,
    pub rho: f64,
    /// Rotor solidity.
    pub s: f64,
    /// Rotor disc area, m^2.
    pub area: f64,
    /// Cruise speed, m/s.
    pub speed: f64,
    pub accel: f64,
}

impl UavPhysics {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            p0: s.uav_p0,
            pi: s.uav_pi,
            u_tip: s.uav_u_tip,
            v0: s.uav_v0,
            d0: s.uav_d0,
            rho: s.air_density,
            s: s.rotor_solidity,
            area: s.rotor_area,
            speed: s.uav_speed,
            accel: s.uav_accel,
        }
    }
}

impl Default for UavPhysics {
    fn default() -> Self {
        Self::from_scenario(&Scenario::default())
    }
}

/// Blade profile + induced + parasite power at forward speed `v`.
pub fn propulsion_power(ph: &UavPhysics, v: f64) -> f64 {
    let v2 = v * v;
    let blade = ph.p0 * (1.0 + 3.0 * v2 / (ph.u_tip * ph.u_tip));
    let v0sq = ph.v0 * ph.v0;
    let induced = ph.pi * ((1.0 + v2 * v2 / (4.0 * v0sq * v0sq)).sqrt() - v2 / (2.0 * v0sq)).sqrt();
    let parasite = 0.5 * ph.d0 * ph.rho * ph.s * ph.area * v2 * v;
    blade + induced + parasite
}

pub fn hover_power(ph: &UavPhysics) -> f64 {
    propulsion_power(ph, 0.0)
}

pub fn hover_energy(ph: &UavPhysics, t: f64) -> f64 {
    hover_power(ph) * t
}

pub const QUADRATURE_TOL: f64 = 1e-6;

/// Energy to accelerate from rest to cruise speed at constant `a`;
/// deceleration costs the same.
pub fn accel_energy(ph: &UavPhysics) -> f64 {
    adaptive_simpson(|t| propulsion_power(ph, ph.accel * t), 0.0, ph.speed / ph.accel, QUADRATURE_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Leg {
    pub energy: f64,
    pub t_fly: f64,
    /// Time spent at cruise speed.
    pub t_fly_v: f64,
}

/// One-way flight between the HAP and the hover point.
pub fn round_trip_leg(ph: &UavPhysics, d_fly: f64) -> Result<Leg> {
    let ramp = ph.speed * ph.speed / ph.accel;
    if d_fly < ramp {
        return Err(Error::Geometry { d_fly, required: ramp });
    }
    let t_fly_v = d_fly / ph.speed - ph.speed / ph.accel;
    Ok(Leg {
        energy: 2.0 * accel_energy(ph) + propulsion_power(ph, ph.speed) * t_fly_v,
        t_fly: d_fly / ph.speed + ph.speed / ph.accel,
        t_fly_v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// Radiated energy while powering the sensors (phase 2).
    pub e_wet: f64,
    /// Radiated energy while offloading (phase 4).
    pub e_dl: f64,
    pub e_hover_p2: f64,
    pub e_hover_p3: f64,
    pub e_hover_p4: f64,
    /// Flight to the sensors.
    pub e_ft: f64,
    /// Flight back.
    pub e_fb: f64,
    pub total: f64,
}

pub fn total_uav_energy(ph: &UavPhysics, p_uav: f64, t2: f64, t3: f64, t4: f64, d_fly: f64) -> Result<EnergyBreakdown> {
    let leg = round_trip_leg(ph, d_fly)?;
    let mut b = EnergyBreakdown {
        e_wet: p_uav * t2,
        e_dl: p_uav * t4,
        e_hover_p2: hover_energy(ph, t2),
        e_hover_p3: hover_energy(ph, t3),
        e_hover_p4: hover_energy(ph, t4),
        e_ft: leg.energy,
        e_fb: leg.energy,
        total: 0.0,
    };
    b.total = b.e_wet + b.e_dl + b.e_hover_p2 + b.e_hover_p3 + b.e_hover_p4 + b.e_ft + b.e_fb;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hover_and_cruise_power() {
        let ph = UavPhysics::default();
        assert!((hover_power(&ph) - 56.2926).abs() < 1e-12);
        let parasite: f64 = 0.5 * 0.5009 * 1.225 * 0.1248 * 0.1256 * 1000.0;
        assert!((parasite - 4.81).abs() < 0.01);
        assert!((propulsion_power(&ph, 10.0) - 40.6).abs() < 0.05);
    }

    #[test]
    fn leg_times() {
        let ph = UavPhysics::default();
        let leg = round_trip_leg(&ph, 600.0).unwrap();
        assert_eq!(leg.t_fly, 70.0);
        assert_eq!(leg.t_fly_v, 50.0);
        let edge = round_trip_leg(&ph, 100.0).unwrap();
        assert_eq!(edge.t_fly_v, 0.0);
        assert!((edge.energy - 2.0 * accel_energy(&ph)).abs() < 1e-9);
        assert!(matches!(round_trip_leg(&ph, 99.0), Err(Error::Geometry { .. })));
    }

    #[test]
    fn accel_bounds() {
        let ph = UavPhysics::default();
        let e = accel_energy(&ph);
        let t = ph.speed / ph.accel;
        assert!(e < hover_power(&ph) * t && e > propulsion_power(&ph, ph.speed) * t);
        let fast = UavPhysics { accel: 1e12, ..ph };
        assert!(accel_energy(&fast) < 1e-6);
    }

    #[test]
    fn breakdown_sums() {
        let ph = UavPhysics::default();
        let b = total_uav_energy(&ph, 10.0, 89.46, 683.93, 126.87, 600.0).unwrap();
        let parts = b.e_wet + b.e_dl + b.e_hover_p2 + b.e_hover_p3 + b.e_hover_p4 + b.e_ft + b.e_fb;
        assert_eq!(b.total, parts);
        assert_eq!(hover_energy(&ph, 0.0), 0.0);
    }
}
