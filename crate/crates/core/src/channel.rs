//! ULA steering vectors and Rician-faded channel vectors.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::seed;

/// Rician factors at or above this are treated as pure line of sight.
pub const LOS_ONLY_KAPPA: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Link {
    HapToUd,
    UavToUd,
}

/// Element `t` is `exp(-i t pi sin(theta))`, half-wavelength spacing.
pub fn steering_vector(theta: f64, q: usize) -> Vec<Complex64> {
    let step = -PI * theta.sin();
    (0..q).map(|t| Complex64::from_polar(1.0, t as f64 * step)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    /// Scattered component `w ~ CN(0, I)`, kept so the LOS part can be re-steered.
    pub nlos: Vec<Complex64>,
    pub theta: f64,
    pub kappa: f64,
    pub link: Link,
}

fn los_weights(kappa: f64) -> (f64, f64) {
    if kappa >= LOS_ONLY_KAPPA {
        (1.0, 0.0)
    } else {
        ((kappa / (1.0 + kappa)).sqrt(), (1.0 / (1.0 + kappa)).sqrt())
    }
}

fn combine(theta: f64, kappa: f64, nlos: &[Complex64]) -> Vec<Complex64> {
    let (a, b) = los_weights(kappa);
    steering_vector(theta, nlos.len()).into_iter().zip(nlos).map(|(l, w)| l * a + w * b).collect()
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

impl ChannelRealization {
    pub fn draw<R: Rng + ?Sized>(theta: f64, kappa: f64, q: usize, link: Link, rng: &mut R) -> Self {
        let nlos: Vec<Complex64> = (0..q).map(|_| complex_gaussian(rng)).collect();
        Self { h: combine(theta, kappa, &nlos), nlos, theta, kappa, link }
    }

    /// Same scattering draw seen from a rotated array.
    pub fn rotated(&self, delta: f64) -> Self {
        let theta = self.theta + delta;
        Self { h: combine(theta, self.kappa, &self.nlos), theta, ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

pub fn sample_rician(theta: f64, kappa: f64, q: usize, link: Link, seed_value: u64) -> ChannelRealization {
    let mut rng = seed::rng(seed_value, &[]);
    ChannelRealization::draw(theta, kappa, q, link, &mut rng)
}
