//! Energy-transfer precoders, the transmit power budget and harvested energy.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, Link};
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::seed;
use crate::units::{db_to_linear, dbm_to_watts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "SA")]
    Sa,
    #[serde(rename = "AAIS")]
    Aais,
    #[serde(rename = "AASS-I")]
    AassI,
    #[serde(rename = "AASS-II")]
    AassII,
    #[serde(rename = "RAB")]
    Rab,
    #[serde(rename = "FULL-CSI")]
    FullCsi,
}

impl Scheme {
    pub const CSI_FREE: [Scheme; 5] = [Scheme::Sa, Scheme::Aais, Scheme::AassI, Scheme::AassII, Scheme::Rab];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Sa => "SA",
            Scheme::Aais => "AAIS",
            Scheme::AassI => "AASS-I",
            Scheme::AassII => "AASS-II",
            Scheme::Rab => "RAB",
            Scheme::FullCsi => "FULL-CSI",
        }
    }

    /// Exponent on Q in the RF-chain term of the budget.
    fn rf_chains(self, q: usize) -> f64 {
        match self {
            Scheme::FullCsi | Scheme::Aais => q as f64,
            _ => 1.0,
        }
    }

    fn uses_motor(self) -> bool {
        self == Scheme::Rab
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match key.to_ascii_lowercase().as_str() {
            "sa" => Ok(Scheme::Sa),
            "aais" => Ok(Scheme::Aais),
            "aassi" | "aass1" => Ok(Scheme::AassI),
            "aassii" | "aass2" => Ok(Scheme::AassII),
            "rab" => Ok(Scheme::Rab),
            "fullcsi" | "full" | "csi" => Ok(Scheme::FullCsi),
            _ => Err(Error::Parse(format!("unknown scheme '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySymbol {
    pub power: f64,
    pub vector: Vec<Complex64>,
}

/// Symbol and power structure of one transmit scheme. CSI-free schemes hold
/// one or more equal-length subblocks of symbols; full CSI holds the transmit
/// covariance `V` (trace one) instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub scheme: Scheme,
    pub num_antennas: usize,
    pub total_power: f64,
    pub subblocks: Vec<Vec<EnergySymbol>>,
    /// Array rotations per block (RAB only, otherwise 1).
    pub rotation_steps: usize,
    pub covariance: Option<DMatrix<Complex64>>,
}

fn basis(q: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); q];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

fn alternating(q: usize) -> Vec<Complex64> {
    (0..q).map(|i| Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect()
}

impl Precoder {
    /// CSI-free precoder with total transmit power `p` over `q` antennas.
    pub fn csi_free(scheme: Scheme, q: usize, p: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::validation("num_antennas_Q", "must be at least 1"));
        }
        let qf = q as f64;
        let single = |vector: Vec<Complex64>| vec![vec![EnergySymbol { power: p / qf, vector }]];
        let subblocks = match scheme {
            Scheme::Sa => (0..q).map(|k| vec![EnergySymbol { power: p, vector: basis(q, k) }]).collect(),
            Scheme::Aais => vec![(0..q).map(|k| EnergySymbol { power: p / qf, vector: basis(q, k) }).collect()],
            Scheme::AassI => single(vec![Complex64::new(1.0, 0.0); q]),
            Scheme::AassII | Scheme::Rab => single(alternating(q)),
            Scheme::FullCsi => return Err(Error::Infeasible("full-CSI precoders are built from a covariance".into())),
        };
        Ok(Self {
            scheme,
            num_antennas: q,
            total_power: p,
            subblocks,
            rotation_steps: if scheme == Scheme::Rab { q } else { 1 },
            covariance: None,
        })
    }

    pub fn full_csi(p: f64, covariance: DMatrix<Complex64>) -> Result<Self> {
        if covariance.nrows() != covariance.ncols() {
            return Err(Error::DimensionMismatch { expected: covariance.nrows(), got: covariance.ncols() });
        }
        Ok(Self {
            scheme: Scheme::FullCsi,
            num_antennas: covariance.nrows(),
            total_power: p,
            subblocks: Vec::new(),
            rotation_steps: 1,
            covariance: Some(covariance),
        })
    }

    /// Radiated power of each subblock, `sum_k p_k ||v_k||^2`.
    pub fn radiated_power(&self) -> Vec<f64> {
        if let Some(v) = &self.covariance {
            return vec![self.total_power * v.trace().re];
        }
        self.subblocks
            .iter()
            .map(|b| b.iter().map(|s| s.power * s.vector.iter().map(|e| e.norm_sqr()).sum::<f64>()).sum())
            .collect()
    }
}

fn received(block: &[EnergySymbol], h: &[Complex64]) -> f64 {
    block.iter().map(|s| s.power * s.vector.iter().zip(h).map(|(v, h)| v * h).sum::<Complex64>().norm_sqr()).sum()
}

/// `h^T V conj(h)`, the full-CSI payoff per unit power.
pub fn covariance_gain(v: &DMatrix<Complex64>, h: &[Complex64]) -> f64 {
    let q = h.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..q {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..q {
            row += v[(i, j)] * h[j].conj();
        }
        acc += h[i] * row;
    }
    acc.re.max(0.0)
}

/// Average incident RF power at one sensor for one channel draw.
pub fn incident_power(precoder: &Precoder, channel: &ChannelRealization, delta: f64) -> Result<f64> {
    if channel.len() != precoder.num_antennas {
        return Err(Error::DimensionMismatch { expected: precoder.num_antennas, got: channel.len() });
    }
    let gain = match (&precoder.covariance, precoder.scheme) {
        (Some(v), _) => precoder.total_power * covariance_gain(v, &channel.h),
        (None, Scheme::Rab) => {
            let steps = precoder.rotation_steps;
            let block = &precoder.subblocks[0];
            (1..=steps).map(|q| received(block, &channel.rotated(q as f64 * PI / steps as f64).h)).sum::<f64>()
                / steps as f64
        }
        (None, _) => {
            precoder.subblocks.iter().map(|b| received(b, &channel.h)).sum::<f64>() / precoder.subblocks.len() as f64
        }
    };
    Ok(gain / delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Self { mean, std_err: (var / n).sqrt(), trials: xs.len() }
    }
}

/// Monte Carlo mean of [`incident_power`] over fading draws at a fixed position.
pub fn expected_incident_power(
    precoder: &Precoder,
    theta: f64,
    kappa: f64,
    delta: f64,
    trials: usize,
    seed_value: u64,
) -> Result<Estimate> {
    if precoder.scheme == Scheme::FullCsi {
        return Err(Error::Infeasible("full-CSI power depends on every sensor's channel".into()));
    }
    if trials == 0 {
        return Err(Error::validation("trials", "must be at least 1"));
    }
    let mut rng = seed::rng(seed_value, &[seed::stream::FADING_HAP]);
    let mut xs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let ch = ChannelRealization::draw(theta, kappa, precoder.num_antennas, Link::HapToUd, &mut rng);
        xs.push(incident_power(precoder, &ch, delta)?);
    }
    Ok(Estimate::from_samples(&xs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorParams {
    pub t0_ms: f64,
    pub tf_ms: f64,
    pub voltage: f64,
    pub current: f64,
}

impl MotorParams {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self { t0_ms: s.motor_t0_ms, tf_ms: s.motor_tf_ms, voltage: s.motor_voltage, current: s.motor_current }
    }
}

/// Servo power for Q + 1 PWM pulses of width `T_0 + q/Q` ms per period.
pub fn motor_power(q: usize, m: &MotorParams) -> f64 {
    (q as f64 + 1.0) * (m.t0_ms + 0.5) / m.tf_ms * m.voltage * m.current
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBudget {
    pub budget: f64,
    pub scheme: Scheme,
    pub num_antennas: usize,
    pub transmit_power: f64,
    pub motor_power: f64,
}

pub fn transmit_power(
    p_b: f64,
    scheme: Scheme,
    q: usize,
    eta: f64,
    p_rf: f64,
    p_c: f64,
    motor: &MotorParams,
) -> Result<PowerBudget> {
    if scheme == Scheme::Rab && q < 2 {
        return Err(Error::validation("num_antennas_Q", "RAB needs at least two antennas"));
    }
    let p_motor = if scheme.uses_motor() { motor_power(q, motor) } else { 0.0 };
    let p = eta * (p_b - scheme.rf_chains(q) * p_rf - p_c - p_motor);
    if !(p > 0.0) {
        return Err(Error::BudgetExhausted { scheme: scheme.name().to_string(), antennas: q, power: p_b });
    }
    Ok(PowerBudget { budget: p_b, scheme, num_antennas: q, transmit_power: p, motor_power: p_motor })
}

/// Transmit power of the HAP (`hap = true`) or UAV for `scheme` in a scenario.
pub fn scenario_transmit_power(s: &Scenario, scheme: Scheme, hap: bool) -> Result<PowerBudget> {
    let p_b = if hap { s.p_hap() } else { s.p_uav() };
    transmit_power(
        p_b,
        scheme,
        s.num_antennas,
        s.amp_eff_eta,
        s.p_rf_chain,
        s.p_circuit,
        &MotorParams::from_scenario(s),
    )
}

/// Energy harvested over `duration` seconds. Input power exactly at the
/// threshold harvests.
pub fn harvested_energy(xi: f64, zeta: f64, g_ps_dbi: f64, g_ud_dbi: f64, duration: f64, psi_dbm: f64) -> f64 {
    let p_in = db_to_linear(g_ps_dbi) * db_to_linear(g_ud_dbi) * xi;
    if p_in < dbm_to_watts(psi_dbm) {
        0.0
    } else {
        zeta * p_in * duration
    }
}
