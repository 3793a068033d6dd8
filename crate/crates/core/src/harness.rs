//! Monte Carlo experiment driver: worst-case incident-power sweeps, the
//! six-row allocation table and the self-validation suite.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{
    draw_channels, expected_incident_powers, incident_powers, plan_from_powers, ApproachKind, Field,
    TimeAllocationPlan, WetApproach,
};
use crate::error::{Error, Result};
use crate::scenario::{sample_disk, Scenario};
use crate::seed;
use crate::units::watts_to_dbm;
use crate::wet::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    NumAntennas,
    Distance,
    NumUds,
    BurialDepth,
    Vwc,
    Gamma,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NumAntennas => "num_antennas",
            SweepAxis::Distance => "distance",
            SweepAxis::NumUds => "num_uds",
            SweepAxis::BurialDepth => "burial_depth",
            SweepAxis::Vwc => "vwc",
            SweepAxis::Gamma => "gamma",
        }
    }

    /// The base scenario with this axis set to `value`.
    pub fn apply(self, base: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = base.clone();
        let count = |key: &str| {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::validation(key, format!("sweep value {value} is not a positive integer")))
            }
        };
        match self {
            SweepAxis::NumAntennas => s.num_antennas = count("num_antennas_Q")?,
            SweepAxis::Distance => s.d_fly = value,
            SweepAxis::NumUds => s.num_uds = count("num_uds_N")?,
            SweepAxis::BurialDepth => s.burial_depth = value,
            SweepAxis::Vwc => s.vwc = value,
            SweepAxis::Gamma => s.throughput_gamma = value,
        }
        s.validate()?;
        Ok(s)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "num_antennas" | "q" | "antennas" => Ok(SweepAxis::NumAntennas),
            "distance" | "d_fly" => Ok(SweepAxis::Distance),
            "num_uds" | "n" | "uds" => Ok(SweepAxis::NumUds),
            "burial_depth" | "depth" | "du" => Ok(SweepAxis::BurialDepth),
            "vwc" | "mv" => Ok(SweepAxis::Vwc),
            "gamma" => Ok(SweepAxis::Gamma),
            _ => Err(Error::Parse(format!("unknown sweep axis '{s}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub approaches: Vec<WetApproach>,
    pub trials: usize,
    pub base: Scenario,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::validation("trials", "must be at least 1"));
        }
        if self.values.is_empty() || self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("values", "axis values must be non-empty and strictly increasing"));
        }
        if self.approaches.is_empty() {
            return Err(Error::validation("approaches", "at least one approach is required"));
        }
        Ok(())
    }
}

/// Every CSI-free scheme at each single source, plus the CSI-free hybrid.
pub fn default_series() -> Vec<WetApproach> {
    let mut v = Vec::new();
    for s in Scheme::CSI_FREE {
        v.push(WetApproach::new(ApproachKind::TraditionalPs, s, Scheme::Rab));
    }
    for s in Scheme::CSI_FREE {
        v.push(WetApproach::new(ApproachKind::UavWet, Scheme::AassII, s));
    }
    v.push(WetApproach::csi_free(ApproachKind::Hybrid));
    v
}

pub fn scheme_label(a: &WetApproach) -> String {
    match a.kind {
        ApproachKind::TraditionalPs => a.hap_scheme.to_string(),
        ApproachKind::UavWet => a.uav_scheme.to_string(),
        ApproachKind::Hybrid => format!("{}+{}", a.hap_scheme, a.uav_scheme),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub axis: f64,
    pub approach: String,
    pub scheme: String,
    /// Linear mean over trials of the per-trial minimum EH-input power, dBm.
    pub avg_worst_case_dbm: Option<f64>,
    /// Standard error of the mean, in dB at the mean.
    pub std_err: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub status: String,
}

/// Mean of per-trial minima in the linear domain, returned as
/// `(dBm, standard error in dB)`.
pub fn worst_case_metric(trial_minima: &[f64]) -> (f64, f64) {
    let n = trial_minima.len() as f64;
    let mean = trial_minima.iter().sum::<f64>() / n;
    let var = if trial_minima.len() > 1 {
        trial_minima.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let se = (var / n).sqrt();
    (watts_to_dbm(mean), 10.0 / std::f64::consts::LN_10 * se / mean)
}

/// EH-input power `G_ps G_ud xi_n` at every sensor for one placement and one
/// fading draw, for each approach. `Err` entries mark budget-exhausted series.
pub fn trial_input_powers(s: &Scenario, approaches: &[WetApproach], trial_seed: u64) -> Result<Vec<Result<Vec<f64>>>> {
    let positions = sample_disk(s.num_uds, s.radius, s.burial_depth, trial_seed);
    let field = Field::from_positions(s, &positions)?;
    let mut rng_hap = seed::rng(trial_seed, &[seed::stream::FADING_HAP]);
    let mut rng_uav = seed::rng(trial_seed, &[seed::stream::FADING_UAV]);
    let need_hap = approaches.iter().any(|a| a.kind.uses_hap());
    let need_uav = approaches.iter().any(|a| a.kind.uses_uav());
    let ch_hap = if need_hap { draw_channels(s, &field, true, &mut rng_hap) } else { Vec::new() };
    let ch_uav = if need_uav { draw_channels(s, &field, false, &mut rng_uav) } else { Vec::new() };

    let mut cache: BTreeMap<(bool, Scheme), std::result::Result<Vec<f64>, String>> = BTreeMap::new();
    let mut get = |hap: bool, scheme: Scheme| -> Result<Vec<f64>> {
        let entry = cache.entry((hap, scheme)).or_insert_with(|| {
            let gain = s.g_ud() * if hap { s.g_hap() } else { s.g_uav() };
            let ch = if hap { &ch_hap } else { &ch_uav };
            incident_powers(s, &field, hap, scheme, ch)
                .map(|xs| xs.into_iter().map(|x| x * gain).collect())
                .map_err(|e| e.to_string())
        });
        entry.clone().map_err(Error::Infeasible)
    };
    Ok(approaches
        .iter()
        .map(|a| {
            let hap = if a.kind.uses_hap() { Some(get(true, a.hap_scheme)?) } else { None };
            let uav = if a.kind.uses_uav() { Some(get(false, a.uav_scheme)?) } else { None };
            Ok(match (hap, uav) {
                (Some(h), Some(u)) => h.iter().zip(&u).map(|(x, y)| x + y).collect(),
                (Some(h), None) => h,
                (None, Some(u)) => u,
                (None, None) => unreachable!("every approach uses a source"),
            })
        })
        .collect())
}

/// Worst-case metric rows for every axis value and approach.
pub fn run_wet_sweep(spec: &SweepSpec) -> Result<Vec<MetricRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for (cell, &value) in spec.values.iter().enumerate() {
        let s = spec.axis.apply(&spec.base, value)?;
        log::info!("{} = {value}: {} trials", spec.axis, spec.trials);
        let per_trial: Vec<Vec<Result<f64>>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let ts = seed::derive(spec.seed, &[seed::stream::SWEEP_CELL, cell as u64, t as u64]);
                Ok(trial_input_powers(&s, &spec.approaches, ts)?
                    .into_iter()
                    .map(|r| r.map(|xs| xs.into_iter().fold(f64::INFINITY, f64::min)))
                    .collect())
            })
            .collect::<Result<_>>()?;
        for (i, a) in spec.approaches.iter().enumerate() {
            let minima: std::result::Result<Vec<f64>, &Error> =
                per_trial.iter().map(|row| row[i].as_ref().copied()).collect();
            let (metric, se, status) = match minima {
                Ok(m) => {
                    let (db, se) = worst_case_metric(&m);
                    (Some(db), Some(se), "ok".to_string())
                }
                Err(e) => (None, None, format!("missing: {e}")),
            };
            rows.push(MetricRow {
                axis: value,
                approach: a.kind.name().to_string(),
                scheme: scheme_label(a),
                avg_worst_case_dbm: metric,
                std_err: se,
                trials: spec.trials,
                seed: spec.seed,
                status,
            });
        }
    }
    Ok(rows)
}

pub fn write_metric_csv<W: Write>(rows: &[MetricRow], axis: SweepAxis, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "axis",
        "value",
        "approach",
        "scheme",
        "avg_worst_case_dbm",
        "std_err",
        "trials",
        "seed",
        "status",
    ])?;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            axis.name().to_string(),
            format!("{}", r.axis),
            r.approach.clone(),
            r.scheme.clone(),
            opt(r.avg_worst_case_dbm),
            opt(r.std_err),
            r.trials.to_string(),
            r.seed.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub approach: String,
    pub csi: String,
    pub t_p1: f64,
    pub t_p2: f64,
    pub t_p3: f64,
    pub t_p4: f64,
    pub t_total: f64,
    pub e_s_kj: f64,
    pub kkt_residual: f64,
    #[serde(skip)]
    pub plan: TimeAllocationPlan,
}

/// The six approach x CSI combinations on one placement. Expected incident
/// powers use `scenario.fading_draws` draws.
pub fn run_allocation_table(s: &Scenario, seed_value: u64) -> Result<Vec<TableRow>> {
    s.validate()?;
    let field = Field::sample(s, seed_value)?;
    let xi = |hap: bool, scheme: Scheme| expected_incident_powers(s, &field, hap, scheme, s.fading_draws, seed_value);
    let free = (xi(true, Scheme::AassII)?, xi(false, Scheme::Rab)?);
    let full = (xi(true, Scheme::FullCsi)?, xi(false, Scheme::FullCsi)?);
    let mut rows = Vec::new();
    for (csi, approach_of, powers) in [
        ("full-CSI", WetApproach::full_csi as fn(ApproachKind) -> WetApproach, &full),
        ("CSI-free", WetApproach::csi_free, &free),
    ] {
        for kind in [ApproachKind::TraditionalPs, ApproachKind::UavWet, ApproachKind::Hybrid] {
            let plan = plan_from_powers(s, approach_of(kind), &field, &powers.0, &powers.1)?;
            rows.push(TableRow {
                approach: plan.approach.label(),
                csi: csi.to_string(),
                t_p1: plan.t_p1,
                t_p2: plan.t_p2,
                t_p3: plan.t_p3,
                t_p4: plan.t_p4,
                t_total: plan.t_total,
                e_s_kj: plan.energy.total / 1e3,
                kkt_residual: plan.kkt_residual,
                plan,
            });
        }
    }
    Ok(rows)
}

pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Mission energy of each approach as one axis varies; each value reuses the
/// same placement and fading seeds.
pub fn run_energy_sweep(spec: &SweepSpec) -> Result<Vec<(f64, TableRow)>> {
    spec.validate()?;
    let mut out = Vec::new();
    for &value in &spec.values {
        let s = spec.axis.apply(&spec.base, value)?;
        let s = Scenario { fading_draws: spec.trials, ..s };
        for row in run_allocation_table(&s, spec.seed)? {
            let keep = spec.approaches.contains(&row.plan.approach);
            if keep {
                out.push((value, row));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, module: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { module, name: name.into(), passed, detail: detail.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}::{} {}", if c.passed { "PASS" } else { "FAIL" }, c.module, c.name, c.detail)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

pub const GOLDEN_SOIL: &str = include_str!("../golden/soil.json");
pub const GOLDEN_PHYSICS: &str = include_str!("../golden/physics.json");

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

/// Runs the built-in oracle checks whose module name contains `filter`.
/// Golden files are read from `golden_dir` when given, else the embedded copies.
pub fn run_validation(filter: Option<&str>, golden_dir: Option<&Path>) -> Result<ValidationReport> {
    let load = |name: &str, embedded: &str| -> Result<serde_json::Value> {
        let text = match golden_dir {
            Some(d) => std::fs::read_to_string(d.join(name))?,
            None => embedded.to_string(),
        };
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{name}: {e}")))
    };
    let soil_golden = load("soil.json", GOLDEN_SOIL)?;
    let physics_golden = load("physics.json", GOLDEN_PHYSICS)?;
    let mut r = ValidationReport::default();
    let on = |m: &str| filter.is_none_or(|f| m.contains(f));
    if on("scenario") {
        crate::validation::scenario(&mut r);
    }
    if on("soil") {
        crate::validation::soil(&mut r, &soil_golden);
    }
    if on("propagation") {
        crate::validation::propagation(&mut r, &physics_golden);
    }
    if on("channel") {
        crate::validation::channel(&mut r);
    }
    if on("wet") {
        crate::validation::wet(&mut r);
    }
    if on("maxmin") {
        crate::validation::maxmin(&mut r);
    }
    if on("uav_energy") {
        crate::validation::uav_energy(&mut r, &physics_golden);
    }
    if on("link") {
        crate::validation::link(&mut r);
    }
    if on("allocation") {
        crate::validation::allocation(&mut r);
    }
    Ok(r)
}

pub(crate) fn record(r: &mut ValidationReport, module: &'static str, name: &str, passed: bool, detail: String) {
    r.push(module, name, passed, detail);
}

pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    rel_close(a, b, tol)
}

/// Parses `kind:scheme` items such as `ps:AASS-II`, `uav:RAB` or
/// `hybrid:AASS-II+RAB`, comma separated.
pub fn parse_series(text: &str) -> Result<Vec<WetApproach>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|item| {
            let (kind, schemes) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("series item '{item}' needs the form kind:scheme")))?;
            let kind: ApproachKind = kind.parse()?;
            Ok(match kind {
                ApproachKind::TraditionalPs => WetApproach::new(kind, schemes.parse()?, Scheme::Rab),
                ApproachKind::UavWet => WetApproach::new(kind, Scheme::AassII, schemes.parse()?),
                ApproachKind::Hybrid => {
                    let (h, u) = schemes
                        .split_once('+')
                        .ok_or_else(|| Error::Parse(format!("hybrid series '{item}' needs hap+uav schemes")))?;
                    WetApproach::new(kind, h.parse()?, u.parse()?)
                }
            })
        })
        .collect()
}
