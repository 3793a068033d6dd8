//! C ABI over the `wpucn` simulator.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns a [`WpucnStatus`];
//! on failure [`wpucn_last_error`] describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wpucn::allocation::{plan, ApproachKind, TimeAllocationPlan, WetApproach};
use wpucn::propagation::{total_downlink_loss, uplink_loss, Source};
use wpucn::scenario::{compute_geometry, load_scenario, Position};
use wpucn::soil::scenario_medium;
use wpucn::wet::Scheme;
use wpucn::{Error, Scenario};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpucnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ValidationError = 4,
    DomainError = 5,
    Infeasible = 6,
    IoError = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpucnApproach {
    TraditionalPs = 0,
    UavWet = 1,
    Hybrid = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpucnScheme {
    Sa = 0,
    Aais = 1,
    AassI = 2,
    AassII = 3,
    Rab = 4,
    FullCsi = 5,
}

/// Which power source a downlink loss is computed for.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpucnSource {
    Hap = 0,
    Uav = 1,
}

/// Opaque scenario configuration.
pub struct WpucnScenario(Scenario);

/// Opaque time-allocation plan.
pub struct WpucnPlan(TimeAllocationPlan);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WpucnPlanSummary {
    pub t_p1: f64,
    pub t_p2: f64,
    pub t_p3: f64,
    pub t_p4: f64,
    pub t_total: f64,
    /// UAV mission energy, J.
    pub energy_j: f64,
    pub kkt_residual: f64,
    pub num_uds: usize,
    pub feasible: bool,
}

/// Linear loss factors of one link; `total` is their product for the downlink.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WpucnPathLoss {
    pub air: f64,
    pub refraction: f64,
    pub soil: f64,
    pub total: f64,
    pub uplink: f64,
    pub alpha: f64,
    pub beta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: WpucnStatus, msg: impl AsRef<str>) -> WpucnStatus {
    set_error(msg.as_ref());
    status
}

fn status_of(e: &Error) -> WpucnStatus {
    match e {
        Error::Parse(_) => WpucnStatus::ParseError,
        Error::Validation { .. } => WpucnStatus::ValidationError,
        Error::Domain { .. } | Error::Geometry { .. } => WpucnStatus::DomainError,
        Error::InfeasibleEnergy { .. } | Error::BudgetExhausted { .. } | Error::Infeasible(_) => {
            WpucnStatus::Infeasible
        }
        Error::DimensionMismatch { .. } => WpucnStatus::InvalidArgument,
        Error::Io(_) | Error::Csv(_) => WpucnStatus::IoError,
    }
}

fn from_error(e: Error) -> WpucnStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, turning panics into [`WpucnStatus::Internal`].
fn guard(f: impl FnOnce() -> WpucnStatus) -> WpucnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == WpucnStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(WpucnStatus::Internal, format!("panic: {msg}"))
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, WpucnStatus> {
    if p.is_null() {
        return Err(fail(WpucnStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(WpucnStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

impl From<WpucnScheme> for Scheme {
    fn from(s: WpucnScheme) -> Self {
        match s {
            WpucnScheme::Sa => Scheme::Sa,
            WpucnScheme::Aais => Scheme::Aais,
            WpucnScheme::AassI => Scheme::AassI,
            WpucnScheme::AassII => Scheme::AassII,
            WpucnScheme::Rab => Scheme::Rab,
            WpucnScheme::FullCsi => Scheme::FullCsi,
        }
    }
}

impl From<WpucnApproach> for ApproachKind {
    fn from(a: WpucnApproach) -> Self {
        match a {
            WpucnApproach::TraditionalPs => ApproachKind::TraditionalPs,
            WpucnApproach::UavWet => ApproachKind::UavWet,
            WpucnApproach::Hybrid => ApproachKind::Hybrid,
        }
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn wpucn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wpucn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New scenario with every parameter at its default.
#[no_mangle]
pub extern "C" fn wpucn_scenario_default() -> *mut WpucnScenario {
    Box::into_raw(Box::new(WpucnScenario(Scenario::default())))
}

/// Parses a flat TOML scenario; absent keys take their defaults.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpucn_scenario_from_toml(toml: *const c_char, out: *mut *mut WpucnScenario) -> WpucnStatus {
    guard(|| {
        if out.is_null() {
            return fail(WpucnStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = match str_arg(toml, "toml") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_scenario(text) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(WpucnScenario(s)));
                WpucnStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wpucn_scenario_free(scenario: *mut WpucnScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

fn scenario_table(s: &Scenario) -> toml::Table {
    toml::Table::try_from(s).expect("scenario serializes to a table")
}

/// Sets a numeric parameter by its configuration key (for example `vwc_mv`).
/// Integer keys accept whole numbers. The scenario is left unchanged on error.
///
/// # Safety
/// `scenario` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wpucn_scenario_set(
    scenario: *mut WpucnScenario,
    key: *const c_char,
    value: f64,
) -> WpucnStatus {
    guard(|| {
        let Some(handle) = scenario.as_mut() else { return fail(WpucnStatus::NullPointer, "scenario is null") };
        let key = match str_arg(key, "key") {
            Ok(k) => k,
            Err(s) => return s,
        };
        let mut table = scenario_table(&handle.0);
        let item = match table.get(key) {
            Some(toml::Value::Integer(_)) if value.fract() == 0.0 && value >= 0.0 => toml::Value::Integer(value as i64),
            Some(toml::Value::Integer(_)) => {
                return fail(WpucnStatus::InvalidArgument, format!("`{key}` takes a non-negative whole number"))
            }
            Some(toml::Value::Boolean(_)) => toml::Value::Boolean(value != 0.0),
            Some(_) => toml::Value::Float(value),
            // Optional keys are absent from the serialized form while unset.
            None if key.starts_with("soil_eps_") => toml::Value::Float(value),
            None => return fail(WpucnStatus::InvalidArgument, format!("unknown key `{key}`")),
        };
        table.insert(key.to_string(), item);
        match load_scenario(&table.to_string()) {
            Ok(s) => {
                handle.0 = s;
                WpucnStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Reads a numeric parameter by its configuration key.
///
/// # Safety
/// `scenario` must be a live handle, `key` a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpucn_scenario_get(
    scenario: *const WpucnScenario,
    key: *const c_char,
    out: *mut f64,
) -> WpucnStatus {
    guard(|| {
        let (Some(handle), Some(out)) = (scenario.as_ref(), out.as_mut()) else {
            return fail(WpucnStatus::NullPointer, "scenario or out is null");
        };
        let key = match str_arg(key, "key") {
            Ok(k) => k,
            Err(s) => return s,
        };
        match scenario_table(&handle.0).get(key) {
            Some(toml::Value::Float(x)) => *out = *x,
            Some(toml::Value::Integer(i)) => *out = *i as f64,
            Some(toml::Value::Boolean(b)) => *out = f64::from(u8::from(*b)),
            _ => return fail(WpucnStatus::InvalidArgument, format!("no numeric key `{key}`")),
        }
        WpucnStatus::Ok
    })
}

/// Loss factors for a sensor at horizontal position (`x`, `y`) relative to the disk centre.
///
/// # Safety
/// `scenario` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpucn_path_loss(
    scenario: *const WpucnScenario,
    source: WpucnSource,
    x: f64,
    y: f64,
    out: *mut WpucnPathLoss,
) -> WpucnStatus {
    guard(|| {
        let (Some(handle), Some(out)) = (scenario.as_ref(), out.as_mut()) else {
            return fail(WpucnStatus::NullPointer, "scenario or out is null");
        };
        if !(x.is_finite() && y.is_finite()) {
            return fail(WpucnStatus::InvalidArgument, "position must be finite");
        }
        let s = &handle.0;
        let medium = match scenario_medium(s) {
            Ok(m) => m,
            Err(e) => return from_error(e),
        };
        let g = compute_geometry(s, Position { x, y, z: -s.burial_depth });
        let (src, exp) = match source {
            WpucnSource::Hap => (Source::Hap, s.pathloss_exp_p2u),
            WpucnSource::Uav => (Source::Uav, s.pathloss_exp_v2u),
        };
        let k = s.constants();
        let b = total_downlink_loss(&g, src, &medium, exp, s.carrier_freq, &k);
        *out = WpucnPathLoss {
            air: b.air_j,
            refraction: b.refraction_k_a2u,
            soil: b.soil_m,
            total: b.total_delta,
            uplink: uplink_loss(&g, src, &medium, exp, s.carrier_freq, &k),
            alpha: b.alpha,
            beta: b.beta,
        };
        WpucnStatus::Ok
    })
}

/// Samples sensor positions and fading with `seed`, then solves the
/// energy-minimal time allocation. `hap_scheme` or `uav_scheme` is ignored
/// when the approach does not use that source.
///
/// # Safety
/// `scenario` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpucn_plan(
    scenario: *const WpucnScenario,
    approach: WpucnApproach,
    hap_scheme: WpucnScheme,
    uav_scheme: WpucnScheme,
    seed: u64,
    out: *mut *mut WpucnPlan,
) -> WpucnStatus {
    guard(|| {
        if out.is_null() {
            return fail(WpucnStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(handle) = scenario.as_ref() else { return fail(WpucnStatus::NullPointer, "scenario is null") };
        let a = WetApproach::new(approach.into(), hap_scheme.into(), uav_scheme.into());
        match plan(&handle.0, a, seed) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(WpucnPlan(p)));
                WpucnStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `plan` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpucn_plan_summary(plan: *const WpucnPlan, out: *mut WpucnPlanSummary) -> WpucnStatus {
    guard(|| {
        let (Some(p), Some(out)) = (plan.as_ref(), out.as_mut()) else {
            return fail(WpucnStatus::NullPointer, "plan or out is null");
        };
        let p = &p.0;
        *out = WpucnPlanSummary {
            t_p1: p.t_p1,
            t_p2: p.t_p2,
            t_p3: p.t_p3,
            t_p4: p.t_p4,
            t_total: p.t_total,
            energy_j: p.energy.total,
            kkt_residual: p.kkt_residual,
            num_uds: p.taus.len(),
            feasible: p.feasible,
        };
        WpucnStatus::Ok
    })
}

/// Copies the per-sensor upload slots into `out`, which must hold `len` values.
/// `len` must equal the plan's sensor count.
///
/// # Safety
/// `plan` must be a live handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wpucn_plan_slots(plan: *const WpucnPlan, out: *mut f64, len: usize) -> WpucnStatus {
    guard(|| {
        let Some(p) = plan.as_ref() else { return fail(WpucnStatus::NullPointer, "plan is null") };
        if out.is_null() {
            return fail(WpucnStatus::NullPointer, "out is null");
        }
        let taus = &p.0.taus;
        if len != taus.len() {
            return fail(WpucnStatus::InvalidArgument, format!("buffer holds {len} values, plan has {}", taus.len()));
        }
        ptr::copy_nonoverlapping(taus.as_ptr(), out, len);
        WpucnStatus::Ok
    })
}

/// # Safety
/// `plan` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wpucn_plan_free(plan: *mut WpucnPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}
