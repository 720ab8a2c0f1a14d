//! C interface to `rcotto`.
//!
//! Configurations live behind an opaque `RcOttoConfig` handle created with
//! `rcotto_config_new` or `rcotto_config_from_file` and released with
//! `rcotto_config_free`. Every fallible call returns an `RcOttoStatus`; on
//! failure `rcotto_last_error` describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rcotto::otto::{self, CouplingModel, CycleConfig, DecouplingMode, OperatingMode, StrokeMode};
use rcotto::sweep::{self, EXIT_CONFIG};
use rcotto::{Error, ReservoirSpec, TlsParams};

/// Status codes. The first four match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcOttoStatus {
    Ok = 0,
    ConfigError = 1,
    NumericalError = 2,
    /// The result was written but the Fock truncation check failed.
    Unconverged = 3,
    NullPointer = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcOttoCoupling {
    Weak = 0,
    RcStrong = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcOttoStroke {
    Adiabatic = 0,
    Sudden = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcOttoDecoupling {
    Instantaneous = 0,
    Adiabatic = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcOttoMode {
    Engine = 0,
    Refrigerator = 1,
    Neither = 2,
}

/// Plain-data description of a cycle. One alpha and omega_c serve both
/// reservoirs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcOttoParams {
    pub epsilon_h: f64,
    pub epsilon_c: f64,
    pub delta_h: f64,
    pub delta_c: f64,
    pub beta_h: f64,
    pub beta_c: f64,
    pub alpha: f64,
    pub omega_c: f64,
    pub n: u32,
    pub coupling_model: RcOttoCoupling,
    pub stroke_mode: RcOttoStroke,
    pub decoupling_mode: RcOttoDecoupling,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcOttoCycleResult {
    pub w_out: f64,
    pub q_hot: f64,
    pub q_cold: f64,
    pub w_dec_h: f64,
    pub w_dec_c: f64,
    pub q_dec_h: f64,
    pub q_dec_c: f64,
    /// NaN when no heat enters from the hot side.
    pub eta: f64,
    pub mode: RcOttoMode,
    pub converged: bool,
}

/// Opaque configuration handle.
pub struct RcOttoConfig {
    cfg: CycleConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &Error) -> RcOttoStatus {
    if sweep::exit_code(err) == EXIT_CONFIG {
        RcOttoStatus::ConfigError
    } else {
        RcOttoStatus::NumericalError
    }
}

fn guarded(f: impl FnOnce() -> Result<RcOttoStatus, (RcOttoStatus, String)>) -> RcOttoStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RcOttoStatus::Panic
        }
    }
}

fn fail(err: Error) -> (RcOttoStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (RcOttoStatus, String) {
    (RcOttoStatus::NullPointer, format!("{what} is null"))
}

impl RcOttoParams {
    fn to_config(self) -> Result<CycleConfig, Error> {
        let cfg = CycleConfig {
            hot: ReservoirSpec::new(self.beta_h, self.alpha, self.omega_c)?,
            cold: ReservoirSpec::new(self.beta_c, self.alpha, self.omega_c)?,
            tls_hot: TlsParams::new(self.epsilon_h, self.delta_h),
            tls_cold: TlsParams::new(self.epsilon_c, self.delta_c),
            n: self.n as usize,
            coupling_model: match self.coupling_model {
                RcOttoCoupling::Weak => CouplingModel::Weak,
                RcOttoCoupling::RcStrong => CouplingModel::RcStrong,
            },
            stroke_mode: match self.stroke_mode {
                RcOttoStroke::Adiabatic => StrokeMode::Adiabatic,
                RcOttoStroke::Sudden => StrokeMode::Sudden,
            },
            decoupling_mode: match self.decoupling_mode {
                RcOttoDecoupling::Instantaneous => DecouplingMode::Instantaneous,
                RcOttoDecoupling::Adiabatic => DecouplingMode::AdiabaticDecoupling,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn into_handle(cfg: CycleConfig, out: *mut *mut RcOttoConfig) {
    let handle = Box::into_raw(Box::new(RcOttoConfig { cfg }));
    // SAFETY: caller checked `out` for null; it points to writable storage.
    unsafe { *out = handle };
}

/// Fills `out` with defaults: n = 30, strong coupling, adiabatic strokes,
/// instantaneous decoupling, and zero for every physical parameter.
///
/// # Safety
/// `out` must be null or point to writable storage for one `RcOttoParams`.
#[no_mangle]
pub unsafe extern "C" fn rcotto_params_default(out: *mut RcOttoParams) -> RcOttoStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = RcOttoParams {
            epsilon_h: 0.0,
            epsilon_c: 0.0,
            delta_h: 0.0,
            delta_c: 0.0,
            beta_h: 0.0,
            beta_c: 0.0,
            alpha: 0.0,
            omega_c: 0.0,
            n: 30,
            coupling_model: RcOttoCoupling::RcStrong,
            stroke_mode: RcOttoStroke::Adiabatic,
            decoupling_mode: RcOttoDecoupling::Instantaneous,
        };
        unsafe { out.write(params) };
        Ok(RcOttoStatus::Ok)
    })
}

/// Validates `params` and stores a new handle in `*out`.
///
/// # Safety
/// `params` must be null or point to a valid `RcOttoParams`; `out` must be
/// null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rcotto_config_new(
    params: *const RcOttoParams,
    out: *mut *mut RcOttoConfig,
) -> RcOttoStatus {
    guarded(|| {
        if params.is_null() {
            return Err(null("params"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { *out = ptr::null_mut() };
        let cfg = unsafe { *params }.to_config().map_err(fail)?;
        into_handle(cfg, out);
        Ok(RcOttoStatus::Ok)
    })
}

/// Parses a `key = value` config file and stores a new handle in `*out`.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out` must be null or
/// point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rcotto_config_from_file(
    path: *const c_char,
    out: *mut *mut RcOttoConfig,
) -> RcOttoStatus {
    guarded(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { *out = ptr::null_mut() };
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| (RcOttoStatus::ConfigError, "path is not valid UTF-8".to_string()))?;
        let cfg = sweep::parse_config(Path::new(path)).map_err(fail)?;
        into_handle(cfg, out);
        Ok(RcOttoStatus::Ok)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rcotto_config_free(config: *mut RcOttoConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Evaluates the cycle. On `RC_OTTO_STATUS_OK` and `RC_OTTO_STATUS_UNCONVERGED`
/// the result is written to `*out`.
///
/// # Safety
/// `config` must be null or a live handle; `out` must be null or point to
/// writable storage for one `RcOttoCycleResult`.
#[no_mangle]
pub unsafe extern "C" fn rcotto_run_cycle(
    config: *const RcOttoConfig,
    out: *mut RcOttoCycleResult,
) -> RcOttoStatus {
    guarded(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = unsafe { &(*config).cfg };
        let (r, _) = sweep::run_cycle(cfg).map_err(fail)?;
        let result = RcOttoCycleResult {
            w_out: r.w_out,
            q_hot: r.q_hot,
            q_cold: r.q_cold,
            w_dec_h: r.w_decouple_hot,
            w_dec_c: r.w_decouple_cold,
            q_dec_h: r.q_decouple_hot,
            q_dec_c: r.q_decouple_cold,
            eta: r.eta.unwrap_or(f64::NAN),
            mode: match r.mode {
                OperatingMode::Engine => RcOttoMode::Engine,
                OperatingMode::Refrigerator => RcOttoMode::Refrigerator,
                OperatingMode::Neither => RcOttoMode::Neither,
            },
            converged: r.converged,
        };
        unsafe { out.write(result) };
        if r.converged {
            Ok(RcOttoStatus::Ok)
        } else {
            set_last_error("Fock truncation not converged");
            Ok(RcOttoStatus::Unconverged)
        }
    })
}

/// Largest relative change of any cycle-point energy between the configured
/// truncation and five fewer Fock levels.
///
/// # Safety
/// `config` must be null or a live handle; `out` must be null or point to a
/// writable `double`.
#[no_mangle]
pub unsafe extern "C" fn rcotto_truncation_delta(
    config: *const RcOttoConfig,
    out: *mut f64,
) -> RcOttoStatus {
    guarded(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = unsafe { &(*config).cfg };
        let delta = match cfg.coupling_model {
            CouplingModel::Weak => 0.0,
            CouplingModel::RcStrong => otto::strong_point_energies(cfg).map_err(fail)?.truncation_delta,
        };
        unsafe { out.write(delta) };
        Ok(RcOttoStatus::Ok)
    })
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn rcotto_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rcotto_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
