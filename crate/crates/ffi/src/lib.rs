//! C ABI over `semuav-core`.
//!
//! Every function returns a [`SemStatus`] and writes results through out
//! pointers. Handles are opaque and owned by the caller once returned; free
//! them with the matching `*_free` function. On failure a message is kept
//! per thread and can be read with [`sem_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use semuav_core::baselines::{run_scheme_with, BcdOptions, Scheme};
use semuav_core::experiment::{load_config, parse_config, ScenarioConfig};
use semuav_core::numerics::{lambert_w0, lambert_wm1};
use semuav_core::placement::optimal_uav_location;
use semuav_core::power_search::{GridSpec, Solution};
use semuav_core::system_model::SystemParams;
use semuav_core::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Io = 4,
    Infeasible = 5,
    Numeric = 6,
    Internal = 7,
    Panic = 8,
}

impl From<&Error> for SemStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain { .. } | Error::NoSignChange { .. } | Error::NonFinite(_) => {
                SemStatus::Numeric
            }
            Error::DegeneratePosition | Error::InvalidParameter { .. } => {
                SemStatus::InvalidArgument
            }
            Error::PlacementInfeasible { .. } | Error::Infeasible(_) => SemStatus::Infeasible,
            Error::Config { .. } => SemStatus::Config,
            Error::Io { .. } => SemStatus::Io,
            Error::Internal(_) => SemStatus::Internal,
        }
    }
}

/// Scenario: model parameters plus solver settings.
pub struct SemParams {
    params: SystemParams,
    grid: GridSpec,
    bcd: BcdOptions,
}

/// Result of one solve.
pub struct SemSolution {
    inner: Solution,
}

/// Flat copy of the main fields of a solution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SemSummary {
    pub e_total: f64,
    pub t_total: f64,
    /// 0 = offload to the server, 1 = generate at the BS.
    pub offload: u8,
    pub rho: f64,
    pub p_uav: f64,
    pub p_bs: f64,
    pub x: f64,
    pub y: f64,
    pub h: f64,
    pub qos: f64,
    /// Best energies with a = 0 and a = 1; infinity when infeasible.
    pub v0: f64,
    pub v1: f64,
    pub e_u: f64,
    pub e_ub: f64,
    pub e_b: f64,
    pub e_bi: f64,
    pub e_bs: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn fail(status: SemStatus, msg: &str) -> SemStatus {
    set_last_error(msg);
    status
}

fn fail_with(e: &Error) -> SemStatus {
    fail(SemStatus::from(e), &e.to_string())
}

/// Runs `f`, turning panics into `SemStatus::Panic`.
fn guard(f: impl FnOnce() -> SemStatus) -> SemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == SemStatus::Ok {
                set_last_error("");
            }
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SemStatus::Panic, &format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, SemStatus> {
    if s.is_null() {
        return Err(fail(SemStatus::NullPointer, &format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(SemStatus::InvalidArgument, &format!("{what} is not UTF-8")))
}

fn from_config(cfg: ScenarioConfig) -> Result<SemParams, SemStatus> {
    let params = cfg.system_params().map_err(|e| fail_with(&e))?;
    Ok(SemParams {
        params,
        grid: cfg.grid,
        bcd: cfg.bcd,
    })
}

unsafe fn hand_out<T>(value: T, out: *mut *mut T) -> SemStatus {
    *out = Box::into_raw(Box::new(value));
    SemStatus::Ok
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default scenario.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_params_default(out: *mut *mut SemParams) -> SemStatus {
    guard(|| {
        if out.is_null() {
            return fail(SemStatus::NullPointer, "out is null");
        }
        match from_config(ScenarioConfig::default()) {
            Ok(p) => hand_out(p, out),
            Err(s) => s,
        }
    })
}

/// Scenario from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_params_from_toml(
    toml: *const c_char,
    out: *mut *mut SemParams,
) -> SemStatus {
    guard(|| {
        if out.is_null() {
            return fail(SemStatus::NullPointer, "out is null");
        }
        let text = match read_str(toml, "toml") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_config(text, Path::new("<string>")) {
            Ok(cfg) => match from_config(cfg) {
                Ok(p) => hand_out(p, out),
                Err(s) => s,
            },
            Err(e) => fail_with(&e),
        }
    })
}

/// Scenario from a TOML file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_params_from_file(
    path: *const c_char,
    out: *mut *mut SemParams,
) -> SemStatus {
    guard(|| {
        if out.is_null() {
            return fail(SemStatus::NullPointer, "out is null");
        }
        let path = match read_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_config(Path::new(path)) {
            Ok(cfg) => match from_config(cfg) {
                Ok(p) => hand_out(p, out),
                Err(s) => s,
            },
            Err(e) => fail_with(&e),
        }
    })
}

/// # Safety
/// `params` must come from one of the constructors, or be null.
#[no_mangle]
pub unsafe extern "C" fn sem_params_free(params: *mut SemParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Sets a model parameter by symbolic name (e.g. "B_B", "T_th", "D") in SI
/// units. The scenario is validated on the next solve.
///
/// # Safety
/// `params` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sem_params_set(
    params: *mut SemParams,
    name: *const c_char,
    value: f64,
) -> SemStatus {
    guard(|| {
        let Some(p) = params.as_mut() else {
            return fail(SemStatus::NullPointer, "params is null");
        };
        let name = match read_str(name, "name") {
            Ok(n) => n,
            Err(s) => return s,
        };
        match p.params.set(name, value) {
            Ok(()) => SemStatus::Ok,
            Err(e) => fail_with(&e),
        }
    })
}

/// Reads a model parameter by symbolic name, in SI units.
///
/// # Safety
/// `params` must be a live handle, `name` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_params_get(
    params: *const SemParams,
    name: *const c_char,
    out: *mut f64,
) -> SemStatus {
    guard(|| {
        let Some(p) = params.as_ref() else {
            return fail(SemStatus::NullPointer, "params is null");
        };
        if out.is_null() {
            return fail(SemStatus::NullPointer, "out is null");
        }
        let name = match read_str(name, "name") {
            Ok(n) => n,
            Err(s) => return s,
        };
        match p.params.get(name) {
            Ok(v) => {
                *out = v;
                SemStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Power grid resolution and number of zoom-in rounds.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sem_params_set_grid(
    params: *mut SemParams,
    n_pu: usize,
    n_pb: usize,
    refine_rounds: u32,
) -> SemStatus {
    guard(|| {
        let Some(p) = params.as_mut() else {
            return fail(SemStatus::NullPointer, "params is null");
        };
        let grid = GridSpec {
            n_pu,
            n_pb,
            refine_rounds,
            ..p.grid
        };
        match grid.validate() {
            Ok(()) => {
                p.grid = grid;
                SemStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Checks the scenario without solving it.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sem_params_validate(params: *const SemParams) -> SemStatus {
    guard(|| {
        let Some(p) = params.as_ref() else {
            return fail(SemStatus::NullPointer, "params is null");
        };
        match p.params.validate() {
            Ok(()) => SemStatus::Ok,
            Err(e) => fail_with(&e),
        }
    })
}

/// Closed-form UAV location.
///
/// # Safety
/// `params` must be a live handle and `x`, `y`, `h` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sem_uav_location(
    params: *const SemParams,
    x: *mut f64,
    y: *mut f64,
    h: *mut f64,
) -> SemStatus {
    guard(|| {
        let Some(p) = params.as_ref() else {
            return fail(SemStatus::NullPointer, "params is null");
        };
        if x.is_null() || y.is_null() || h.is_null() {
            return fail(SemStatus::NullPointer, "output pointer is null");
        }
        match optimal_uav_location(&p.params) {
            Ok(r) => {
                (*x, *y, *h) = (r.loc.x, r.loc.y, r.loc.h);
                SemStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Solves the scenario with the named scheme ("proposed", "bcd",
/// "non_semantic", ...). Null `scheme` means "proposed".
///
/// # Safety
/// `params` must be a live handle, `scheme` null or a NUL-terminated
/// string, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_solve(
    params: *const SemParams,
    scheme: *const c_char,
    out: *mut *mut SemSolution,
) -> SemStatus {
    guard(|| {
        let Some(p) = params.as_ref() else {
            return fail(SemStatus::NullPointer, "params is null");
        };
        if out.is_null() {
            return fail(SemStatus::NullPointer, "out is null");
        }
        let scheme = if scheme.is_null() {
            Scheme::Proposed
        } else {
            let tag = match read_str(scheme, "scheme") {
                Ok(t) => t,
                Err(s) => return s,
            };
            match tag.parse::<Scheme>() {
                Ok(s) => s,
                Err(e) => return fail_with(&e),
            }
        };
        match run_scheme_with(&p.params, scheme, &p.grid, &p.bcd) {
            Ok(inner) => hand_out(SemSolution { inner }, out),
            Err(e) => fail_with(&e),
        }
    })
}

/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_solution_summary(
    solution: *const SemSolution,
    out: *mut SemSummary,
) -> SemStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return fail(SemStatus::NullPointer, "solution is null");
        };
        if out.is_null() {
            return fail(SemStatus::NullPointer, "out is null");
        }
        let (d, m) = (&s.inner.decision, &s.inner.metrics);
        *out = SemSummary {
            e_total: m.e_total,
            t_total: m.t_total,
            offload: d.offload.bit(),
            rho: d.rho,
            p_uav: d.p_uav,
            p_bs: d.p_bs,
            x: d.loc.x,
            y: d.loc.y,
            h: d.loc.h,
            qos: m.q,
            v0: s.inner.v0,
            v1: s.inner.v1,
            e_u: m.e_u,
            e_ub: m.e_ub,
            e_b: m.e_b,
            e_bi: m.e_bi,
            e_bs: m.e_bs,
        };
        SemStatus::Ok
    })
}

/// Full solution as JSON. Free the string with [`sem_string_free`].
///
/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_solution_json(
    solution: *const SemSolution,
    out: *mut *mut c_char,
) -> SemStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return fail(SemStatus::NullPointer, "solution is null");
        };
        if out.is_null() {
            return fail(SemStatus::NullPointer, "out is null");
        }
        let text = match serde_json::to_string(&s.inner) {
            Ok(t) => t,
            Err(e) => return fail(SemStatus::Internal, &e.to_string()),
        };
        match CString::new(text) {
            Ok(c) => {
                *out = c.into_raw();
                SemStatus::Ok
            }
            Err(e) => fail(SemStatus::Internal, &e.to_string()),
        }
    })
}

/// # Safety
/// `solution` must come from [`sem_solve`], or be null.
#[no_mangle]
pub unsafe extern "C" fn sem_solution_free(solution: *mut SemSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn sem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Principal branch of the Lambert W function.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_lambert_w0(x: f64, out: *mut f64) -> SemStatus {
    lambert(x, out, lambert_w0)
}

/// Lower branch of the Lambert W function, for -1/e <= x < 0.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sem_lambert_wm1(x: f64, out: *mut f64) -> SemStatus {
    lambert(x, out, lambert_wm1)
}

unsafe fn lambert(x: f64, out: *mut f64, f: fn(f64) -> semuav_core::Result<f64>) -> SemStatus {
    guard(|| {
        if out.is_null() {
            return fail(SemStatus::NullPointer, "out is null");
        }
        match f(x) {
            Ok(w) => {
                *out = w;
                SemStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}
