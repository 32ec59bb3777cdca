//! C ABI for the isoweights library.
//!
//! Conventions:
//! - every fallible function returns an [`IwStatus`]; results come back
//!   through out-pointers;
//! - structured data crosses the boundary as UTF-8 JSON strings;
//! - strings returned by the library are owned by the caller and released
//!   with [`iw_string_free`]; handles are released with their `_free`
//!   function;
//! - the message of the last failure on the calling thread is available from
//!   [`iw_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use isoweights::classify::{classify, classify_cached, ClassifyOptions, RunControl};
use isoweights::fixtures::{fixture, FixtureSpec};
use isoweights::graphs::{enumerate_multigraphs, Dedup, EdgeFilter};
use isoweights::hattori::{dim8_solver, hattori_report};
use isoweights::verify::verify;
use isoweights::{Error, Profile, WeightSystem};
use serde_json::{json, Value};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IwStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON, or a profile violating balance or range.
    Schema = 3,
    /// The profile admits no multigraph, or the requested mode is refused.
    Infeasible = 4,
    /// Any other library failure; see `iw_last_error`.
    Failed = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Opaque weight system.
pub struct IwWeightSystem {
    inner: WeightSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(IwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Schema(_) | Error::BalanceViolation { .. } | Error::RangeViolation { .. } => IwStatus::Schema,
            Error::ProfileUnrealizable | Error::NonIntegralSum | Error::ModeRefused => IwStatus::Infeasible,
            _ => IwStatus::Failed,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(IwStatus::Schema, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IwStatus {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            IwStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside the library");
            IwStatus::Panic
        }
    }
}

unsafe fn input<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(IwStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure(IwStatus::InvalidUtf8, e.to_string()))
}

unsafe fn output<T>(out: *mut T) -> Result<&'static mut T, Failure> {
    out.as_mut().ok_or_else(|| Failure(IwStatus::NullPointer, "null output pointer".into()))
}

unsafe fn handle<'a>(h: *const IwWeightSystem) -> Result<&'a IwWeightSystem, Failure> {
    h.as_ref().ok_or_else(|| Failure(IwStatus::NullPointer, "null handle".into()))
}

fn to_c_string(v: &Value) -> Result<*mut c_char, Failure> {
    let text = serde_json::to_string(v)?;
    Ok(CString::new(text).expect("JSON has no interior NULs").into_raw())
}

unsafe fn write_json(out: *mut *mut c_char, v: &Value) -> Result<(), Failure> {
    let slot = output(out)?;
    *slot = to_c_string(v)?;
    Ok(())
}

fn profile_from(v: &Value) -> Result<Profile, Failure> {
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Failure(IwStatus::Schema, "missing integer field `n`".into()))? as usize;
    Ok(match v.get("lambdas") {
        Some(l) if !l.is_null() => Profile::new(n, serde_json::from_value(l.clone())?)?,
        _ => Profile::minimal(n),
    })
}

/// Message of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn iw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn iw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a weight system from `{"n": …, "points": [{"lambda": …, "weights": […]}, …]}`.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn iw_weight_system_from_json(json: *const c_char, out: *mut *mut IwWeightSystem) -> IwStatus {
    guard(|| {
        let slot = output(out)?;
        let ws = WeightSystem::from_json_str(input(json)?)?;
        *slot = Box::into_raw(Box::new(IwWeightSystem { inner: ws }));
        Ok(())
    })
}

/// Build a standard example from a spec such as `{"name":"cp","xi":[2,1,0]}`.
///
/// # Safety
/// As for [`iw_weight_system_from_json`].
#[no_mangle]
pub unsafe extern "C" fn iw_weight_system_fixture(spec: *const c_char, out: *mut *mut IwWeightSystem) -> IwStatus {
    guard(|| {
        let slot = output(out)?;
        let spec: FixtureSpec = serde_json::from_str(input(spec)?)?;
        *slot = Box::into_raw(Box::new(IwWeightSystem { inner: fixture(&spec)? }));
        Ok(())
    })
}

/// Release a weight system. Null is ignored.
///
/// # Safety
/// `ws` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iw_weight_system_free(ws: *mut IwWeightSystem) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Number of fixed points, or 0 for a null handle.
///
/// # Safety
/// `ws` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iw_weight_system_len(ws: *const IwWeightSystem) -> usize {
    ws.as_ref().map_or(0, |h| h.inner.len())
}

/// Serialize a weight system to JSON.
///
/// # Safety
/// `ws` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_weight_system_to_json(ws: *const IwWeightSystem, out: *mut *mut c_char) -> IwStatus {
    guard(|| write_json(out, &handle(ws)?.inner.to_json()))
}

/// Structural, localization and Laurent checks; writes the report JSON.
///
/// # Safety
/// `ws` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_verify(ws: *const IwWeightSystem, out: *mut *mut c_char) -> IwStatus {
    guard(|| write_json(out, &verify(&handle(ws)?.inner)?.to_json()))
}

/// Level data, `r_s(1)` and (in dimension 8) the solver report.
/// `k0 <= 0` lets the library choose.
///
/// # Safety
/// `ws` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_hattori(ws: *const IwWeightSystem, k0: i64, l_max: i64, out: *mut *mut c_char) -> IwStatus {
    guard(|| {
        let k0 = (k0 > 0).then_some(k0);
        write_json(out, &serde_json::to_value(hattori_report(&handle(ws)?.inner, k0, l_max))?)
    })
}

/// Solutions `(l, m)` of the dimension-8 system for the given `C1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_dim8_solver(c1: i64, l_max: i64, out: *mut *mut c_char) -> IwStatus {
    guard(|| write_json(out, &serde_json::to_value(dim8_solver(c1, l_max))?))
}

/// Enumerate multigraphs. Request: `{"n": 3, "lambdas": [..]?, "filter": "nonnegative"?, "dedup": "reversal"?}`.
///
/// # Safety
/// `request` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_enumerate(request: *const c_char, out: *mut *mut c_char) -> IwStatus {
    guard(|| {
        let req: Value = serde_json::from_str(input(request)?)?;
        let profile = profile_from(&req)?;
        let filter: EdgeFilter = match req.get("filter") {
            Some(f) => serde_json::from_value(f.clone())?,
            None => EdgeFilter::Nonnegative,
        };
        let dedup: Dedup = match req.get("dedup") {
            Some(d) => serde_json::from_value(d.clone())?,
            None => Dedup::Reversal,
        };
        let graphs = enumerate_multigraphs(&profile, filter, dedup)?;
        write_json(
            out,
            &json!({
                "count": graphs.len(),
                "graphs": graphs.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
            }),
        )
    })
}

/// Run the classification. Request: `{"n": 3, "lambdas": [..]?, "options": {..}?, "cache_dir": ".."?}`;
/// missing option fields take their defaults.
///
/// # Safety
/// `request` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_classify(request: *const c_char, out: *mut *mut c_char) -> IwStatus {
    guard(|| {
        let req: Value = serde_json::from_str(input(request)?)?;
        let profile = profile_from(&req)?;
        let opts: ClassifyOptions = match req.get("options") {
            Some(o) => serde_json::from_value(o.clone())?,
            None => ClassifyOptions::default(),
        };
        let report = match req.get("cache_dir").and_then(Value::as_str) {
            Some(dir) => classify_cached(&profile, &opts, Path::new(dir), &RunControl::default())?,
            None => classify(&profile, &opts)?,
        };
        write_json(out, &serde_json::to_value(report)?)
    })
}
