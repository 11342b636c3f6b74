//! C ABI for `rigidity-lab`.
//!
//! Every entry point returns an [`RlStatus`]. Reports are JSON strings owned
//! by an opaque [`RlReport`] handle; free them with [`rl_report_free`].
//! The message for the most recent failure on the calling thread is
//! available from [`rl_last_error`].

use rigidity_lab::app::{run_json, EXIT_DOMAIN, EXIT_MALFORMED, EXIT_OK};
use rigidity_lab::matrix_core::{is_hyperbolic, IntMatrix};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    /// Malformed input: bad JSON, wrong shapes, invalid parameters.
    Malformed = 1,
    /// Well-formed input for which the computation is undefined or fails
    /// (not hyperbolic, unsolvable lifting, ...). A report is still produced.
    Domain = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// Opaque report handle.
pub struct RlReport {
    json: CString,
    status: RlStatus,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guarded(f: impl FnOnce() -> RlStatus) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            RlStatus::Panic
        }
    }
}

fn status_of(code: i32) -> RlStatus {
    match code {
        EXIT_OK => RlStatus::Ok,
        EXIT_MALFORMED => RlStatus::Malformed,
        EXIT_DOMAIN => RlStatus::Domain,
        _ => RlStatus::Panic,
    }
}

/// Runs a JSON request such as `{"command": "hyperbolic", "matrix": [[2,1],[1,1]]}`.
///
/// On `RL_STATUS_OK`, `RL_STATUS_MALFORMED` and `RL_STATUS_DOMAIN` a report
/// is stored in `*out` (the error JSON for the latter two).
///
/// # Safety
/// `request` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_run_json(request: *const c_char, out: *mut *mut RlReport) -> RlStatus {
    guarded(|| {
        clear_error();
        if request.is_null() || out.is_null() {
            set_error("null pointer argument");
            return RlStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(request).to_str() else {
            set_error("request is not valid UTF-8");
            return RlStatus::InvalidUtf8;
        };
        let (code, body) = run_json(text);
        let status = status_of(code);
        if status != RlStatus::Ok {
            let msg = body.get("message").and_then(|m| m.as_str()).unwrap_or("error");
            set_error(msg);
        }
        let json = CString::new(serde_json::to_string(&body).unwrap_or_default()).unwrap_or_default();
        *out = Box::into_raw(Box::new(RlReport { json, status }));
        status
    })
}

/// Borrowed JSON text of a report; valid until the report is freed.
///
/// # Safety
/// `report` must come from [`rl_run_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_report_json(report: *const RlReport) -> *const c_char {
    match report.as_ref() {
        Some(r) => r.json.as_ptr(),
        None => ptr::null(),
    }
}

/// # Safety
/// `report` must come from [`rl_run_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_report_status(report: *const RlReport) -> RlStatus {
    match report.as_ref() {
        Some(r) => r.status,
        None => RlStatus::NullPointer,
    }
}

/// # Safety
/// `report` must come from [`rl_run_json`]; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rl_report_free(report: *mut RlReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Hyperbolicity of a `d × d` integer matrix given row-major.
///
/// # Safety
/// `entries` must point to `d * d` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rl_is_hyperbolic(entries: *const i64, d: usize, tol: f64, out: *mut bool) -> RlStatus {
    guarded(|| {
        clear_error();
        if entries.is_null() || out.is_null() {
            set_error("null pointer argument");
            return RlStatus::NullPointer;
        }
        let Some(len) = d.checked_mul(d) else {
            set_error("dimension overflow");
            return RlStatus::Malformed;
        };
        let flat = std::slice::from_raw_parts(entries, len);
        let rows: Vec<Vec<i64>> = flat.chunks(d.max(1)).map(<[i64]>::to_vec).collect();
        let m = match IntMatrix::from_i64(&rows) {
            Ok(m) => m,
            Err(e) => {
                set_error(&e.to_string());
                return RlStatus::Malformed;
            }
        };
        match is_hyperbolic(&m, tol) {
            Ok(r) => {
                *out = r.hyperbolic;
                RlStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RlStatus::Malformed
            }
        }
    })
}

/// Message for the last failure on this thread, or null. Borrowed until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn rl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Report schema version, a static string.
#[no_mangle]
pub extern "C" fn rl_schema_version() -> *const c_char {
    c"v1".as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(req: &str) -> (RlStatus, String) {
        let c = CString::new(req).unwrap();
        let mut out = ptr::null_mut();
        unsafe {
            let s = rl_run_json(c.as_ptr(), &mut out);
            let body = CStr::from_ptr(rl_report_json(out)).to_str().unwrap().to_string();
            assert_eq!(rl_report_status(out), s);
            rl_report_free(out);
            (s, body)
        }
    }

    #[test]
    fn statuses_follow_exit_codes() {
        let (s, body) = run(r#"{"command":"hyperbolic","matrix":[[2,1],[1,1]]}"#);
        assert_eq!(s, RlStatus::Ok);
        assert!(body.contains("\"schema\":\"v1\""));
        assert!(rl_last_error().is_null());
        let (s, body) = run(r#"{"command":"hyperbolic","matrix":[[1,0],[0,1]]}"#);
        assert_eq!(s, RlStatus::Domain);
        assert!(body.contains("NotHyperbolic"));
        assert!(!rl_last_error().is_null());
        assert_eq!(run("[").0, RlStatus::Malformed);
    }

    #[test]
    fn null_and_typed_entry_points() {
        unsafe {
            assert_eq!(rl_run_json(ptr::null(), ptr::null_mut()), RlStatus::NullPointer);
            let mut h = false;
            assert_eq!(rl_is_hyperbolic([2i64, 1, 1, 1].as_ptr(), 2, 1e-9, &mut h), RlStatus::Ok);
            assert!(h);
            assert_eq!(rl_is_hyperbolic([0i64, -1, 1, 0].as_ptr(), 2, 1e-9, &mut h), RlStatus::Ok);
            assert!(!h);
            assert_eq!(rl_is_hyperbolic([1i64].as_ptr(), 1, -1.0, &mut h), RlStatus::Malformed);
            assert_eq!(CStr::from_ptr(rl_schema_version()).to_str().unwrap(), "v1");
        }
    }
}
