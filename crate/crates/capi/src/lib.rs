//! C ABI over the oligopoly solver: opaque instance handles, JSON in and
//! JSON out, scalar bound evaluators, and integer status codes.
//!
//! Every function is panic-safe: unwinding is caught at the boundary and
//! reported as [`CournotStatus::InternalError`].  Error details are stored
//! per thread and readable through [`cournot_last_error`] until the next
//! failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cournot::efficiency;
use cournot::solver::{self, SolveError, SolverConfig};
use cournot::MarketInstance;

/// Opaque market handle created by `cournot_instance_parse` and released
/// by `cournot_instance_free`.
pub struct CournotInstance {
    inner: MarketInstance,
}

/// Result of a C-interface call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CournotStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The instance JSON did not describe a valid market.
    ParseError = 3,
    /// The market is degenerate: no supplier can profitably produce.
    Degenerate = 4,
    /// A solver failed; see `cournot_last_error`.
    SolverError = 5,
    /// A numeric argument was outside its domain.
    InvalidArgument = 6,
    /// An internal invariant failed; see `cournot_last_error`.
    InternalError = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn record_error(msg: String) {
    let stored = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn fail(status: CournotStatus, msg: String) -> CournotStatus {
    record_error(msg);
    status
}

/// Runs a closure, converting panics into `InternalError`.
fn guarded(body: impl FnOnce() -> CournotStatus) -> CournotStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".to_string());
            fail(CournotStatus::InternalError, msg)
        }
    }
}

/// Message describing the most recent failure on this thread, or null when
/// every call so far succeeded.  The pointer stays valid until the next
/// failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn cournot_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |s| s.as_ptr())
    })
}

/// Parses an instance from JSON of the form
/// `{"demand": {...}, "costs": [...], "R": <optional>}` and stores a heap
/// handle in `out`.  On any failure `out` is untouched.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` to writable
/// memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_instance_parse(
    json: *const c_char,
    out: *mut *mut CournotInstance,
) -> CournotStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(CournotStatus::NullPointer, "null argument".into());
        }
        let raw = unsafe { CStr::from_ptr(json) };
        let text = match raw.to_str() {
            Ok(t) => t,
            Err(e) => return fail(CournotStatus::InvalidUtf8, e.to_string()),
        };
        match MarketInstance::from_json(text) {
            Ok(inner) => {
                let handle = Box::new(CournotInstance { inner });
                unsafe { out.write(Box::into_raw(handle)) };
                CournotStatus::Ok
            }
            Err(e) => fail(CournotStatus::ParseError, e.to_string()),
        }
    })
}

/// Releases a handle returned by `cournot_instance_parse`.  Null is a
/// no-op.  Passing the same handle twice is undefined behavior.
///
/// # Safety
/// `inst` must be null or a pointer obtained from `cournot_instance_parse`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn cournot_instance_free(inst: *mut CournotInstance) {
    if !inst.is_null() {
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Number of suppliers in the instance, or -1 when `inst` is null.
///
/// # Safety
/// `inst` must be null or a live handle from `cournot_instance_parse`.
#[no_mangle]
pub unsafe extern "C" fn cournot_instance_suppliers(inst: *const CournotInstance) -> c_int {
    if inst.is_null() {
        return -1;
    }
    unsafe { &*inst }.inner.n() as c_int
}

/// Solves the instance end to end — social optimum, stationary candidates
/// with deviation audits, monopoly output, and every applicable efficiency
/// bound — and stores the JSON report as a NUL-terminated string in `out`.
/// Free the string with `cournot_string_free`.
///
/// `residual_tol` overrides the first-order residual tolerance when it is
/// a finite positive number; any other value keeps the default (1e-8).
///
/// # Safety
/// `inst` must be a live handle from `cournot_instance_parse` and `out`
/// must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_instance_analyze_json(
    inst: *const CournotInstance,
    residual_tol: f64,
    out: *mut *mut c_char,
) -> CournotStatus {
    guarded(|| {
        if inst.is_null() || out.is_null() {
            return fail(CournotStatus::NullPointer, "null argument".into());
        }
        let market = &unsafe { &*inst }.inner;
        let mut cfg = SolverConfig::default();
        if residual_tol.is_finite() && residual_tol > 0.0 {
            cfg.residual_tol = residual_tol;
        }
        let report = match efficiency::analyze(market, &cfg) {
            Ok(r) => r,
            Err(SolveError::Degenerate) => {
                return fail(CournotStatus::Degenerate, SolveError::Degenerate.to_string())
            }
            Err(e) => return fail(CournotStatus::SolverError, e.to_string()),
        };
        let text = match serde_json::to_string_pretty(&report) {
            Ok(t) => t,
            Err(e) => return fail(CournotStatus::InternalError, e.to_string()),
        };
        match CString::new(text) {
            Ok(s) => {
                unsafe { out.write(s.into_raw()) };
                CournotStatus::Ok
            }
            Err(e) => fail(CournotStatus::InternalError, e.to_string()),
        }
    })
}

/// Largest profit any supplier could still gain by deviating from the
/// allocation `x` (length `len`), written to `out_deficit`; `out_verified`
/// receives 1 when no profitable deviation exists within tolerance.
///
/// # Safety
/// `inst` must be a live handle; `x` must point to `len` doubles;
/// `out_deficit` and `out_verified` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cournot_instance_verify(
    inst: *const CournotInstance,
    x: *const f64,
    len: usize,
    out_deficit: *mut f64,
    out_verified: *mut c_int,
) -> CournotStatus {
    guarded(|| {
        if inst.is_null() || x.is_null() || out_deficit.is_null() || out_verified.is_null() {
            return fail(CournotStatus::NullPointer, "null argument".into());
        }
        let market = &unsafe { &*inst }.inner;
        if len != market.n() {
            return fail(
                CournotStatus::InvalidArgument,
                format!("allocation has {len} entries for {} suppliers", market.n()),
            );
        }
        let values = unsafe { std::slice::from_raw_parts(x, len) }.to_vec();
        let alloc = match cournot::model::Allocation::new(values) {
            Ok(a) => a,
            Err(e) => return fail(CournotStatus::InvalidArgument, e.to_string()),
        };
        let audit = solver::verify_equilibrium(market, &alloc, &SolverConfig::default());
        unsafe {
            out_deficit.write(audit.max_deficit);
            out_verified.write(c_int::from(audit.verified));
        }
        CournotStatus::Ok
    })
}

/// Releases a string returned by this library.  Null is a no-op.
///
/// # Safety
/// `s` must be null or a string pointer produced by this library that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn cournot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Worst-case efficiency `3b^2 - 4b + 2` of a stationary allocation with
/// normalized aggregate `b` under affine demand.  Returns NaN outside the
/// domain `0.5 <= b < 1`.
#[no_mangle]
pub extern "C" fn cournot_bound_g(b: f64) -> f64 {
    if !(0.5 - 1e-12..1.0).contains(&b) {
        return f64::NAN;
    }
    efficiency::bound_g(b)
}

/// Worst-case equilibrium efficiency for convex demand with curvature
/// ratio `cbar >= 1`.  Returns NaN outside the domain.
#[no_mangle]
pub extern "C" fn cournot_bound_f(cbar: f64) -> f64 {
    efficiency::bound_f(cbar).unwrap_or(f64::NAN)
}

/// Worst-case monopoly efficiency `3/(3 + cbar)` for convex demand with
/// curvature ratio `cbar >= 1`.  Returns NaN outside the domain.
#[no_mangle]
pub extern "C" fn cournot_bound_mono(cbar: f64) -> f64 {
    efficiency::bound_mono(cbar).unwrap_or(f64::NAN)
}
