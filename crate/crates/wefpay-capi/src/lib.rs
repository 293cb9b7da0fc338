//! C ABI for the wefpay library: parse an instance document once, then run
//! checks, optimizations, searches, and transforms against the opaque
//! handle.
//!
//! Conventions shared by every function:
//!
//! - Fallible functions return a [`WefpayStatus`]. `Ok` and `Negative` are
//!   both completed computations — `Negative` is a negative verdict (envy
//!   found, no feasible payments, a failed transform precondition, or a
//!   violated bound). `Invalid` and `Internal` mean no result was produced;
//!   [`wefpay_last_error_message`] returns the reason.
//! - Results are NUL-terminated UTF-8 JSON strings written through
//!   out-parameters. The caller owns every returned string and releases it
//!   with [`wefpay_string_free`].
//! - Documents come from [`wefpay_doc_parse`] and are released with
//!   [`wefpay_doc_free`]. Handles are not synchronized; share one across
//!   threads only behind the caller's own lock.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::fmt::Display;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::str::FromStr;

use wefpay::envy_graph::{self, EnvyGraphError};
use wefpay::io::{self, Document};
use wefpay::model::{check_wef, parse_rational, Allocation, PaymentVector};
use wefpay::optimize::{self, ObjectiveKind, OptimizeError};
use wefpay::transforms::{self, TransformError};

/// Outcome of a fallible call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WefpayStatus {
    /// The computation completed with a positive verdict.
    Ok = 0,
    /// The computation completed with a negative verdict: envy was found,
    /// no payment vector works, a transform precondition failed, or a
    /// bound is violated. Output is still written where documented.
    Negative = 1,
    /// The input could not be processed: malformed JSON, a missing
    /// document field, an unknown objective or transform, or a guard
    /// refused the problem size. No output is written.
    Invalid = 2,
    /// An internal error in the library; no output is written.
    Internal = 3,
}

/// Opaque handle to a parsed instance document.
pub struct WefpayDoc {
    inner: Document,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

/// Records `message` and returns `status`, so error paths read
/// `return Err(fail(...))`.
fn fail(status: WefpayStatus, message: impl Display) -> WefpayStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(text).expect("NUL bytes were replaced"));
    });
    status
}

/// Clears the error slot, runs the body, and converts panics into
/// [`WefpayStatus::Internal`] so unwinding never crosses the C boundary.
fn guarded(body: impl FnOnce() -> Result<WefpayStatus, WefpayStatus>) -> WefpayStatus {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) | Ok(Err(status)) => status,
        Err(_) => fail(WefpayStatus::Internal, "internal panic in wefpay"),
    }
}

/// # Safety
///
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, WefpayStatus> {
    if ptr.is_null() {
        return Err(fail(WefpayStatus::Invalid, format!("{} is null", what)));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(WefpayStatus::Invalid, format!("{} is not valid UTF-8", what)))
}

/// # Safety
///
/// `doc` must be null or a live handle from [`wefpay_doc_parse`].
unsafe fn read_doc<'a>(doc: *const WefpayDoc) -> Result<&'a Document, WefpayStatus> {
    doc.as_ref()
        .map(|handle| &handle.inner)
        .ok_or_else(|| fail(WefpayStatus::Invalid, "document handle is null"))
}

/// Validates an out-parameter and initializes it to null.
///
/// # Safety
///
/// `out` must be null or valid for writes.
unsafe fn prepare_out<T>(out: *mut *mut T) -> Result<(), WefpayStatus> {
    if out.is_null() {
        return Err(fail(WefpayStatus::Invalid, "out-parameter is null"));
    }
    *out = ptr::null_mut();
    Ok(())
}

/// Hands `text` to the caller through a prepared out-parameter.
///
/// # Safety
///
/// `out` must have passed [`prepare_out`].
unsafe fn write_out(out: *mut *mut c_char, text: String) {
    let c = CString::new(text).expect("JSON output never contains NUL");
    *out = c.into_raw();
}

fn render(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("report values always serialize")
}

fn require_allocation(doc: &Document) -> Result<&Allocation, WefpayStatus> {
    doc.allocation
        .as_ref()
        .ok_or_else(|| fail(WefpayStatus::Invalid, "the document has no \"allocation\" field"))
}

fn require_payments(doc: &Document) -> Result<&PaymentVector, WefpayStatus> {
    doc.payments
        .as_ref()
        .ok_or_else(|| fail(WefpayStatus::Invalid, "the document has no \"payments\" field"))
}

fn graph_fail(e: EnvyGraphError) -> WefpayStatus {
    let status = match &e {
        EnvyGraphError::Infeasible(_) => WefpayStatus::Negative,
        EnvyGraphError::Model(_) => WefpayStatus::Invalid,
    };
    fail(status, e)
}

fn optimize_fail(e: OptimizeError) -> WefpayStatus {
    let status = match &e {
        OptimizeError::Infeasible(_) | OptimizeError::NoFeasibleAllocation => {
            WefpayStatus::Negative
        }
        OptimizeError::Model(_) | OptimizeError::SearchSpaceTooLarge { .. } => {
            WefpayStatus::Invalid
        }
    };
    fail(status, e)
}

fn transform_fail(e: TransformError) -> WefpayStatus {
    let status = match &e {
        TransformError::NotASubsidy { .. } | TransformError::NotBalanced { .. } => {
            WefpayStatus::Negative
        }
        TransformError::Model(_) => WefpayStatus::Invalid,
    };
    fail(status, e)
}

/// Parses a JSON instance document into a fresh handle.
///
/// Writes the handle to `out_doc` on success. Release it with
/// [`wefpay_doc_free`].
///
/// # Safety
///
/// `json` must be a valid NUL-terminated string and `out_doc` valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn wefpay_doc_parse(
    json: *const c_char,
    out_doc: *mut *mut WefpayDoc,
) -> WefpayStatus {
    guarded(|| {
        prepare_out(out_doc)?;
        let text = read_str(json, "document JSON")?;
        let inner = Document::parse(text).map_err(|e| fail(WefpayStatus::Invalid, e))?;
        *out_doc = Box::into_raw(Box::new(WefpayDoc { inner }));
        Ok(WefpayStatus::Ok)
    })
}

/// Releases a document handle. Passing null is a no-op.
///
/// # Safety
///
/// `doc` must be null or a handle from [`wefpay_doc_parse`] that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn wefpay_doc_free(doc: *mut WefpayDoc) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Renders the document back to its JSON file representation.
///
/// # Safety
///
/// `doc` must be a live handle and `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wefpay_doc_to_json(
    doc: *const WefpayDoc,
    out_json: *mut *mut c_char,
) -> WefpayStatus {
    guarded(|| {
        prepare_out(out_json)?;
        let doc = read_doc(doc)?;
        write_out(out_json, doc.to_json_string());
        Ok(WefpayStatus::Ok)
    })
}

/// Checks weighted envy-freeness of the document's allocation and
/// payments; both fields are required.
///
/// Writes a JSON report (`wef`, `classification`, and the worst envious
/// pair as `witness` when envy exists) and returns `Ok` when the pair is
/// envy-free, `Negative` otherwise.
///
/// # Safety
///
/// `doc` must be a live handle and `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wefpay_check(
    doc: *const WefpayDoc,
    out_json: *mut *mut c_char,
) -> WefpayStatus {
    guarded(|| {
        prepare_out(out_json)?;
        let doc = read_doc(doc)?;
        let allocation = require_allocation(doc)?;
        let payments = require_payments(doc)?;
        let verdict = check_wef(&doc.instance, allocation, payments)
            .map_err(|e| fail(WefpayStatus::Invalid, e))?;
        write_out(out_json, render(&io::check_report(&verdict, payments)));
        Ok(if verdict.is_wef() { WefpayStatus::Ok } else { WefpayStatus::Negative })
    })
}

/// Computes the pointwise smallest nonnegative payments that make the
/// document's allocation envy-free; the `allocation` field is required.
///
/// Writes a JSON report (`payments`, `total`, `classification`) on `Ok`.
/// Returns `Negative` without output when no payments work.
///
/// # Safety
///
/// `doc` must be a live handle and `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wefpay_minimal_subsidy(
    doc: *const WefpayDoc,
    out_json: *mut *mut c_char,
) -> WefpayStatus {
    guarded(|| {
        prepare_out(out_json)?;
        let doc = read_doc(doc)?;
        let allocation = require_allocation(doc)?;
        let payments =
            envy_graph::minimal_subsidy(&doc.instance, allocation).map_err(graph_fail)?;
        write_out(out_json, render(&io::payments_report(&payments)));
        Ok(WefpayStatus::Ok)
    })
}

/// Optimizes `objective` over payment vectors for the document's
/// allocation; the `allocation` field is required.
///
/// `objective` is a catalog name: `P1`, `P1w`, `P2`, `P3max`, `P3norm`,
/// `P4`, `P5sum`, or `P5max`. Writes a JSON report (`objective`,
/// `optimum`, `optimum_decimal`, `payments`, `classification`) on `Ok`.
/// Returns `Negative` without output when no payments work.
///
/// # Safety
///
/// `doc` must be a live handle, `objective` a valid NUL-terminated string,
/// and `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wefpay_opt(
    doc: *const WefpayDoc,
    objective: *const c_char,
    out_json: *mut *mut c_char,
) -> WefpayStatus {
    guarded(|| {
        prepare_out(out_json)?;
        let doc = read_doc(doc)?;
        let allocation = require_allocation(doc)?;
        let objective = ObjectiveKind::from_str(read_str(objective, "objective")?)
            .map_err(|e| fail(WefpayStatus::Invalid, e))?;
        let optimum = optimize::opt_for_allocation(&doc.instance, allocation, objective)
            .map_err(optimize_fail)?;
        write_out(out_json, render(&io::opt_report(objective, &optimum)));
        Ok(WefpayStatus::Ok)
    })
}

/// Optimizes `objective` over every allocation of the document's instance
/// by exhaustive search; any `allocation` field is ignored.
///
/// Writes the [`wefpay_opt`] report plus the winning `allocation` on `Ok`.
/// Returns `Negative` without output when no allocation admits payments,
/// and `Invalid` when the search space exceeds the guard.
///
/// # Safety
///
/// `doc` must be a live handle, `objective` a valid NUL-terminated string,
/// and `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wefpay_search(
    doc: *const WefpayDoc,
    objective: *const c_char,
    out_json: *mut *mut c_char,
) -> WefpayStatus {
    guarded(|| {
        prepare_out(out_json)?;
        let doc = read_doc(doc)?;
        let objective = ObjectiveKind::from_str(read_str(objective, "objective")?)
            .map_err(|e| fail(WefpayStatus::Invalid, e))?;
        let outcome =
            optimize::search_allocations(&doc.instance, objective).map_err(optimize_fail)?;
        write_out(out_json, render(&io::search_report(objective, &outcome)));
        Ok(WefpayStatus::Ok)
    })
}

/// Evaluates the payment-bound relations for the document's allocation;
/// the `allocation` field is required.
///
/// Writes a JSON report (one row per relation plus `all_hold`) and returns
/// `Ok` when every bound holds, `Negative` when any fails. Returns
/// `Negative` without output when no payments work at all.
///
/// # Safety
///
/// `doc` must be a live handle and `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wefpay_bounds(
    doc: *const WefpayDoc,
    out_json: *mut *mut c_char,
) -> WefpayStatus {
    guarded(|| {
        prepare_out(out_json)?;
        let doc = read_doc(doc)?;
        let allocation = require_allocation(doc)?;
        let report =
            optimize::check_bounds(&doc.instance, allocation).map_err(optimize_fail)?;
        write_out(out_json, render(&io::bounds_report(&report)));
        Ok(if report.all_hold() { WefpayStatus::Ok } else { WefpayStatus::Negative })
    })
}

/// Applies a payment transform to the document's payments; the `payments`
/// field is required.
///
/// `kind` is one of `"slide"`, `"balance"`, `"normalize"`, or
/// `"to-subsidy"`; `z` is the slide amount as a rational string (required
/// for `"slide"`, ignored otherwise and may be null). Writes a JSON report
/// (`transform`, `payments`, `classification`, and `total_subsidy` for
/// `"to-subsidy"`) on `Ok`. Returns `Negative` without output when the
/// transform's precondition fails.
///
/// # Safety
///
/// `doc` must be a live handle, `kind` a valid NUL-terminated string, `z`
/// null or a valid NUL-terminated string, and `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wefpay_transform(
    doc: *const WefpayDoc,
    kind: *const c_char,
    z: *const c_char,
    out_json: *mut *mut c_char,
) -> WefpayStatus {
    guarded(|| {
        prepare_out(out_json)?;
        let doc = read_doc(doc)?;
        let payments = require_payments(doc)?;
        let (label, result, total) = match read_str(kind, "transform kind")? {
            "slide" => {
                if z.is_null() {
                    return Err(fail(
                        WefpayStatus::Invalid,
                        "transform \"slide\" needs a z value",
                    ));
                }
                let z = parse_rational(read_str(z, "z")?)
                    .map_err(|e| fail(WefpayStatus::Invalid, e))?;
                let slid =
                    transforms::slide(&doc.instance, payments, &z).map_err(transform_fail)?;
                ("slide", slid, None)
            }
            "balance" => {
                let balanced =
                    transforms::balance(&doc.instance, payments).map_err(transform_fail)?;
                ("balance", balanced, None)
            }
            "normalize" => {
                let normalized = transforms::normalize_subsidy(&doc.instance, payments)
                    .map_err(transform_fail)?;
                ("normalize", normalized, None)
            }
            "to-subsidy" => {
                let (subsidy, total) = transforms::balanced_to_subsidy(&doc.instance, payments)
                    .map_err(transform_fail)?;
                ("to-subsidy", subsidy, Some(total))
            }
            other => {
                return Err(fail(
                    WefpayStatus::Invalid,
                    format!(
                        "unknown transform {:?}; expected slide, balance, normalize, or to-subsidy",
                        other
                    ),
                ))
            }
        };
        write_out(out_json, render(&io::transform_report(label, &result, total.as_ref())));
        Ok(WefpayStatus::Ok)
    })
}

/// Returns the explanation recorded by the most recent call on this
/// thread — set for `Invalid`, `Internal`, and `Negative` results that
/// carry no JSON output — or null when there is nothing to explain. The
/// caller owns the returned string; release it with
/// [`wefpay_string_free`].
#[no_mangle]
pub extern "C" fn wefpay_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. Passing null is a no-op.
///
/// # Safety
///
/// `s` must be null or a string returned by this library that has not been
/// freed already.
#[no_mangle]
pub unsafe extern "C" fn wefpay_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string; do not free it.
#[no_mangle]
pub extern "C" fn wefpay_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
