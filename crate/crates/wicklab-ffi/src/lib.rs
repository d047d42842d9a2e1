//! C ABI for the wicklab workbench.
//!
//! The surface follows the usual opaque-handle pattern: heap-allocated
//! [`WicklabPoly`] and [`WicklabLambda`] objects travel across the
//! boundary as pointers, every fallible call returns a [`WicklabStatus`],
//! and the detail text behind the most recent failure (or validity
//! witness) on the current thread is available through
//! [`wicklab_last_message`]. Coefficients cross the boundary as
//! double-precision complex numbers split into real and imaginary parts.
//!
//! Ownership rules: whatever a `*_new`, `*_clone`, or `*_wick_product`
//! call hands out must be released with the matching `*_free`; strings
//! returned through `wicklab_check_model_json` must be released with
//! [`wicklab_string_free`]. Passing a handle to its `*_free` twice, or
//! using it afterwards, is undefined behavior — exactly as in C.

use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use wicklab_core::index::MultiIndex;
use wicklab_core::lambda::{validate_ccr, LambdaMap};
use wicklab_core::model::parse_model;
use wicklab_core::report::{emit_json, run_named, RunOptions};
use wicklab_core::wick::WickPolynomial;
use wicklab_core::Error;

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WicklabStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An argument was malformed (zero mode, duplicate mode, bad JSON, …);
    /// `wicklab_last_message` has the detail.
    InvalidArgument = 3,
    /// The library declined the request (inadmissible map, degree cap or
    /// node budget exceeded, …); `wicklab_last_message` has the detail.
    Rejected = 4,
    /// An internal panic was caught at the boundary; the handle state is
    /// unspecified afterwards.
    Panicked = 5,
}

/// Opaque handle to a Wick polynomial with complex double coefficients.
pub struct WicklabPoly {
    inner: WickPolynomial<Complex64>,
}

/// Opaque handle to a transformation map with complex double coefficients.
pub struct WicklabLambda {
    inner: LambdaMap<Complex64>,
}

thread_local! {
    static LAST_MESSAGE: RefCell<CString> = RefCell::new(CString::default());
}

fn set_message(text: &str) {
    let sanitized = text.replace('\0', " ");
    LAST_MESSAGE.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NULs stripped above");
    });
}

fn status_of(error: &Error) -> WicklabStatus {
    match error {
        Error::Model(_) => WicklabStatus::InvalidArgument,
        _ => WicklabStatus::Rejected,
    }
}

/// Run `body` inside a panic guard; a caught panic becomes
/// [`WicklabStatus::Panicked`] with a message.
fn guarded(body: impl FnOnce() -> WicklabStatus) -> WicklabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_message(&format!("internal panic: {text}"));
            WicklabStatus::Panicked
        }
    }
}

fn null_status(name: &str) -> WicklabStatus {
    set_message(&format!("{name} must not be null"));
    WicklabStatus::NullPointer
}

/// Build a multi-index from parallel (mode, multiplicity) arrays,
/// rejecting zero modes, zero multiplicities, and duplicates.
unsafe fn multi_index_from_raw(
    modes: *const u32,
    mults: *const u32,
    n: usize,
) -> Result<MultiIndex, WicklabStatus> {
    if n > 0 && (modes.is_null() || mults.is_null()) {
        return Err(null_status("modes/mults"));
    }
    let modes = if n == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(modes, n)
    };
    let mults = if n == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(mults, n)
    };
    let mut seen = std::collections::BTreeSet::new();
    for (&mode, &mult) in modes.iter().zip(mults) {
        if mode == 0 {
            set_message("modes are 1-based; 0 is not a mode");
            return Err(WicklabStatus::InvalidArgument);
        }
        if mult == 0 {
            set_message(&format!("mode {mode} has multiplicity 0"));
            return Err(WicklabStatus::InvalidArgument);
        }
        if !seen.insert(mode) {
            set_message(&format!("mode {mode} appears twice in one term"));
            return Err(WicklabStatus::InvalidArgument);
        }
    }
    Ok(MultiIndex::from_pairs(
        modes.iter().copied().zip(mults.iter().copied()),
    ))
}

/// The library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wicklab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Detail text for the most recent failure or validity witness on the
/// calling thread. The pointer stays valid until the next call on the
/// same thread that records a message; never free it.
#[no_mangle]
pub extern "C" fn wicklab_last_message() -> *const c_char {
    LAST_MESSAGE.with(|slot| slot.borrow().as_ptr())
}

/// A new zero polynomial. Release with [`wicklab_poly_free`].
#[no_mangle]
pub extern "C" fn wicklab_poly_new() -> *mut WicklabPoly {
    Box::into_raw(Box::new(WicklabPoly {
        inner: WickPolynomial::zero(),
    }))
}

/// A deep copy of `poly`, or null when `poly` is null. Release with
/// [`wicklab_poly_free`].
///
/// # Safety
/// `poly` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_clone(poly: *const WicklabPoly) -> *mut WicklabPoly {
    if poly.is_null() {
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(WicklabPoly {
        inner: (*poly).inner.clone(),
    }))
}

/// Release a polynomial handle. Null is accepted and ignored.
///
/// # Safety
/// `poly` must be null or an unreleased handle from this library.
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_free(poly: *mut WicklabPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Add `(re + i·im)·:x^α:` to the polynomial, where α is given as
/// parallel arrays of `n` (mode, multiplicity) pairs; `n = 0` addresses
/// the constant term. Adding to an existing term accumulates.
///
/// # Safety
/// `poly` must be a live handle; `modes` and `mults` must point to `n`
/// readable elements each (or `n` must be 0).
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_add_term(
    poly: *mut WicklabPoly,
    modes: *const u32,
    mults: *const u32,
    n: usize,
    re: f64,
    im: f64,
) -> WicklabStatus {
    guarded(|| {
        if poly.is_null() {
            return null_status("poly");
        }
        match multi_index_from_raw(modes, mults, n) {
            Ok(alpha) => {
                (*poly).inner.add_term(alpha, Complex64::new(re, im));
                WicklabStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Number of stored (nonzero) terms.
///
/// # Safety
/// `poly` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_term_count(
    poly: *const WicklabPoly,
    out: *mut usize,
) -> WicklabStatus {
    guarded(|| {
        if poly.is_null() {
            return null_status("poly");
        }
        if out.is_null() {
            return null_status("out");
        }
        *out = (*poly).inner.iter().count();
        WicklabStatus::Ok
    })
}

/// Total degree (0 for the zero polynomial).
///
/// # Safety
/// `poly` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_degree(
    poly: *const WicklabPoly,
    out: *mut u32,
) -> WicklabStatus {
    guarded(|| {
        if poly.is_null() {
            return null_status("poly");
        }
        if out.is_null() {
            return null_status("out");
        }
        *out = (*poly).inner.degree();
        WicklabStatus::Ok
    })
}

/// The coefficient at the multi-index given by `n` (mode, multiplicity)
/// pairs (zero when the term is absent).
///
/// # Safety
/// `poly` must be a live handle; `modes`/`mults` as in
/// [`wicklab_poly_add_term`]; `out_re`/`out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_coefficient(
    poly: *const WicklabPoly,
    modes: *const u32,
    mults: *const u32,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WicklabStatus {
    guarded(|| {
        if poly.is_null() {
            return null_status("poly");
        }
        if out_re.is_null() || out_im.is_null() {
            return null_status("out_re/out_im");
        }
        match multi_index_from_raw(modes, mults, n) {
            Ok(alpha) => {
                let c = (*poly).inner.coefficient(&alpha);
                *out_re = c.re;
                *out_im = c.im;
                WicklabStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Gaussian inner product ⟨a, b⟩ (antilinear in `a`).
///
/// # Safety
/// `a` and `b` must be live handles; `out_re`/`out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_inner_product(
    a: *const WicklabPoly,
    b: *const WicklabPoly,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WicklabStatus {
    guarded(|| {
        if a.is_null() || b.is_null() {
            return null_status("a/b");
        }
        if out_re.is_null() || out_im.is_null() {
            return null_status("out_re/out_im");
        }
        let value = (*a).inner.inner_product(&(*b).inner);
        *out_re = value.re;
        *out_im = value.im;
        WicklabStatus::Ok
    })
}

/// Squared Gaussian norm ‖poly‖² (a real number).
///
/// # Safety
/// `poly` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_norm_squared(
    poly: *const WicklabPoly,
    out: *mut f64,
) -> WicklabStatus {
    guarded(|| {
        if poly.is_null() {
            return null_status("poly");
        }
        if out.is_null() {
            return null_status("out");
        }
        *out = (*poly).inner.norm_squared().re;
        WicklabStatus::Ok
    })
}

/// Pointwise (Wick-expanded) product `a·b` as a new handle in `*out`.
/// `degree_cap = 0` selects the library default; a product exceeding the
/// cap is rejected rather than truncated.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wicklab_poly_wick_product(
    a: *const WicklabPoly,
    b: *const WicklabPoly,
    degree_cap: u32,
    out: *mut *mut WicklabPoly,
) -> WicklabStatus {
    guarded(|| {
        if a.is_null() || b.is_null() {
            return null_status("a/b");
        }
        if out.is_null() {
            return null_status("out");
        }
        let cap = if degree_cap == 0 {
            wicklab_core::DEFAULT_DEGREE_CAP
        } else {
            degree_cap
        };
        match (*a).inner.wick_product(&(*b).inner, cap) {
            Ok(product) => {
                *out = Box::into_raw(Box::new(WicklabPoly { inner: product }));
                WicklabStatus::Ok
            }
            Err(e) => {
                set_message(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// A new empty transformation map. Release with [`wicklab_lambda_free`].
#[no_mangle]
pub extern "C" fn wicklab_lambda_new() -> *mut WicklabLambda {
    Box::into_raw(Box::new(WicklabLambda {
        inner: LambdaMap::zero(),
    }))
}

/// Release a map handle. Null is accepted and ignored.
///
/// # Safety
/// `lambda` must be null or an unreleased handle from this library.
#[no_mangle]
pub unsafe extern "C" fn wicklab_lambda_free(lambda: *mut WicklabLambda) {
    if !lambda.is_null() {
        drop(Box::from_raw(lambda));
    }
}

/// Set the image of the position direction e_mode to the constant
/// `re + i·im` (validity later requires it to be real).
///
/// # Safety
/// `lambda` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wicklab_lambda_set_v(
    lambda: *mut WicklabLambda,
    mode: u32,
    re: f64,
    im: f64,
) -> WicklabStatus {
    guarded(|| {
        if lambda.is_null() {
            return null_status("lambda");
        }
        if mode == 0 {
            set_message("modes are 1-based; 0 is not a mode");
            return WicklabStatus::InvalidArgument;
        }
        (*lambda).inner.set_v(mode, Complex64::new(re, im));
        WicklabStatus::Ok
    })
}

/// Set the image of the momentum direction Je_mode to a copy of `poly`.
///
/// # Safety
/// `lambda` and `poly` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn wicklab_lambda_set_jv(
    lambda: *mut WicklabLambda,
    mode: u32,
    poly: *const WicklabPoly,
) -> WicklabStatus {
    guarded(|| {
        if lambda.is_null() || poly.is_null() {
            return null_status("lambda/poly");
        }
        if mode == 0 {
            set_message("modes are 1-based; 0 is not a mode");
            return WicklabStatus::InvalidArgument;
        }
        (*lambda).inner.set_jv(mode, (*poly).inner.clone());
        WicklabStatus::Ok
    })
}

/// Check the commutation-compatibility conditions. `*out_valid` receives
/// the verdict; when the map is invalid, the witness text is available
/// through [`wicklab_last_message`].
///
/// # Safety
/// `lambda` must be a live handle and `out_valid` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wicklab_lambda_validate(
    lambda: *const WicklabLambda,
    out_valid: *mut bool,
) -> WicklabStatus {
    guarded(|| {
        if lambda.is_null() {
            return null_status("lambda");
        }
        if out_valid.is_null() {
            return null_status("out_valid");
        }
        let check = validate_ccr(&(*lambda).inner);
        *out_valid = check.valid;
        if let Some(witness) = &check.witness {
            set_message(witness);
        }
        WicklabStatus::Ok
    })
}

/// Parse a model from JSON, run its suites with the given seed, and
/// return the JSON report. `*out_report` receives a NUL-terminated
/// string owned by the caller (release with [`wicklab_string_free`]);
/// `*out_failed` receives the number of failed checks, so 0 means every
/// check passed.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_report` and `out_failed`
/// must be writable pointers.
#[no_mangle]
pub unsafe extern "C" fn wicklab_check_model_json(
    json: *const c_char,
    seed: u64,
    out_report: *mut *mut c_char,
    out_failed: *mut usize,
) -> WicklabStatus {
    guarded(|| {
        if json.is_null() {
            return null_status("json");
        }
        if out_report.is_null() || out_failed.is_null() {
            return null_status("out_report/out_failed");
        }
        let source = match CStr::from_ptr(json).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_message("model JSON is not valid UTF-8");
                return WicklabStatus::InvalidUtf8;
            }
        };
        let model = match parse_model(source) {
            Ok(m) => m,
            Err(e) => {
                set_message(&e.to_string());
                return status_of(&e);
            }
        };
        let options = RunOptions {
            seed,
            ..RunOptions::default()
        };
        match run_named(&model, &[], &options) {
            Ok(report) => {
                let rendered = emit_json(&report).replace('\0', " ");
                *out_failed = report.summary.failed;
                *out_report = CString::new(rendered)
                    .expect("NULs stripped above")
                    .into_raw();
                WicklabStatus::Ok
            }
            Err(e) => {
                set_message(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Release a string returned by [`wicklab_check_model_json`]. Null is
/// accepted and ignored.
///
/// # Safety
/// `s` must be null or an unreleased string from this library.
#[no_mangle]
pub unsafe extern "C" fn wicklab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
