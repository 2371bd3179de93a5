//! C interface to the `classmem` library.
//!
//! Models and words are opaque handles created by the `*_parse` functions
//! and released with the matching `*_free`. Every fallible call returns a
//! [`ClmStatus`]; on failure [`clm_last_error`] describes what went wrong.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use classmem::cca::cca_to_wcma;
use classmem::coverability::{cma_empty_bounded, vas_coverable, wcma_empty, BoundedVerdict, Emptiness};
use classmem::data::DataWord;
use classmem::error::Error;
use classmem::format::{self, Model};
use classmem::hra::nrhra_to_wcma;
use classmem::ndcma::{desugar, forest_to_tuple, Ndcma};
use classmem::wsts::{ndcma_weak_empty, WeakVerdict};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Input text was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The text did not parse or failed a structural check.
    Parse = 3,
    /// The operation does not apply to this model, or needs a bound.
    Incompatible = 4,
    /// A panic was caught at the boundary.
    Internal = 5,
}

/// Emptiness answer.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClmVerdict {
    Empty = 0,
    NonEmpty = 1,
    /// Bounded search found nothing; longer runs were not explored.
    Unknown = 2,
}

/// Opaque parsed automaton, net or system.
pub struct ClmModel(Model);

/// Opaque parsed data word.
pub struct ClmWord(DataWord);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn fail(status: ClmStatus, msg: impl Into<String>) -> ClmStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> ClmStatus) -> ClmStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(ClmStatus::Internal, "internal error"))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, ClmStatus> {
    if p.is_null() {
        return Err(fail(ClmStatus::NullArgument, "null text"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(ClmStatus::InvalidUtf8, "text is not UTF-8"))
}

/// Message for the last failure on this thread. Valid until the next call
/// on the same thread; never null.
#[no_mangle]
pub extern "C" fn clm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a model file. On success `*out` owns a new handle.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clm_model_parse(src: *const c_char, out: *mut *mut ClmModel) -> ClmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(ClmStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let src = match text(src) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match format::parse(src) {
            Ok(Model::Word(_)) => fail(ClmStatus::Parse, "this is a word file; use clm_word_parse"),
            Ok(m) => {
                *out = Box::into_raw(Box::new(ClmModel(m)));
                ClmStatus::Ok
            }
            Err(e) => fail(ClmStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `m` must come from [`clm_model_parse`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn clm_model_free(m: *mut ClmModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// The model tag (`cma`, `ndcma`, ...) as a static string.
///
/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn clm_model_tag(m: *const ClmModel) -> *const c_char {
    let Some(m) = m.as_ref() else { return ptr::null() };
    let tag: &'static CStr = match m.0.tag() {
        "cma" => c"cma",
        "wcma" => c"wcma",
        "dwcma" => c"dwcma",
        "cca" => c"cca",
        "nrhra" => c"nrhra",
        "ndcma" => c"ndcma",
        "sugared-ndcma" => c"sugared-ndcma",
        "homca" => c"homca",
        "vas" => c"vas",
        "net" => c"net",
        "da" => c"da",
        "nda" => c"nda",
        _ => c"word",
    };
    tag.as_ptr()
}

/// Canonical text of the model. Release with [`clm_string_free`].
///
/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn clm_model_print(m: *const ClmModel) -> *mut c_char {
    let Some(m) = m.as_ref() else { return ptr::null_mut() };
    CString::new(format::print(&m.0)).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn clm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a data word file.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clm_word_parse(src: *const c_char, out: *mut *mut ClmWord) -> ClmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(ClmStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let src = match text(src) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match format::parse_word(src) {
            Ok(w) => {
                *out = Box::into_raw(Box::new(ClmWord(w)));
                ClmStatus::Ok
            }
            Err(e) => fail(ClmStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `w` must come from [`clm_word_parse`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn clm_word_free(w: *mut ClmWord) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

fn incompatible(e: Error) -> ClmStatus {
    fail(ClmStatus::Incompatible, e.to_string())
}

fn accepts(m: &Model, w: &DataWord) -> Result<bool, ClmStatus> {
    Ok(match m {
        Model::Cma(a) | Model::Wcma(a) | Model::Dwcma(a) => a.accepts(w),
        Model::Cca(a) => a.accepts(w),
        Model::NrHra(a) => a.accepts(w),
        Model::Ndcma(a) => a.accepts(w).map_err(incompatible)?,
        Model::Sugared(a) => a.accepts(w).map_err(incompatible)?,
        Model::Da(a) => a.accepts(w),
        Model::Nda(a) => a.accepts(&forest_to_tuple(w).map_err(incompatible)?).map_err(incompatible)?,
        other => return Err(fail(ClmStatus::Incompatible, format!("membership does not apply to `{}`", other.tag()))),
    })
}

/// Membership of a data word.
///
/// # Safety
/// `m` and `w` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clm_run(m: *const ClmModel, w: *const ClmWord, out: *mut bool) -> ClmStatus {
    guarded(|| {
        let (Some(m), Some(w), false) = (m.as_ref(), w.as_ref(), out.is_null()) else {
            return fail(ClmStatus::NullArgument, "null argument");
        };
        match accepts(&m.0, &w.0) {
            Ok(yes) => {
                *out = yes;
                ClmStatus::Ok
            }
            Err(s) => s,
        }
    })
}

fn flat(e: Emptiness) -> ClmVerdict {
    match e {
        Emptiness::Empty => ClmVerdict::Empty,
        Emptiness::NonEmpty(_) => ClmVerdict::NonEmpty,
    }
}

fn bounded(v: BoundedVerdict) -> ClmVerdict {
    match v {
        BoundedVerdict::NonEmpty(_) => ClmVerdict::NonEmpty,
        BoundedVerdict::UnknownBeyondBound => ClmVerdict::Unknown,
    }
}

fn nested(a: &Ndcma, bound: usize) -> Result<ClmVerdict, ClmStatus> {
    if a.is_weak() {
        return Ok(match ndcma_weak_empty(a).map_err(incompatible)? {
            WeakVerdict::Empty { .. } => ClmVerdict::Empty,
            WeakVerdict::NonEmpty(_) => ClmVerdict::NonEmpty,
        });
    }
    if bound == 0 {
        return Err(fail(ClmStatus::Incompatible, "emptiness of strong nested machines is undecidable; pass a bound"));
    }
    Ok(bounded(a.empty_bounded(bound, bound).map_err(incompatible)?))
}

fn emptiness(m: &Model, bound: usize) -> Result<ClmVerdict, ClmStatus> {
    Ok(match m {
        Model::Wcma(a) | Model::Dwcma(a) => flat(wcma_empty(a).map_err(incompatible)?),
        Model::Cma(a) if a.is_weak() => flat(wcma_empty(a).map_err(incompatible)?),
        Model::Cma(a) => {
            if bound == 0 {
                return Err(fail(ClmStatus::Incompatible, "strong CMA emptiness needs a bound"));
            }
            bounded(cma_empty_bounded(a, bound))
        }
        Model::Cca(c) => flat(wcma_empty(&cca_to_wcma(c)).map_err(incompatible)?),
        Model::NrHra(h) => flat(wcma_empty(&nrhra_to_wcma(h).map_err(incompatible)?).map_err(incompatible)?),
        Model::Ndcma(a) => nested(a, bound)?,
        Model::Sugared(s) => nested(&desugar(s).map_err(incompatible)?, bound)?,
        Model::Vas(v) => {
            if vas_coverable(v).coverable {
                ClmVerdict::NonEmpty
            } else {
                ClmVerdict::Empty
            }
        }
        other => return Err(fail(ClmStatus::Incompatible, format!("emptiness does not apply to `{}`", other.tag()))),
    })
}

/// Emptiness of the model's language; for a VAS, non-coverability of its
/// targets. `bound` is 0 for exact procedures only; a positive bound also
/// allows a bounded search on strong machines, which can answer
/// [`ClmVerdict::Unknown`].
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clm_empty(m: *const ClmModel, bound: usize, out: *mut ClmVerdict) -> ClmStatus {
    guarded(|| {
        let (Some(m), false) = (m.as_ref(), out.is_null()) else {
            return fail(ClmStatus::NullArgument, "null argument");
        };
        match emptiness(&m.0, bound) {
            Ok(v) => {
                *out = v;
                ClmStatus::Ok
            }
            Err(s) => s,
        }
    })
}
