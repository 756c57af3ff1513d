//! C ABI over `kglushkov`.
//!
//! Objects are opaque handles owned by the caller and released with the
//! matching `*_free` function. Every fallible call returns a [`KgStatus`];
//! on failure [`kg_last_error`] describes the problem. Strings returned
//! through out-parameters are NUL-terminated UTF-8 and must be released
//! with [`kg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kglushkov::dispatch;
use kglushkov::orbit::recover_expression;
use kglushkov::{build_wfa, AnyExpr, AnyWfa, RejectReason, ScanOrder, SemiringKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    UnknownSemiring = 3,
    ParseError = 4,
    NotProper = 5,
    SchemaError = 6,
    /// The automaton is not a Glushkov automaton of an SNF expression.
    Rejected = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgRejectReason {
    None = 0,
    NotHomogeneous = 1,
    NotHammock = 2,
    OrbitBoundaryIrregular = 3,
    FactorizationFailed = 4,
    NotReducible = 5,
    VerificationFailed = 6,
}

impl From<RejectReason> for KgRejectReason {
    fn from(r: RejectReason) -> Self {
        match r {
            RejectReason::NotHomogeneous => KgRejectReason::NotHomogeneous,
            RejectReason::NotHammock => KgRejectReason::NotHammock,
            RejectReason::OrbitBoundaryIrregular => KgRejectReason::OrbitBoundaryIrregular,
            RejectReason::FactorizationFailed => KgRejectReason::FactorizationFailed,
            RejectReason::NotReducible => KgRejectReason::NotReducible,
            RejectReason::VerificationFailed => KgRejectReason::VerificationFailed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KgExprClass {
    pub proper: bool,
    pub enf: bool,
    pub snf: bool,
}

/// Opaque K-expression.
pub struct KgExpr(AnyExpr);

/// Opaque weighted automaton.
pub struct KgWfa(AnyWfa);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

struct Failure(KgStatus, String);

type Res<T> = Result<T, Failure>;

fn guard(f: impl FnOnce() -> Res<()>) -> KgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            KgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            KgStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Res<&'a str> {
    if p.is_null() {
        return Err(Failure(KgStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(KgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Res<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(KgStatus::NullArgument, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Res<()> {
    if p.is_null() {
        Err(Failure(KgStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

unsafe fn semiring(p: *const c_char) -> Res<SemiringKind> {
    text(p, "semiring")?
        .parse()
        .map_err(|e: kglushkov::SemiringError| Failure(KgStatus::UnknownSemiring, e.to_string()))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn kg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an expression over the named semiring (`boolean`, `naturals`,
/// `tropical`, `rationals`).
///
/// # Safety
/// `semiring_name` and `text` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn kg_expr_parse(
    semiring_name: *const c_char,
    src: *const c_char,
    out: *mut *mut KgExpr,
) -> KgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let kind = semiring(semiring_name)?;
        let s = text(src, "text")?;
        let (e, _) = AnyExpr::parse(kind, s).map_err(|e| Failure(KgStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(KgExpr(e)));
        Ok(())
    })
}

/// # Safety
/// `e` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kg_expr_free(e: *mut KgExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_expr_render(e: *const KgExpr, out: *mut *mut c_char) -> KgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = c_string(handle(e, "expr")?.0.render());
        Ok(())
    })
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_expr_classify(e: *const KgExpr, out: *mut KgExprClass) -> KgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let e = &handle(e, "expr")?.0;
        *out = dispatch!(AnyExpr::e, |e: K| {
            let c = e.classify();
            KgExprClass {
                proper: c.proper,
                enf: c.enf,
                snf: c.snf,
            }
        });
        Ok(())
    })
}

/// Glushkov automaton of a proper expression.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_wfa_build(e: *const KgExpr, out: *mut *mut KgWfa) -> KgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let e = &handle(e, "expr")?.0;
        let m = dispatch!(AnyExpr::e, |e: K| build_wfa(e).map(AnyWfa::from))
            .map_err(|err| Failure(KgStatus::NotProper, err.to_string()))?;
        *out = Box::into_raw(Box::new(KgWfa(m)));
        Ok(())
    })
}

/// Reads a WFA JSON document; the semiring comes from the document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_wfa_from_json(json: *const c_char, out: *mut *mut KgWfa) -> KgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let s = text(json, "json")?;
        let m = AnyWfa::from_json(s, None).map_err(|e| Failure(KgStatus::SchemaError, e.to_string()))?;
        *out = Box::into_raw(Box::new(KgWfa(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_wfa_to_json(m: *const KgWfa, out: *mut *mut c_char) -> KgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = c_string(handle(m, "wfa")?.0.to_json());
        Ok(())
    })
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kg_wfa_state_count(m: *const KgWfa) -> usize {
    match m.as_ref() {
        Some(KgWfa(m)) => dispatch!(AnyWfa::m, |m: K| m.state_count()),
        None => 0,
    }
}

/// Coefficient of `word` (empty string for the empty word), rendered as
/// a weight literal.
///
/// # Safety
/// `m` must be a live handle, `word` a NUL-terminated string, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn kg_wfa_coefficient(
    m: *const KgWfa,
    word: *const c_char,
    out: *mut *mut c_char,
) -> KgStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let m = &handle(m, "wfa")?.0;
        let w: Vec<char> = text(word, "word")?.chars().collect();
        *out = c_string(dispatch!(AnyWfa::m, |m: K| m.coefficient(&w).to_string()));
        Ok(())
    })
}

/// Recovers an expression from `m`. On success `*out_expr` receives the
/// expression text and `*out_reason` is `KG_REJECT_REASON_NONE`. When the
/// automaton is rejected the call returns `KG_STATUS_REJECTED`, sets
/// `*out_reason` and leaves `*out_expr` null. `verify_len` > 0 checks the
/// result on all words up to that length.
///
/// # Safety
/// `m` must be a live handle; `out_expr` and `out_reason` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_wfa_recover(
    m: *const KgWfa,
    verify_len: usize,
    out_expr: *mut *mut c_char,
    out_reason: *mut KgRejectReason,
) -> KgStatus {
    guard(|| {
        out_ptr(out_expr, "out_expr")?;
        out_ptr(out_reason, "out_reason")?;
        *out_expr = ptr::null_mut();
        *out_reason = KgRejectReason::None;
        let m = &handle(m, "wfa")?.0;
        let r = dispatch!(AnyWfa::m, |m: K| recover_expression(m, verify_len, ScanOrder::Canonical).map(|r| r.text()));
        match r {
            Ok(s) => {
                *out_expr = c_string(s);
                Ok(())
            }
            Err(rej) => {
                *out_reason = rej.reason.into();
                Err(Failure(KgStatus::Rejected, rej.to_string()))
            }
        }
    })
}

/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kg_wfa_free(m: *mut KgWfa) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn kg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_arguments() {
        let mut e = ptr::null_mut();
        let st = unsafe { kg_expr_parse(ptr::null(), c"a".as_ptr(), &mut e) };
        assert_eq!(st, KgStatus::NullArgument);
        let msg = unsafe { CStr::from_ptr(kg_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "semiring is null");
        assert_eq!(unsafe { kg_wfa_state_count(ptr::null()) }, 0);
    }
}
