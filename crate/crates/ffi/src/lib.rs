//! C ABI over the `umeb` crate.
//!
//! Matrix sets cross the boundary as opaque `UmebSet` handles that the
//! caller releases with `umeb_set_free`. Every fallible function returns a
//! `UmebStatus`; on failure, `umeb_last_error` describes what went wrong on
//! the calling thread. Panics are caught and reported as
//! `UMEB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use umeb::constructions::{bravyi_smolin_3, lift, umeb_6, weyl_family, UmebCandidate};
use umeb::matrix_set::{load_umeb, save_umeb};
use umeb::spectral::{compare_signatures, signature, Distinction};
use umeb::verification::{
    search_extension, structural_certify, verify_axioms, CertificateStatus, SearchParams, SearchVerdict,
};
use umeb::{Tolerances, UmebError};

/// Opaque matrix set.
pub struct UmebSet {
    inner: UmebCandidate,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UmebStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Schema = 5,
    DimensionMismatch = 6,
    NotSquare = 7,
    RankDeficient = 8,
    NotUnitary = 9,
    Numerical = 10,
    MalformedProvenance = 11,
    Panic = 12,
}

impl From<&UmebError> for UmebStatus {
    fn from(e: &UmebError) -> Self {
        match e {
            UmebError::DimensionMismatch { .. } => UmebStatus::DimensionMismatch,
            UmebError::NotSquare { .. } => UmebStatus::NotSquare,
            UmebError::RankDeficient { .. } => UmebStatus::RankDeficient,
            UmebError::NonFinite { .. } | UmebError::InvalidArgument(_) => UmebStatus::InvalidArgument,
            UmebError::NotUnitary { .. } => UmebStatus::NotUnitary,
            UmebError::Numerical(_) => UmebStatus::Numerical,
            UmebError::MalformedProvenance(_) => UmebStatus::MalformedProvenance,
            UmebError::Schema(_) => UmebStatus::Schema,
            UmebError::Parse(_) => UmebStatus::Parse,
            UmebError::Io(_) => UmebStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UmebVerification {
    pub dim: usize,
    pub element_count: usize,
    pub max_unitarity_residual: f64,
    pub max_gram_offdiag: f64,
    pub max_gram_diag_error: f64,
    pub condition_i_ok: bool,
    pub passed: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UmebSearchVerdict {
    ExtensionFound = 0,
    NoExtensionFound = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UmebSearchSummary {
    pub verdict: UmebSearchVerdict,
    pub best_nuclear_norm: f64,
    pub gap: f64,
    pub complement_dim: usize,
    pub best_restart: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UmebCertificate {
    CertifiedConditionalOnBase = 0,
    NotApplicable = 1,
    Failed = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UmebDistinction {
    Distinguished = 0,
    NotDistinguished = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Umeb(UmebError),
}

impl From<UmebError> for Failure {
    fn from(e: UmebError) -> Self {
        Failure::Umeb(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UmebStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UmebStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed for {what}"));
            UmebStatus::NullPointer
        }
        Ok(Err(Failure::Umeb(e))) => {
            set_last_error(e.to_string());
            UmebStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            UmebStatus::Panic
        }
    }
}

unsafe fn set_ref<'a>(set: *const UmebSet, what: &'static str) -> Result<&'a UmebCandidate, Failure> {
    // SAFETY: caller guarantees `set` is null or a live handle from this library.
    unsafe { set.as_ref() }.map(|s| &s.inner).ok_or(Failure::Null(what))
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: caller guarantees `out` is null or valid for writes.
    unsafe { out.as_mut() }.ok_or(Failure::Null(what))
}

unsafe fn path_arg(path: *const c_char) -> Result<String, Failure> {
    if path.is_null() {
        return Err(Failure::Null("path"));
    }
    // SAFETY: non-null and NUL-terminated per the API contract.
    let s = unsafe { CStr::from_ptr(path) };
    s.to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::Umeb(UmebError::InvalidArgument("path is not valid UTF-8".into())))
}

fn emit(out: *mut *mut UmebSet, c: UmebCandidate) -> Result<(), Failure> {
    // SAFETY: the caller passes a pointer valid for writes or null.
    let slot = unsafe { out_ref(out, "out")? };
    *slot = Box::into_raw(Box::new(UmebSet { inner: c }));
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn umeb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// All d² Weyl operators of dimension `d`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_weyl_family(d: usize, out: *mut *mut UmebSet) -> UmebStatus {
    guard(|| {
        if d == 0 {
            return Err(UmebError::InvalidArgument("d must be positive".into()).into());
        }
        emit(out, weyl_family(d))
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_bravyi_smolin_3(out: *mut *mut UmebSet) -> UmebStatus {
    guard(|| emit(out, bravyi_smolin_3()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_umeb_6(out: *mut *mut UmebSet) -> UmebStatus {
    guard(|| emit(out, umeb_6()))
}

/// Lift `base` from dimension d to qd.
///
/// # Safety
/// `base` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_lift(base: *const UmebSet, q: usize, out: *mut *mut UmebSet) -> UmebStatus {
    guard(|| {
        let base = unsafe { set_ref(base, "base")? };
        emit(out, lift(base, q)?)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_load(path: *const c_char, out: *mut *mut UmebSet) -> UmebStatus {
    guard(|| {
        let path = unsafe { path_arg(path)? };
        emit(out, load_umeb(path)?)
    })
}

/// # Safety
/// `set` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn umeb_save(set: *const UmebSet, path: *const c_char) -> UmebStatus {
    guard(|| {
        let set = unsafe { set_ref(set, "set")? };
        let path = unsafe { path_arg(path)? };
        save_umeb(set, path)?;
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `set` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn umeb_set_free(set: *mut UmebSet) {
    if !set.is_null() {
        // SAFETY: handle came from Box::into_raw in `emit`.
        drop(unsafe { Box::from_raw(set) });
    }
}

/// Matrix dimension d, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn umeb_set_dim(set: *const UmebSet) -> usize {
    unsafe { set.as_ref() }.map_or(0, |s| s.inner.dim())
}

/// Number of elements, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn umeb_set_len(set: *const UmebSet) -> usize {
    unsafe { set.as_ref() }.map_or(0, |s| s.inner.len())
}

/// Copies element `index` into `re` and `im` (row-major, `len` = d² each).
///
/// # Safety
/// `set` must be a live handle and `re`, `im` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_set_element(
    set: *const UmebSet,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> UmebStatus {
    guard(|| {
        let set = unsafe { set_ref(set, "set")? };
        if re.is_null() || im.is_null() {
            return Err(Failure::Null("re/im"));
        }
        let m = set.elements().get(index).ok_or_else(|| {
            UmebError::InvalidArgument(format!("index {index} out of range for {} elements", set.len()))
        })?;
        if len != m.entries().len() {
            return Err(UmebError::DimensionMismatch {
                expected: m.entries().len(),
                found: len,
            }
            .into());
        }
        // SAFETY: both buffers hold `len` f64 per the contract.
        let (re, im) = unsafe {
            (
                std::slice::from_raw_parts_mut(re, len),
                std::slice::from_raw_parts_mut(im, len),
            )
        };
        for (k, z) in m.entries().iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Unitarity, Gram orthogonality and element count with default
/// tolerances.
///
/// # Safety
/// `set` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_verify(set: *const UmebSet, out: *mut UmebVerification) -> UmebStatus {
    guard(|| {
        let set = unsafe { set_ref(set, "set")? };
        let out = unsafe { out_ref(out, "out")? };
        let r = verify_axioms(set, &Tolerances::default())?;
        *out = UmebVerification {
            dim: r.dim,
            element_count: r.element_count,
            max_unitarity_residual: r.max_unitarity_residual,
            max_gram_offdiag: r.max_gram_offdiag,
            max_gram_diag_error: r.max_gram_diag_error,
            condition_i_ok: r.condition_i_ok,
            passed: r.passed,
        };
        Ok(())
    })
}

/// Seeded nuclear-norm search for an extension.
///
/// # Safety
/// `set` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_search(
    set: *const UmebSet,
    restarts: usize,
    iters: usize,
    seed: u64,
    extension_tol: f64,
    out: *mut UmebSearchSummary,
) -> UmebStatus {
    guard(|| {
        let set = unsafe { set_ref(set, "set")? };
        let out = unsafe { out_ref(out, "out")? };
        let r = search_extension(
            set,
            &SearchParams {
                restarts,
                iters,
                seed,
                extension_tol,
            },
        )?;
        *out = UmebSearchSummary {
            verdict: match r.verdict {
                SearchVerdict::ExtensionFound => UmebSearchVerdict::ExtensionFound,
                SearchVerdict::NoExtensionFound => UmebSearchVerdict::NoExtensionFound,
            },
            best_nuclear_norm: r.best_nuclear_norm,
            gap: r.gap,
            complement_dim: r.complement_dim,
            best_restart: r.best_restart,
        };
        Ok(())
    })
}

/// Structural certificate for lifted sets.
///
/// # Safety
/// `set` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_certify(set: *const UmebSet, out: *mut UmebCertificate) -> UmebStatus {
    guard(|| {
        let set = unsafe { set_ref(set, "set")? };
        let out = unsafe { out_ref(out, "out")? };
        *out = match structural_certify(set)?.overall {
            CertificateStatus::CertifiedConditionalOnBase => UmebCertificate::CertifiedConditionalOnBase,
            CertificateStatus::NotApplicable => UmebCertificate::NotApplicable,
            CertificateStatus::Failed => UmebCertificate::Failed,
        };
        Ok(())
    })
}

/// Compares spectral signatures with orders searched up to `bound`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn umeb_compare(
    a: *const UmebSet,
    b: *const UmebSet,
    bound: u64,
    out: *mut UmebDistinction,
) -> UmebStatus {
    guard(|| {
        let a = unsafe { set_ref(a, "a")? };
        let b = unsafe { set_ref(b, "b")? };
        let out = unsafe { out_ref(out, "out")? };
        let tol = Tolerances::default();
        let verdict = compare_signatures(&signature(a, bound, &tol)?, &signature(b, bound, &tol)?, &tol);
        *out = match verdict {
            Distinction::Distinguished => UmebDistinction::Distinguished,
            Distinction::NotDistinguished => UmebDistinction::NotDistinguished,
        };
        Ok(())
    })
}
