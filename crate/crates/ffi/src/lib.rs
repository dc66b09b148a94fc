//! C interface to `mpinv`.
//!
//! Matrices cross the boundary as opaque `MpMatrix` handles created by
//! `mp_matrix_new` or `mp_matrix_from_json` and released with
//! `mp_matrix_free`. Numeric data is exchanged as interleaved `(re, im)`
//! doubles in row-major order. Every fallible call returns an `MpStatus`;
//! on failure `mp_last_error_message` describes the error for the calling
//! thread. Strings returned by the library must be released with
//! `mp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mpinv::isometry::is_partial_isometry;
use mpinv::{
    classify, conorm, full_report, is_mp_hermitian, numerical_rank, operator_norm, penrose_residuals, pinv, svd,
    ComplexMatrix, Error, Tolerance, C64,
};

/// Opaque matrix handle.
pub struct MpMatrix {
    inner: ComplexMatrix,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotSquare = 4,
    NonFinite = 5,
    NoConvergence = 6,
    PenroseViolation = 7,
    ZeroConorm = 8,
    NotMpHermitian = 9,
    Json = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpTolerance {
    pub rank_tol_factor: f64,
    pub eq_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpPenroseResiduals {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(MpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } | Error::ShapeMismatch { .. } => MpStatus::DimensionMismatch,
            Error::NotSquare { .. } => MpStatus::NotSquare,
            Error::EmptyMatrix { .. } | Error::InvalidTolerance(_) | Error::InvalidArgument(_) => {
                MpStatus::InvalidArgument
            }
            Error::NonFinite { .. } => MpStatus::NonFinite,
            Error::NoConvergence { .. } => MpStatus::NoConvergence,
            Error::PenroseViolation { .. } => MpStatus::PenroseViolation,
            Error::ZeroConorm => MpStatus::ZeroConorm,
            Error::NotMpHermitian { .. } => MpStatus::NotMpHermitian,
            Error::Json(_) => MpStatus::Json,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(MpStatus::Json, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            MpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MpStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn matrix<'a>(m: *const MpMatrix, what: &str) -> Result<&'a ComplexMatrix, Failure> {
    m.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn tolerance(t: *const MpTolerance) -> Result<Tolerance, Failure> {
    match t.as_ref() {
        None => Ok(Tolerance::default()),
        Some(t) => Ok(Tolerance::new(t.rank_tol_factor, t.eq_tol)?),
    }
}

fn into_handle(m: ComplexMatrix) -> *mut MpMatrix {
    Box::into_raw(Box::new(MpMatrix { inner: m }))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(MpStatus::Json, e.to_string()))
}

/// Default tolerance: rank factor 1, relative equality tolerance 1e-9.
#[no_mangle]
pub extern "C" fn mp_tolerance_default() -> MpTolerance {
    let t = Tolerance::default();
    MpTolerance {
        rank_tol_factor: t.rank_tol_factor,
        eq_tol: t.eq_tol,
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn mp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds a `rows x cols` matrix from `2 * rows * cols` interleaved doubles.
///
/// # Safety
/// `data` must point to `2 * rows * cols` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mp_matrix_new(rows: usize, cols: usize, data: *const f64, out: *mut *mut MpMatrix) -> MpStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let len = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(2))
            .ok_or_else(|| Failure(MpStatus::InvalidArgument, "dimensions overflow".into()))?;
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols }.into());
        }
        if data.is_null() {
            return Err(null("data"));
        }
        let raw = std::slice::from_raw_parts(data, len);
        let entries = raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        *out = into_handle(ComplexMatrix::new(rows, cols, entries)?);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `m` must be null or a handle returned by this library that was not freed.
#[no_mangle]
pub unsafe extern "C" fn mp_matrix_free(m: *mut MpMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mp_matrix_rows(m: *const MpMatrix) -> usize {
    m.as_ref().map_or(0, |h| h.inner.rows())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mp_matrix_cols(m: *const MpMatrix) -> usize {
    m.as_ref().map_or(0, |h| h.inner.cols())
}

/// Copies the entries as interleaved `(re, im)` doubles into `buf`, which
/// must hold at least `2 * rows * cols` values (`len` counts doubles).
///
/// # Safety
/// `m` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_matrix_copy_data(m: *const MpMatrix, buf: *mut f64, len: usize) -> MpStatus {
    guard(|| {
        let m = matrix(m, "matrix")?;
        let needed = 2 * m.data().len();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < needed {
            return Err(Failure(
                MpStatus::BufferTooSmall,
                format!("buffer holds {len} doubles, {needed} needed"),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buf, needed);
        for (pair, z) in out.chunks_exact_mut(2).zip(m.data()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Parses `{"rows": r, "cols": c, "data": [[re, im], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mp_matrix_from_json(json: *const c_char, out: *mut *mut MpMatrix) -> MpStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(MpStatus::Json, e.to_string()))?;
        let m: ComplexMatrix = serde_json::from_str(text)?;
        *out = into_handle(m);
        Ok(())
    })
}

/// Serializes a matrix; free the result with `mp_string_free`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mp_matrix_to_json(m: *const MpMatrix, out: *mut *mut c_char) -> MpStatus {
    guard(|| {
        let m = matrix(m, "matrix")?;
        let out = out_ptr(out, "out")?;
        *out = into_c_string(serde_json::to_string(m)?)?;
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library that was not freed.
#[no_mangle]
pub unsafe extern "C" fn mp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Moore-Penrose inverse. `tol` may be null for the default tolerance and
/// `rank` may be null when the rank is not wanted.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable; `tol` and `rank` must be
/// null or valid.
#[no_mangle]
pub unsafe extern "C" fn mp_pinv(
    a: *const MpMatrix,
    tol: *const MpTolerance,
    out: *mut *mut MpMatrix,
    rank: *mut usize,
) -> MpStatus {
    guard(|| {
        let a = matrix(a, "a")?;
        let t = tolerance(tol)?;
        let out = out_ptr(out, "out")?;
        let result = pinv(a, &t)?;
        if let Some(rank) = rank.as_mut() {
            *rank = result.rank;
        }
        *out = into_handle(result.pinv);
        Ok(())
    })
}

/// Relative residuals of the four Penrose equations for the candidate `x`.
///
/// # Safety
/// `a` and `x` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mp_penrose_residuals(
    a: *const MpMatrix,
    x: *const MpMatrix,
    out: *mut MpPenroseResiduals,
) -> MpStatus {
    guard(|| {
        let r = penrose_residuals(matrix(a, "a")?, matrix(x, "x")?)?;
        *out_ptr(out, "out")? = MpPenroseResiduals {
            r1: r.r1,
            r2: r.r2,
            r3: r.r3,
            r4: r.r4,
        };
        Ok(())
    })
}

/// Spectral norm.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mp_operator_norm(a: *const MpMatrix, out: *mut f64) -> MpStatus {
    guard(|| {
        *out_ptr(out, "out")? = operator_norm(matrix(a, "a")?)?;
        Ok(())
    })
}

/// Smallest nonzero singular value; `MP_STATUS_ZERO_CONORM` for the zero matrix.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable; `tol` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mp_conorm(a: *const MpMatrix, tol: *const MpTolerance, out: *mut f64) -> MpStatus {
    guard(|| {
        *out_ptr(out, "out")? = conorm(matrix(a, "a")?, &tolerance(tol)?)?;
        Ok(())
    })
}

/// # Safety
/// `a` must be a live handle; `out` must be writable; `tol` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mp_numerical_rank(a: *const MpMatrix, tol: *const MpTolerance, out: *mut usize) -> MpStatus {
    guard(|| {
        let f = svd(matrix(a, "a")?)?;
        *out_ptr(out, "out")? = numerical_rank(&f, &tolerance(tol)?);
        Ok(())
    })
}

/// `a† = a` (square input only).
///
/// # Safety
/// `a` must be a live handle; `out` must be writable; `tol` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mp_is_mp_hermitian(a: *const MpMatrix, tol: *const MpTolerance, out: *mut bool) -> MpStatus {
    guard(|| {
        *out_ptr(out, "out")? = is_mp_hermitian(matrix(a, "a")?, &tolerance(tol)?)?;
        Ok(())
    })
}

/// `a† = a*`.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable; `tol` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mp_is_partial_isometry(
    a: *const MpMatrix,
    tol: *const MpTolerance,
    out: *mut bool,
) -> MpStatus {
    guard(|| {
        *out_ptr(out, "out")? = is_partial_isometry(matrix(a, "a")?, &tolerance(tol)?)?;
        Ok(())
    })
}

/// Every reverse order law condition for `ab`, as the JSON condition report.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable; `tol` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mp_rol_report_json(
    a: *const MpMatrix,
    b: *const MpMatrix,
    tol: *const MpTolerance,
    out: *mut *mut c_char,
) -> MpStatus {
    guard(|| {
        let report = full_report(matrix(a, "a")?, matrix(b, "b")?, &tolerance(tol)?)?;
        *out_ptr(out, "out")? = into_c_string(serde_json::to_string(&report)?)?;
        Ok(())
    })
}

/// Classification report as JSON.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable; `tol` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mp_classify_json(a: *const MpMatrix, tol: *const MpTolerance, out: *mut *mut c_char) -> MpStatus {
    guard(|| {
        let report = classify(matrix(a, "a")?, &tolerance(tol)?)?;
        *out_ptr(out, "out")? = into_c_string(serde_json::to_string(&report)?)?;
        Ok(())
    })
}
