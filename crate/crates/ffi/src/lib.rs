//! C ABI over `stacky-fan`.
//!
//! Every function returns an [`SfStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and read with
//! [`sf_last_error`]. Handles are opaque and owned by the caller once
//! returned; release them with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};
use stacky_fan::lattice::{smith_normal_form, IntMatrix};
use stacky_fan::symmetric::{symmetric_unimodular_refinement, SymmetricOptions};
use stacky_fan::tower::build_tower;
use stacky_fan::triangulation::{
    enumerate_unimodular, is_invariant, is_unimodular, refines, Refusal, Triangulation,
};
use stacky_fan::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8 or out-of-range index.
    InvalidArgument = 1,
    /// Malformed JSON or parameters the library rejects.
    InvalidInput = 2,
    BoundExceeded = 3,
    InvalidTriangulation = 4,
    Compatibility = 5,
    Unsupported = 6,
    /// A panic was caught at the boundary.
    Internal = 7,
    BufferTooSmall = 8,
}

/// A triangulation of a dilated simplex.
pub struct SfTriangulation(Triangulation);

/// An owned list of triangulations.
pub struct SfTriangulationList(Vec<Triangulation>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> SfStatus {
    match e {
        Error::BoundExceeded { .. } | Error::DilationBoundExceeded { .. } => {
            SfStatus::BoundExceeded
        }
        Error::InvalidTriangulation(_) | Error::NonInvariant => SfStatus::InvalidTriangulation,
        Error::Compatibility(_) => SfStatus::Compatibility,
        Error::Unsupported(_) => SfStatus::Unsupported,
        _ => SfStatus::InvalidInput,
    }
}

struct Fail(SfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid_arg(msg: &str) -> Fail {
    Fail(SfStatus::InvalidArgument, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SfStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            SfStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| invalid_arg(&format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(invalid_arg("output pointer is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_slice<T: Copy>(
    values: &[T],
    buf: *mut T,
    cap: size_t,
    written: *mut size_t,
) -> Result<(), Fail> {
    write_out(written, values.len())?;
    if values.len() > cap {
        return Err(Fail(
            SfStatus::BufferTooSmall,
            format!("need {} slots, have {cap}", values.len()),
        ));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(invalid_arg("buffer is null"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

fn boxed(t: Triangulation) -> *mut SfTriangulation {
    Box::into_raw(Box::new(SfTriangulation(t)))
}

/// Message of the last failure on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse `{"r","n","points","cells"}` JSON.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_triangulation_from_json(
    json: *const c_char,
    out: *mut *mut SfTriangulation,
) -> SfStatus {
    guard(|| {
        if json.is_null() {
            return Err(invalid_arg("json is null"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| invalid_arg(&e.to_string()))?;
        let t: Triangulation =
            serde_json::from_str(text).map_err(|e| Fail(SfStatus::InvalidInput, e.to_string()))?;
        write_out(out, boxed(t))
    })
}

/// Serialize to JSON; free the string with [`sf_string_free`].
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_triangulation_to_json(
    t: *const SfTriangulation,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        let t = deref(t, "triangulation")?;
        let s = serde_json::to_string(&t.0).map_err(|e| Fail(SfStatus::Internal, e.to_string()))?;
        let c = CString::new(s).map_err(|e| Fail(SfStatus::Internal, e.to_string()))?;
        write_out(out, c.into_raw())
    })
}

/// # Safety
/// `t` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_triangulation_free(t: *mut SfTriangulation) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `t` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_triangulation_shape(
    t: *const SfTriangulation,
    r: *mut size_t,
    n: *mut u64,
) -> SfStatus {
    guard(|| {
        let t = deref(t, "triangulation")?;
        write_out(r, t.0.r())?;
        write_out(n, t.0.n())
    })
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_triangulation_num_cells(
    t: *const SfTriangulation,
    out: *mut size_t,
) -> SfStatus {
    guard(|| write_out(out, deref(t, "triangulation")?.0.cells().len()))
}

/// Fails with `InvalidTriangulation` when the cells do not triangulate.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_triangulation_is_unimodular(
    t: *const SfTriangulation,
    out: *mut bool,
) -> SfStatus {
    guard(|| {
        let v = is_unimodular(&deref(t, "triangulation")?.0)?;
        write_out(out, v)
    })
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_triangulation_is_invariant(
    t: *const SfTriangulation,
    out: *mut bool,
) -> SfStatus {
    guard(|| {
        let v = is_invariant(&deref(t, "triangulation")?.0)?;
        write_out(out, v)
    })
}

/// Whether `fine` refines `coarse`. Refusals other than invalid input
/// give `Ok` with `false`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_refines(
    fine: *const SfTriangulation,
    coarse: *const SfTriangulation,
    out: *mut bool,
) -> SfStatus {
    guard(|| {
        let (f, c) = (deref(fine, "fine")?, deref(coarse, "coarse")?);
        match refines(&f.0, &c.0) {
            Ok(_) => write_out(out, true),
            Err(Refusal::Invalid(msg)) => Err(Fail(SfStatus::InvalidTriangulation, msg)),
            Err(_) => write_out(out, false),
        }
    })
}

/// All unimodular triangulations of `n·Δ^r`, refused above `max_points`
/// lattice points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_enumerate(
    r: size_t,
    n: u64,
    max_points: size_t,
    out: *mut *mut SfTriangulationList,
) -> SfStatus {
    guard(|| {
        let all = enumerate_unimodular(r, n, max_points)?;
        write_out(out, Box::into_raw(Box::new(SfTriangulationList(all))))
    })
}

/// # Safety
/// `list` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_list_len(
    list: *const SfTriangulationList,
    out: *mut size_t,
) -> SfStatus {
    guard(|| write_out(out, deref(list, "list")?.0.len()))
}

/// A copy of element `index`, owned by the caller.
///
/// # Safety
/// `list` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_list_get(
    list: *const SfTriangulationList,
    index: size_t,
    out: *mut *mut SfTriangulation,
) -> SfStatus {
    guard(|| {
        let l = deref(list, "list")?;
        let t = l
            .0
            .get(index)
            .ok_or_else(|| invalid_arg(&format!("index {index} out of range ({})", l.0.len())))?;
        write_out(out, boxed(t.clone()))
    })
}

/// # Safety
/// `list` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_list_free(list: *mut SfTriangulationList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Symmetric unimodular triangulation of `n·Δ^r` refining every unimodular
/// triangulation; `m` receives the dilation factor (the level is `m·n`).
///
/// # Safety
/// The out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_symmetric_refinement(
    r: size_t,
    n: u64,
    max_retry: size_t,
    m: *mut u64,
    out: *mut *mut SfTriangulation,
) -> SfStatus {
    guard(|| {
        if m.is_null() || out.is_null() {
            return Err(invalid_arg("output pointer is null"));
        }
        let opts = SymmetricOptions {
            max_retry,
            ..SymmetricOptions::default()
        };
        let res = symmetric_unimodular_refinement(r, n, &opts)?;
        write_out(m, res.m)?;
        write_out(out, boxed(res.triangulation))
    })
}

/// Smith invariants of a row-major `rows x cols` matrix, trailing zeros
/// included. `written` always receives the required length.
///
/// # Safety
/// `entries` must hold `rows * cols` values; `divisors` must hold `cap`.
#[no_mangle]
pub unsafe extern "C" fn sf_snf_divisors(
    entries: *const i64,
    rows: size_t,
    cols: size_t,
    divisors: *mut i64,
    cap: size_t,
    written: *mut size_t,
) -> SfStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| invalid_arg("matrix size overflows"))?;
        if len > 0 && entries.is_null() {
            return Err(invalid_arg("entries is null"));
        }
        let flat = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(entries, len)
        };
        let grid: Vec<Vec<i64>> = (0..rows)
            .map(|i| flat[i * cols..(i + 1) * cols].to_vec())
            .collect();
        let a = IntMatrix::from_i64_rows(&grid)?;
        let snf = smith_normal_form(&a);
        let ds = snf
            .divisors
            .iter()
            .map(|d| {
                i64::try_from(d).map_err(|_| {
                    Fail(
                        SfStatus::BoundExceeded,
                        format!("divisor {d} overflows i64"),
                    )
                })
            })
            .collect::<Result<Vec<i64>, Fail>>()?;
        write_slice(&ds, divisors, cap, written)
    })
}

/// Levels `k_1, ..., k_depth` of the cofinal tower. On failure `written`
/// still receives the levels reached, which are copied if they fit.
///
/// # Safety
/// `levels` must hold `cap` values; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_tower_levels(
    r: size_t,
    depth: size_t,
    levels: *mut u64,
    cap: size_t,
    written: *mut size_t,
) -> SfStatus {
    guard(
        || match build_tower(r, depth, &SymmetricOptions::default()) {
            Ok(t) => write_slice(&t.levels(), levels, cap, written),
            Err(f) => {
                let partial = f.partial.levels();
                let _ = write_slice(&partial, levels, cap, written);
                Err(f.error.into())
            }
        },
    )
}
