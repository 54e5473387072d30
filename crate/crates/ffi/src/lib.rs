//! C ABI over the `mmconc` core.
//!
//! Spaces live behind an opaque `MmSpace` handle created by one of the
//! `mm_space_*` constructors and released with `mm_space_free`. Every
//! fallible call returns an `MmStatus` and writes its result through an out
//! pointer; on failure `mm_last_error_message` describes the error for the
//! calling thread. Infinite dimensions come back as IEEE `+inf`.

use mmconc::concentration::{alpha_exact, kappa_grid, sep_exact, sep_hamming_analytic, sep_lower};
use mmconc::dimension::{dim_chavez, Diagonal};
use mmconc::mmspace::{generate, GeneratorSpec, Metric};
use mmconc::transport::emd;
use mmconc::{Error, ErrorKind, MMSpace};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Opaque handle to a metric measure space.
pub struct MmSpace {
    inner: MMSpace,
}

/// Status codes; the nonzero values match the CLI exit codes where the
/// classes coincide.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Invalid input data or parameters.
    Input = 2,
    /// An exact oracle or generator refused a size limit.
    ResourceLimit = 3,
    /// An internal invariant failed.
    Internal = 4,
    Output = 5,
    /// A panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmMetric {
    Euclidean = 0,
    NormalizedHamming = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> MmStatus {
    match e.kind() {
        ErrorKind::Input => MmStatus::Input,
        ErrorKind::ResourceLimit => MmStatus::ResourceLimit,
        ErrorKind::Internal => MmStatus::Internal,
        ErrorKind::Output => MmStatus::Output,
    }
}

/// Runs `f` with panics and errors turned into status codes.
fn guard(f: impl FnOnce() -> Result<(), MmStatus>) -> MmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic in mmconc");
            MmStatus::Panic
        }
    }
}

fn fail(e: Error) -> MmStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> MmStatus {
    set_error(format!("{what} is null"));
    MmStatus::NullPointer
}

unsafe fn space_ref<'a>(space: *const MmSpace) -> Result<&'a MMSpace, MmStatus> {
    if space.is_null() {
        return Err(null("space"));
    }
    Ok(&(*space).inner)
}

unsafe fn opt_weights(weights: *const f64, n: usize) -> Option<Vec<f64>> {
    if weights.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(weights, n).to_vec())
    }
}

fn emit(space: MMSpace, out: *mut *mut MmSpace) {
    unsafe { *out = Box::into_raw(Box::new(MmSpace { inner: space })) };
}

/// Message for the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a space from a row-major `n x n` distance matrix. `weights` may be
/// null for the uniform measure.
///
/// # Safety
/// `dist` must point to `n * n` doubles, `weights` (if non-null) to `n`, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_space_from_distances(
    dist: *const f64,
    n: usize,
    weights: *const f64,
    out: *mut *mut MmSpace,
) -> MmStatus {
    guard(|| {
        if dist.is_null() {
            return Err(null("dist"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let flat = std::slice::from_raw_parts(dist, n * n);
        let rows: Vec<Vec<f64>> = flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        let s = MMSpace::from_distance_matrix(&rows, opt_weights(weights, n)).map_err(fail)?;
        emit(s, out);
        Ok(())
    })
}

/// Builds a space from `n` points of dimension `dim`, row-major.
///
/// # Safety
/// `coords` must point to `n * dim` doubles, `weights` (if non-null) to `n`,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_space_from_points(
    coords: *const f64,
    n: usize,
    dim: usize,
    weights: *const f64,
    metric: MmMetric,
    out: *mut *mut MmSpace,
) -> MmStatus {
    guard(|| {
        if coords.is_null() && n * dim > 0 {
            return Err(null("coords"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let flat = if n * dim == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(coords, n * dim)
        };
        let pts: Vec<Vec<f64>> = (0..n).map(|i| flat[i * dim..(i + 1) * dim].to_vec()).collect();
        let metric = match metric {
            MmMetric::Euclidean => Metric::Euclidean,
            MmMetric::NormalizedHamming => Metric::NormalizedHamming,
        };
        let s = MMSpace::from_points(&pts, opt_weights(weights, n), metric).map_err(fail)?;
        emit(s, out);
        Ok(())
    })
}

/// Generates a reference space from a JSON spec such as
/// `{"family":"hamming_cube","d":3,"seed":0}`.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mm_space_generate(spec_json: *const c_char, out: *mut *mut MmSpace) -> MmStatus {
    guard(|| {
        if spec_json.is_null() {
            return Err(null("spec_json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(spec_json).to_str().map_err(|_| {
            set_error("spec is not UTF-8");
            MmStatus::Input
        })?;
        let spec: GeneratorSpec = serde_json::from_str(text).map_err(|e| {
            set_error(format!("generator spec: {e}"));
            MmStatus::Input
        })?;
        emit(generate(&spec).map_err(fail)?, out);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `space` must come from an `mm_space_*` constructor and not be used after.
#[no_mangle]
pub unsafe extern "C" fn mm_space_free(space: *mut MmSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mm_space_len(space: *const MmSpace) -> usize {
    space.as_ref().map_or(0, |s| s.inner.len())
}

macro_rules! scalar {
    ($out:ident, $body:expr) => {
        guard(|| {
            if $out.is_null() {
                return Err(null("out"));
            }
            *$out = $body;
            Ok(())
        })
    };
}

/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mm_space_diameter(space: *const MmSpace, out: *mut f64) -> MmStatus {
    scalar!(out, space_ref(space)?.diameter())
}

/// Lower weighted median of the pairwise-distance distribution.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mm_space_char_size(space: *const MmSpace, out: *mut f64) -> MmStatus {
    scalar!(out, space_ref(space)?.char_size())
}

/// Exact concentration function at `eps`.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mm_alpha_exact(space: *const MmSpace, eps: f64, out: *mut f64) -> MmStatus {
    scalar!(out, alpha_exact(space_ref(space)?, eps).map_err(fail)?)
}

/// Exact separation distance at `kappa`.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mm_sep_exact(space: *const MmSpace, kappa: f64, out: *mut f64) -> MmStatus {
    scalar!(out, sep_exact(space_ref(space)?, kappa).map_err(fail)?)
}

/// Greedy lower bound on the separation distance at `kappa`.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mm_sep_lower(
    space: *const MmSpace,
    kappa: f64,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> MmStatus {
    scalar!(out, {
        let p = sep_lower(space_ref(space)?, &[kappa], restarts, seed).map_err(fail)?;
        p.sep[0]
    })
}

/// Exact separation distance of the full Hamming cube `{0,1}^d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_sep_hamming(d: usize, kappa: f64, out: *mut f64) -> MmStatus {
    scalar!(out, sep_hamming_analytic(d, kappa).map_err(fail)?)
}

/// Distance-distribution dimension; `+inf` for zero variance.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mm_dim_chavez(space: *const MmSpace, exclude_diagonal: bool, out: *mut f64) -> MmStatus {
    let diagonal = if exclude_diagonal {
        Diagonal::Excluded
    } else {
        Diagonal::Included
    };
    scalar!(out, dim_chavez(space_ref(space)?, diagonal).value())
}

/// Earth mover's distance between two measures of length `n` on the space.
///
/// # Safety
/// `space` must be a live handle, `mu` and `nu` must point to `n` doubles,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mm_emd(
    space: *const MmSpace,
    mu: *const f64,
    nu: *const f64,
    n: usize,
    out: *mut f64,
) -> MmStatus {
    scalar!(out, {
        let s = space_ref(space)?;
        if mu.is_null() || nu.is_null() {
            return Err(null("measure"));
        }
        let (mu, nu) = (std::slice::from_raw_parts(mu, n), std::slice::from_raw_parts(nu, n));
        emd(s, mu, nu).map_err(fail)?.cost
    })
}

/// The default `{ i / 2m }` grid written into `out[0..m]`.
///
/// # Safety
/// `out` must point to `m` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mm_kappa_grid(m: usize, out: *mut f64) -> MmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, m).copy_from_slice(&kappa_grid(m));
        Ok(())
    })
}
