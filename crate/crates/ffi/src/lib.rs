//! C interface to `projcalc`.
//!
//! Spaces and sets are opaque heap handles released with their `_free`
//! functions. Every fallible call returns a [`PcStatus`]; on failure the
//! message is available from [`pc_last_error`] on the same thread. Vectors
//! cross the boundary as `(pointer, length)` pairs and output buffers must
//! hold `pc_space_dim` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use projcalc::coderivative::{coderivative, CoderivResult, Verdict};
use projcalc::harness::report::to_json;
use projcalc::harness::{run_suite, SuiteSpec};
use projcalc::oracle::{test_membership, OracleConfig, OracleVerdict};
use projcalc::projections::{project, ConvexSet, Mask};
use projcalc::smooth::frechet_apply;
use projcalc::{Error, LpSpace};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Unsupported = 4,
    NoDerivative = 5,
    NotFound = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcCoderivKind {
    Singleton = 0,
    Empty = 1,
    ThetaMembership = 2,
    OrderInterval = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcVerdict {
    NotApplicable = 0,
    Member = 1,
    NotMember = 2,
    Undetermined = 3,
}

/// Shape of a coderivative answer. The vectors go to the caller's buffers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcCoderiv {
    pub kind: PcCoderivKind,
    /// Set only for `ThetaMembership`.
    pub verdict: PcVerdict,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcOracleResult {
    pub rejected: bool,
    pub supports_membership: bool,
    /// Largest quotient at the smallest radius.
    pub final_max: f64,
    /// Quotient at the witness point, NaN when not rejected.
    pub witness_quotient: f64,
}

/// A weighted ℓ_p space.
pub struct PcSpace {
    inner: LpSpace,
}

/// A closed convex set.
pub struct PcSet {
    inner: ConvexSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(PcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } => PcStatus::DimensionMismatch,
            Error::Unsupported(_) => PcStatus::Unsupported,
            Error::NoFrechetDerivative => PcStatus::NoDerivative,
            Error::WitnessNotFound(_) => PcStatus::NotFound,
            _ => PcStatus::InvalidArgument,
        };
        Fail(code, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PcStatus::NullPointer, format!("{what} is null"))
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PcStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(_) => {
            set_last_error("internal panic".into());
            PcStatus::Internal
        }
    }
}

unsafe fn read<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn write(out: *mut f64, values: &[f64], what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn vector(space: &LpSpace, ptr: *const f64, len: usize, what: &str) -> Result<Vec<f64>, Fail> {
    if len != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: len,
        }
        .into());
    }
    Ok(read(ptr, len, what)?.to_vec())
}

fn boxed<T>(value: T, out: *mut *mut T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a space of dimension `n`. `weights` may be null for unit weights,
/// otherwise it must hold `n` values.
///
/// # Safety
/// `weights` must be null or point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_space_new(n: usize, p: f64, weights: *const f64, out: *mut *mut PcSpace) -> PcStatus {
    guard(|| {
        let inner = if weights.is_null() {
            LpSpace::new(n, p)?
        } else {
            LpSpace::with_weights(p, read(weights, n, "weights")?.to_vec())?
        };
        boxed(PcSpace { inner }, out)
    })
}

/// # Safety
/// `space` must be null or a handle from [`pc_space_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_space_free(space: *mut PcSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Dimension of the space, 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_space_dim(space: *const PcSpace) -> usize {
    space.as_ref().map_or(0, |s| s.inner.dim())
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_set_ball(r: f64, out: *mut *mut PcSet) -> PcStatus {
    guard(|| boxed(PcSet { inner: ConvexSet::ball(r)? }, out))
}

/// Cylinder of radius `r` over the zero-based coordinates in `mask`.
///
/// # Safety
/// `mask` must point to `count` indices; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_set_cylinder(
    r: f64,
    n: usize,
    mask: *const usize,
    count: usize,
    out: *mut *mut PcSet,
) -> PcStatus {
    guard(|| {
        let mask = Mask::from_indices(n, read(mask, count, "mask")?)?;
        boxed(PcSet { inner: ConvexSet::cylinder(r, mask)? }, out)
    })
}

/// Subspace of vectors supported on the zero-based coordinates in `mask`.
///
/// # Safety
/// `mask` must point to `count` indices; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_set_subspace(n: usize, mask: *const usize, count: usize, out: *mut *mut PcSet) -> PcStatus {
    guard(|| {
        let mask = Mask::from_indices(n, read(mask, count, "mask")?)?;
        boxed(PcSet { inner: ConvexSet::subspace(mask) }, out)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_set_positive_cone(out: *mut *mut PcSet) -> PcStatus {
    guard(|| boxed(PcSet { inner: ConvexSet::PositiveCone }, out))
}

/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_set_free(set: *mut PcSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `x` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_norm(space: *const PcSpace, x: *const f64, len: usize, out: *mut f64) -> PcStatus {
    guard(|| {
        let s = &handle(space, "space")?.inner;
        let x = s.primal(vector(s, x, len, "x")?)?;
        write(out, &[s.norm(&x)], "out")
    })
}

/// # Safety
/// `x` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_dual_norm(space: *const PcSpace, x: *const f64, len: usize, out: *mut f64) -> PcStatus {
    guard(|| {
        let s = &handle(space, "space")?.inner;
        let x = s.dual(vector(s, x, len, "x")?)?;
        write(out, &[s.dual_norm(&x)], "out")
    })
}

/// Normalized duality map `J(x)`.
///
/// # Safety
/// `x` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_duality_map(space: *const PcSpace, x: *const f64, len: usize, out: *mut f64) -> PcStatus {
    guard(|| {
        let s = &handle(space, "space")?.inner;
        let x = s.primal(vector(s, x, len, "x")?)?;
        write(out, s.duality_map(&x).coords(), "out")
    })
}

/// Inverse duality map `J*(x*)`.
///
/// # Safety
/// `xs` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_duality_map_inv(
    space: *const PcSpace,
    xs: *const f64,
    len: usize,
    out: *mut f64,
) -> PcStatus {
    guard(|| {
        let s = &handle(space, "space")?.inner;
        let xs = s.dual(vector(s, xs, len, "xstar")?)?;
        write(out, s.duality_map_inv(&xs).coords(), "out")
    })
}

/// Metric projection of `x` onto `set`.
///
/// # Safety
/// `x` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_project(
    space: *const PcSpace,
    set: *const PcSet,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> PcStatus {
    guard(|| {
        let s = &handle(space, "space")?.inner;
        let c = &handle(set, "set")?.inner;
        let x = s.primal(vector(s, x, len, "x")?)?;
        write(out, project(s, c, &x)?.coords(), "out")
    })
}

/// Fréchet derivative of the projection at `xbar` applied to `v`. Fails
/// with `NO_DERIVATIVE` on the boundary.
///
/// # Safety
/// `xbar`, `v` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_frechet_apply(
    space: *const PcSpace,
    set: *const PcSet,
    xbar: *const f64,
    v: *const f64,
    len: usize,
    out: *mut f64,
) -> PcStatus {
    guard(|| {
        let s = &handle(space, "space")?.inner;
        let c = &handle(set, "set")?.inner;
        let xbar = s.primal(vector(s, xbar, len, "xbar")?)?;
        let v = s.primal(vector(s, v, len, "v")?)?;
        write(out, frechet_apply(s, c, &xbar, &v)?.coords(), "out")
    })
}

/// Closed-form coderivative at `xbar` for the query `ys`. A singleton is
/// written to `out_a`; an order interval writes its bounds to `out_a` and
/// `out_b`. Either buffer may be null to skip the copy.
///
/// # Safety
/// `xbar` and `ys` must hold `len` doubles; non-null `out_a` and `out_b`
/// must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_coderivative(
    space: *const PcSpace,
    set: *const PcSet,
    xbar: *const f64,
    ys: *const f64,
    len: usize,
    out: *mut PcCoderiv,
    out_a: *mut f64,
    out_b: *mut f64,
) -> PcStatus {
    guard(|| {
        let s = &handle(space, "space")?.inner;
        let c = &handle(set, "set")?.inner;
        let xbar = s.primal(vector(s, xbar, len, "xbar")?)?;
        let ys = s.dual(vector(s, ys, len, "ystar")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let copy = |dst: *mut f64, v: &[f64]| {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(v.as_ptr(), dst, v.len());
            }
        };
        let answer = match coderivative(s, c, &xbar, &ys)? {
            CoderivResult::Singleton { value } => {
                copy(out_a, value.coords());
                PcCoderiv {
                    kind: PcCoderivKind::Singleton,
                    verdict: PcVerdict::NotApplicable,
                }
            }
            CoderivResult::Empty => PcCoderiv {
                kind: PcCoderivKind::Empty,
                verdict: PcVerdict::NotApplicable,
            },
            CoderivResult::ThetaMembership { verdict, .. } => PcCoderiv {
                kind: PcCoderivKind::ThetaMembership,
                verdict: match verdict {
                    Verdict::Member => PcVerdict::Member,
                    Verdict::NotMember => PcVerdict::NotMember,
                    Verdict::Undetermined => PcVerdict::Undetermined,
                },
            },
            CoderivResult::OrderInterval { lo, hi } => {
                copy(out_a, lo.coords());
                copy(out_b, hi.coords());
                PcCoderiv {
                    kind: PcCoderivKind::OrderInterval,
                    verdict: PcVerdict::NotApplicable,
                }
            }
        };
        *out = answer;
        Ok(())
    })
}

/// Samples whether `xs` lies in the coderivative fiber over `ys` at `xbar`
/// with the default oracle configuration and the given seed. When rejected
/// and `witness` is non-null, the witness point is written there.
///
/// # Safety
/// `xbar`, `xs` and `ys` must hold `len` doubles; non-null `witness` must
/// hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_oracle_test(
    space: *const PcSpace,
    set: *const PcSet,
    xbar: *const f64,
    xs: *const f64,
    ys: *const f64,
    len: usize,
    seed: u64,
    out: *mut PcOracleResult,
    witness: *mut f64,
) -> PcStatus {
    guard(|| {
        let s = &handle(space, "space")?.inner;
        let c = &handle(set, "set")?.inner;
        let xbar = s.primal(vector(s, xbar, len, "xbar")?)?;
        let xs = s.dual(vector(s, xs, len, "xstar")?)?;
        let ys = s.dual(vector(s, ys, len, "ystar")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = OracleConfig::with_seed(seed);
        let verdict = test_membership(s, c, &xbar, &xs, &ys, &cfg)?;
        let witness_quotient = match &verdict {
            OracleVerdict::RejectedWithWitness { u, quotient, .. } => {
                if !witness.is_null() {
                    ptr::copy_nonoverlapping(u.coords().as_ptr(), witness, u.len());
                }
                *quotient
            }
            OracleVerdict::NotRejected { .. } => f64::NAN,
        };
        *out = PcOracleResult {
            rejected: verdict.is_rejected(),
            supports_membership: verdict.supports_membership(&cfg),
            final_max: verdict.final_max(),
            witness_quotient,
        };
        Ok(())
    })
}

/// Runs a verification suite described by a JSON suite configuration and
/// returns the JSON report in `out_json`, to be released with
/// [`pc_string_free`]. `out_success` is set when no case failed.
///
/// # Safety
/// `spec_json` must be a nul-terminated string; the out pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pc_run_suite(
    spec_json: *const c_char,
    out_json: *mut *mut c_char,
    out_success: *mut bool,
) -> PcStatus {
    guard(|| {
        if spec_json.is_null() {
            return Err(null("spec_json"));
        }
        if out_json.is_null() || out_success.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(spec_json)
            .to_str()
            .map_err(|e| Fail(PcStatus::InvalidArgument, e.to_string()))?;
        let spec: SuiteSpec =
            serde_json::from_str(text).map_err(|e| Fail(PcStatus::InvalidArgument, e.to_string()))?;
        let report = run_suite(&spec)?;
        let json = CString::new(to_json(&report)).map_err(|e| Fail(PcStatus::Internal, e.to_string()))?;
        *out_success = report.is_success();
        *out_json = json.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
