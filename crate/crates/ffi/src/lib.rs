//! C ABI over the ptqh library.
//!
//! Conventions:
//! - Every object crosses the boundary as an opaque handle created by a
//!   `*_new` function and released by the matching `*_free`.
//! - Every fallible function returns a [`PtqhStatus`]; `PTQH_STATUS_OK` is
//!   zero. On failure the thread-local message retrieved by
//!   [`ptqh_last_error_message`] explains what went wrong.
//! - Matrix data crosses as row-major `dim * dim` arrays of doubles, split
//!   into real and imaginary parts. A null imaginary pointer means zero.
//! - `tol_rel <= 0` selects the default relative tolerance (1e-9).

use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use ptqh::antilinear::AntilinearOperator;
use ptqh::classify::{classify, PhaseTag};
use ptqh::gpt::{certify_unique_state, state_space, EffectTheory};
use ptqh::linalg::{sqrt_pd, takagi, C64, ComplexMatrix, Tolerance};
use ptqh::metric::{metric_from_unbroken, MetricOperator};
use ptqh::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtqhStatus {
    /// Success.
    PtqhStatusOk = 0,
    /// A required pointer was null.
    PtqhStatusNullPointer = 1,
    /// Malformed input: bad dimension, non-finite entry, or an argument
    /// outside its domain.
    PtqhStatusInvalidArgument = 2,
    /// Operands have incompatible dimensions.
    PtqhStatusDimensionMismatch = 3,
    /// The supplied operator is not an antiunitary involution (or not
    /// eta-antiunitary where required).
    PtqhStatusNotInvolution = 4,
    /// The operation requires the unbroken phase.
    PtqhStatusPhaseUnsuitable = 5,
    /// The matrix is not a valid effect, density, or eta-Hermitian operand.
    PtqhStatusNotEffect = 6,
    /// An iteration failed to converge or a subproblem was ill-conditioned.
    PtqhStatusNumericalFailure = 7,
    /// An internal invariant failed; the operation was aborted safely.
    PtqhStatusInternalPanic = 8,
}

/// PT phase of an operator with respect to an antiunitary involution.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtqhPhase {
    /// The operator does not commute with the symmetry.
    PtqhPhaseNotSymmetric = 0,
    /// Real spectrum on a K-invariant eigenbasis.
    PtqhPhaseUnbroken = 1,
    /// Complex-conjugate eigenvalue pairs.
    PtqhPhaseBroken = 2,
    /// Eigenvalue and eigenvector coalescence.
    PtqhPhaseExceptionalPoint = 3,
}

/// Opaque dense complex matrix.
pub struct PtqhMatrix(ComplexMatrix);

/// Opaque antilinear symmetry `x -> U conj(x)`.
pub struct PtqhSymmetry(AntilinearOperator);

/// Opaque Hermitian positive-definite metric with cached square roots.
pub struct PtqhMetric(MetricOperator);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message.into());
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().clear());
}

fn status_of(e: &Error) -> PtqhStatus {
    match e {
        Error::NotSquare { .. }
        | Error::NonFinite { .. }
        | Error::DimensionTooLarge { .. }
        | Error::NotHermitian { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::NotUnitary { .. }
        | Error::NotComplexSymmetric { .. }
        | Error::AlphaUndefined { .. }
        | Error::ZeroCoupling
        | Error::InvalidArgument(_) => PtqhStatus::PtqhStatusInvalidArgument,
        Error::DimensionMismatch { .. } => PtqhStatus::PtqhStatusDimensionMismatch,
        Error::NotAntiunitaryInvolution { .. } | Error::NotEtaAntiunitary { .. } => {
            PtqhStatus::PtqhStatusNotInvolution
        }
        Error::PhaseNotUnbroken { .. } | Error::KInvariantBasisDeficient { .. } => {
            PtqhStatus::PtqhStatusPhaseUnsuitable
        }
        Error::NotEtaHermitian { .. }
        | Error::NotEffect { .. }
        | Error::NotDensityMatrix { .. }
        | Error::ComplexTrace { .. } => PtqhStatus::PtqhStatusNotEffect,
        Error::EigNoConvergence { .. }
        | Error::JacobiNoConvergence { .. }
        | Error::TakagiNoConvergence { .. }
        | Error::Singular { .. }
        | Error::ProjectorConditioning { .. }
        | Error::LpBudgetExhausted { .. }
        | Error::LpInfeasible { .. }
        | Error::LpUnbounded => PtqhStatus::PtqhStatusNumericalFailure,
    }
}

fn fail(e: &Error) -> PtqhStatus {
    set_error(e.to_string());
    status_of(e)
}

/// Runs `body` with panics converted into `PtqhStatusInternalPanic` so that
/// unwinding never crosses the C boundary.
fn guarded(body: impl FnOnce() -> PtqhStatus) -> PtqhStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unidentified panic".into());
            set_error(format!("internal panic: {message}"));
            PtqhStatus::PtqhStatusInternalPanic
        }
    }
}

fn tolerance(tol_rel: f64) -> Result<Tolerance, Error> {
    if tol_rel <= 0.0 {
        Ok(Tolerance::default())
    } else {
        Tolerance::from_rel(tol_rel)
    }
}

macro_rules! nonnull {
    ($ptr:expr, $name:literal) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error(concat!($name, " must not be null"));
                return PtqhStatus::PtqhStatusNullPointer;
            }
        }
    };
}

macro_rules! out_param {
    ($ptr:expr, $name:literal) => {
        match unsafe { $ptr.as_mut() } {
            Some(r) => r,
            None => {
                set_error(concat!($name, " must not be null"));
                return PtqhStatus::PtqhStatusNullPointer;
            }
        }
    };
}

/// Copies the last error message into `buffer` (NUL-terminated, truncated to
/// `length` bytes) and returns the full length of the message including the
/// terminator. A zero return means no error has been recorded. `buffer` may
/// be null to query the required size.
#[no_mangle]
pub extern "C" fn ptqh_last_error_message(buffer: *mut c_char, length: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        if message.is_empty() {
            return 0;
        }
        let needed = message.len() + 1;
        if !buffer.is_null() && length > 0 {
            let copy = message.as_bytes();
            let n = copy.len().min(length - 1);
            unsafe {
                ptr::copy_nonoverlapping(copy.as_ptr(), buffer.cast::<u8>(), n);
                *buffer.add(n) = 0;
            }
        }
        needed
    })
}

/// Creates a `dim x dim` matrix from row-major real and imaginary arrays.
/// `im` may be null for a real matrix.
#[no_mangle]
pub extern "C" fn ptqh_matrix_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut PtqhMatrix,
) -> PtqhStatus {
    let out = out_param!(out, "out");
    if re.is_null() {
        set_error("re must not be null");
        return PtqhStatus::PtqhStatusNullPointer;
    }
    guarded(|| {
        if dim == 0 || dim > 64 {
            let e = Error::InvalidArgument(format!("dimension {dim} outside 1..=64"));
            return fail(&e);
        }
        let n = dim * dim;
        let re = unsafe { slice::from_raw_parts(re, n) };
        let im = if im.is_null() {
            None
        } else {
            Some(unsafe { slice::from_raw_parts(im, n) })
        };
        for (pos, &v) in re.iter().enumerate() {
            let imag = im.map_or(0.0, |a| a[pos]);
            if !v.is_finite() || !imag.is_finite() {
                return fail(&Error::NonFinite {
                    row: pos / dim,
                    col: pos % dim,
                });
            }
        }
        let m = ComplexMatrix::from_fn(dim, |i, j| {
            let pos = i * dim + j;
            C64::new(re[pos], im.map_or(0.0, |a| a[pos]))
        });
        *out = Box::into_raw(Box::new(PtqhMatrix(m)));
        clear_error();
        PtqhStatus::PtqhStatusOk
    })
}

/// Dimension of a matrix handle; zero for null.
#[no_mangle]
pub extern "C" fn ptqh_matrix_dim(matrix: *const PtqhMatrix) -> usize {
    unsafe { matrix.as_ref() }.map_or(0, |m| m.0.dim())
}

/// Reads one entry of a matrix handle.
#[no_mangle]
pub extern "C" fn ptqh_matrix_get(
    matrix: *const PtqhMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> PtqhStatus {
    let matrix = nonnull!(matrix, "matrix");
    let re = out_param!(re, "re");
    let im = out_param!(im, "im");
    let d = matrix.0.dim();
    if row >= d || col >= d {
        set_error(format!("index ({row}, {col}) outside a {d}x{d} matrix"));
        return PtqhStatus::PtqhStatusInvalidArgument;
    }
    let z = matrix.0[(row, col)];
    *re = z.re;
    *im = z.im;
    PtqhStatus::PtqhStatusOk
}

/// Releases a matrix handle. Null is ignored.
#[no_mangle]
pub extern "C" fn ptqh_matrix_free(matrix: *mut PtqhMatrix) {
    if !matrix.is_null() {
        drop(unsafe { Box::from_raw(matrix) });
    }
}

/// Creates the antilinear symmetry `x -> U conj(x)` from its unitary part,
/// validating that it is an antiunitary involution.
#[no_mangle]
pub extern "C" fn ptqh_symmetry_new(
    u: *const PtqhMatrix,
    tol_rel: f64,
    out: *mut *mut PtqhSymmetry,
) -> PtqhStatus {
    let u = nonnull!(u, "u");
    let out = out_param!(out, "out");
    guarded(|| {
        let tol = match tolerance(tol_rel) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        let k = AntilinearOperator::new(u.0.clone());
        if let Err(e) = k.require_antiunitary_involution(&tol) {
            return fail(&e);
        }
        *out = Box::into_raw(Box::new(PtqhSymmetry(k)));
        clear_error();
        PtqhStatus::PtqhStatusOk
    })
}

/// Plain complex conjugation in dimension `dim`.
#[no_mangle]
pub extern "C" fn ptqh_symmetry_kappa(dim: usize, out: *mut *mut PtqhSymmetry) -> PtqhStatus {
    let out = out_param!(out, "out");
    guarded(|| {
        if dim == 0 || dim > 64 {
            let e = Error::InvalidArgument(format!("dimension {dim} outside 1..=64"));
            return fail(&e);
        }
        *out = Box::into_raw(Box::new(PtqhSymmetry(AntilinearOperator::kappa(dim))));
        clear_error();
        PtqhStatus::PtqhStatusOk
    })
}

/// Releases a symmetry handle. Null is ignored.
#[no_mangle]
pub extern "C" fn ptqh_symmetry_free(symmetry: *mut PtqhSymmetry) {
    if !symmetry.is_null() {
        drop(unsafe { Box::from_raw(symmetry) });
    }
}

/// Classifies the PT phase of `hamiltonian` under `symmetry`.
#[no_mangle]
pub extern "C" fn ptqh_classify(
    hamiltonian: *const PtqhMatrix,
    symmetry: *const PtqhSymmetry,
    tol_rel: f64,
    out_phase: *mut PtqhPhase,
) -> PtqhStatus {
    let h = nonnull!(hamiltonian, "hamiltonian");
    let k = nonnull!(symmetry, "symmetry");
    let out_phase = out_param!(out_phase, "out_phase");
    guarded(|| {
        let tol = match tolerance(tol_rel) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        match classify(&h.0, &k.0, &tol) {
            Ok(phase) => {
                *out_phase = match phase.tag {
                    PhaseTag::NotSymmetric => PtqhPhase::PtqhPhaseNotSymmetric,
                    PhaseTag::Unbroken => PtqhPhase::PtqhPhaseUnbroken,
                    PhaseTag::Broken => PtqhPhase::PtqhPhaseBroken,
                    PhaseTag::ExceptionalPoint => PtqhPhase::PtqhPhaseExceptionalPoint,
                };
                clear_error();
                PtqhStatus::PtqhStatusOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Constructs a metric operator from an operator in the unbroken phase.
#[no_mangle]
pub extern "C" fn ptqh_metric_from_unbroken(
    hamiltonian: *const PtqhMatrix,
    symmetry: *const PtqhSymmetry,
    tol_rel: f64,
    out: *mut *mut PtqhMetric,
) -> PtqhStatus {
    let h = nonnull!(hamiltonian, "hamiltonian");
    let k = nonnull!(symmetry, "symmetry");
    let out = out_param!(out, "out");
    guarded(|| {
        let tol = match tolerance(tol_rel) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        match metric_from_unbroken(&h.0, &k.0, &tol) {
            Ok(constructed) => {
                *out = Box::into_raw(Box::new(PtqhMetric(constructed.metric)));
                clear_error();
                PtqhStatus::PtqhStatusOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Copies the metric matrix eta out of a metric handle.
#[no_mangle]
pub extern "C" fn ptqh_metric_matrix(
    metric: *const PtqhMetric,
    out: *mut *mut PtqhMatrix,
) -> PtqhStatus {
    let metric = nonnull!(metric, "metric");
    let out = out_param!(out, "out");
    *out = Box::into_raw(Box::new(PtqhMatrix(metric.0.eta().clone())));
    clear_error();
    PtqhStatus::PtqhStatusOk
}

/// Smallest eigenvalue of the metric (its distance from losing positivity).
#[no_mangle]
pub extern "C" fn ptqh_metric_min_eigenvalue(
    metric: *const PtqhMetric,
    out: *mut f64,
) -> PtqhStatus {
    let metric = nonnull!(metric, "metric");
    let out = out_param!(out, "out");
    *out = metric.0.min_eigenvalue();
    PtqhStatus::PtqhStatusOk
}

/// Releases a metric handle. Null is ignored.
#[no_mangle]
pub extern "C" fn ptqh_metric_free(metric: *mut PtqhMetric) {
    if !metric.is_null() {
        drop(unsafe { Box::from_raw(metric) });
    }
}

/// Factors a complex symmetric unitary as `U = V V^T` with `V` unitary.
#[no_mangle]
pub extern "C" fn ptqh_takagi(
    u: *const PtqhMatrix,
    tol_rel: f64,
    out_v: *mut *mut PtqhMatrix,
) -> PtqhStatus {
    let u = nonnull!(u, "u");
    let out_v = out_param!(out_v, "out_v");
    guarded(|| {
        let tol = match tolerance(tol_rel) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        match takagi(&u.0, &tol) {
            Ok(v) => {
                *out_v = Box::into_raw(Box::new(PtqhMatrix(v)));
                clear_error();
                PtqhStatus::PtqhStatusOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Principal square root of a Hermitian positive-definite matrix.
#[no_mangle]
pub extern "C" fn ptqh_sqrt_pd(
    a: *const PtqhMatrix,
    tol_rel: f64,
    out: *mut *mut PtqhMatrix,
) -> PtqhStatus {
    let a = nonnull!(a, "a");
    let out = out_param!(out, "out");
    guarded(|| {
        let tol = match tolerance(tol_rel) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        match sqrt_pd(&a.0, &tol) {
            Ok(root) => {
                *out = Box::into_raw(Box::new(PtqhMatrix(root)));
                clear_error();
                PtqhStatus::PtqhStatusOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Certifies that the K-symmetric projector theory admits exactly one state,
/// refuting `trials` perturbed candidates. `out_unique` receives the
/// verdict; `out_refuted` (optional) the number of explicit refutations.
#[no_mangle]
pub extern "C" fn ptqh_certify_unique(
    symmetry: *const PtqhSymmetry,
    trials: usize,
    seed: u64,
    tol_rel: f64,
    out_unique: *mut bool,
    out_refuted: *mut usize,
) -> PtqhStatus {
    let k = nonnull!(symmetry, "symmetry");
    let out_unique = out_param!(out_unique, "out_unique");
    guarded(|| {
        let tol = match tolerance(tol_rel) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        match certify_unique_state(&k.0, trials, seed, &tol) {
            Ok(report) => {
                *out_unique = report.unique;
                if let Some(slot) = unsafe { out_refuted.as_mut() } {
                    *slot = report.refuted;
                }
                clear_error();
                PtqhStatus::PtqhStatusOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Affine dimension of the K-symmetric projector theory's state space,
/// probed with `samples` sampled effects (0 selects `64 * dim^2`).
#[no_mangle]
pub extern "C" fn ptqh_projector_state_space(
    symmetry: *const PtqhSymmetry,
    samples: usize,
    seed: u64,
    tol_rel: f64,
    out_dimension: *mut usize,
    out_unique: *mut bool,
) -> PtqhStatus {
    let k = nonnull!(symmetry, "symmetry");
    let out_dimension = out_param!(out_dimension, "out_dimension");
    let out_unique = out_param!(out_unique, "out_unique");
    guarded(|| {
        let tol = match tolerance(tol_rel) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        let theory = match EffectTheory::k_symmetric_projectors(k.0.clone(), &tol) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        let d = k.0.dim();
        let samples = if samples == 0 { 64 * d * d } else { samples };
        match state_space(&theory, samples, seed, &tol) {
            Ok(report) => {
                *out_dimension = report.affine_dimension;
                *out_unique = report.unique;
                clear_error();
                PtqhStatus::PtqhStatusOk
            }
            Err(e) => fail(&e),
        }
    })
}
