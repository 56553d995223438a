//! C ABI over the `levelcurve` crate.
//!
//! Objects cross the boundary as opaque handles created by `lc_*_new`-style
//! functions and released with the matching `lc_*_free`. Every fallible call
//! returns an [`LcStatus`]; on failure the message is kept per thread and can
//! be read with [`lc_last_error_message`]. Panics are caught and reported as
//! [`LcStatus::Panic`].
//!
//! Enum arguments are passed as `uint32_t` holding one of the `Lc*` enum
//! values and are validated on entry.
//!
//! Grid arrays are row-major with the level index outermost: entry
//! `k * n_theta + j` holds the value at level `t_k` and angle `θ_j`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levelcurve::cli::{check_jets, summarize_jets, JetsSummary};
use levelcurve::config::{JetsSpec, ProblemSpec};
use levelcurve::jet::{ChainReport, JetMode};
use levelcurve::profile::{
    check_affine, check_concave, check_convex, check_endpoint_bound, profile_from_solution, CheckReport,
    ProfileKind,
};
use levelcurve::solver::{solve, Equation, RingProblem, SupportSolution};
use levelcurve::support::{CircleSupport, MeridianSupport};
use levelcurve::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    InvalidGeometry = 1,
    NonConvexBody = 2,
    InvalidProblem = 3,
    NonConvexIterate = 4,
    NewtonDiverged = 5,
    OutOfRange = 6,
    GeometryNotNested = 7,
    NoRadialSolution = 8,
    TooFewSamples = 9,
    SingularSystem = 10,
    Config = 11,
    Io = 12,
    /// A required pointer argument was null.
    NullPointer = 20,
    /// A caller buffer is too small; the required length was still written.
    BufferTooSmall = 21,
    /// An enum argument is out of range.
    InvalidArgument = 22,
    Panic = 99,
}

impl From<&Error> for LcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidGeometry(_) => LcStatus::InvalidGeometry,
            Error::NonConvexBody { .. } => LcStatus::NonConvexBody,
            Error::InvalidProblem(_) => LcStatus::InvalidProblem,
            Error::NonConvexIterate { .. } => LcStatus::NonConvexIterate,
            Error::NewtonDiverged { .. } => LcStatus::NewtonDiverged,
            Error::OutOfRange(_) => LcStatus::OutOfRange,
            Error::GeometryNotNested(_) => LcStatus::GeometryNotNested,
            Error::NoRadialSolution(_) => LcStatus::NoRadialSolution,
            Error::TooFewSamples(_) => LcStatus::TooFewSamples,
            Error::SingularSystem(_) => LcStatus::SingularSystem,
            Error::Config(_) => LcStatus::Config,
            Error::Io { .. } => LcStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcEquation {
    PLaplace = 0,
    MinimalSurface = 1,
    HarmonicAxisym3d = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcProfileKind {
    MaxGradOverK1 = 0,
    MinLogK1 = 1,
    Gauss2d = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcCheckKind {
    Convex = 0,
    Concave = 1,
    Affine = 2,
    EndpointBound = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcJetMode {
    PLaplace = 0,
    Minimal = 1,
}

/// Outcome of one profile check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcCheckResult {
    pub worst_value: f64,
    pub tol_used: f64,
    /// Index into the interior profile samples.
    pub location: usize,
    /// Fitted slope for affine checks, NaN otherwise.
    pub slope: f64,
    pub pass: bool,
}

/// A validated ring problem.
pub struct LcProblem(RingProblem);

/// A converged solution.
pub struct LcSolution(SupportSolution);

/// Chain reports of a batch of random jets.
pub struct LcJetReport {
    reports: Vec<ChainReport>,
    summary: JetsSummary,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: LcStatus, msg: impl Into<String>) -> LcStatus {
    set_error(msg.into());
    status
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), LcStatus>) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(LcStatus::Panic, msg)
        }
    }
}

fn lift<T>(r: levelcurve::Result<T>) -> Result<T, LcStatus> {
    r.map_err(|e| fail(LcStatus::from(&e), e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), LcStatus> {
    if p.is_null() {
        Err(fail(LcStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], LcStatus> {
    non_null(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

/// Copy `src` into the caller buffer; `*len` is always set to `src.len()`.
unsafe fn copy_out(src: &[f64], buf: *mut f64, len: *mut usize) -> Result<(), LcStatus> {
    non_null(len, "len")?;
    let cap = *len;
    *len = src.len();
    if buf.is_null() || cap < src.len() {
        return Err(fail(
            LcStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

fn bad_enum(what: &str, v: u32) -> LcStatus {
    fail(LcStatus::InvalidArgument, format!("{v} is not a valid {what}"))
}

fn equation(kind: u32, p: f64) -> Result<Equation, LcStatus> {
    Ok(match kind {
        k if k == LcEquation::PLaplace as u32 => Equation::PLaplace { p },
        k if k == LcEquation::MinimalSurface as u32 => Equation::MinimalSurface,
        k if k == LcEquation::HarmonicAxisym3d as u32 => Equation::HarmonicAxisym3D,
        k => return Err(bad_enum("LcEquation", k)),
    })
}

fn profile_kind(kind: u32) -> Result<ProfileKind, LcStatus> {
    Ok(match kind {
        k if k == LcProfileKind::MaxGradOverK1 as u32 => ProfileKind::MaxGradOverK1,
        k if k == LcProfileKind::MinLogK1 as u32 => ProfileKind::MinLogK1,
        k if k == LcProfileKind::Gauss2d as u32 => ProfileKind::Gauss2d,
        k => return Err(bad_enum("LcProfileKind", k)),
    })
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Planar ring from outer and inner support samples on the uniform grid
/// `θ_j = 2πj/n`. The inner samples may use a different even count.
///
/// # Safety
/// `outer` and `inner` must point to `n_outer` and `n_inner` doubles; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_problem_new_planar(
    kind: u32,
    p: f64,
    outer: *const f64,
    n_outer: usize,
    inner: *const f64,
    n_inner: usize,
    n_t: usize,
    out: *mut *mut LcProblem,
) -> LcStatus {
    guard(|| {
        non_null(out, "out")?;
        let o = lift(CircleSupport::new(slice(outer, n_outer, "outer")?.to_vec()))?;
        let i = lift(CircleSupport::new(slice(inner, n_inner, "inner")?.to_vec()))?;
        let pb = lift(RingProblem::planar(equation(kind, p)?, &o, &i, n_t))?;
        *out = Box::into_raw(Box::new(LcProblem(pb)));
        Ok(())
    })
}

/// Axisymmetric ring in ℝ³ from meridian samples on `θ_j = πj/m`,
/// `j = 0..=m` (so `m + 1` values each).
///
/// # Safety
/// As for [`lc_problem_new_planar`].
#[no_mangle]
pub unsafe extern "C" fn lc_problem_new_axisym(
    kind: u32,
    p: f64,
    outer: *const f64,
    n_outer: usize,
    inner: *const f64,
    n_inner: usize,
    n_t: usize,
    out: *mut *mut LcProblem,
) -> LcStatus {
    guard(|| {
        non_null(out, "out")?;
        let o = lift(MeridianSupport::new(slice(outer, n_outer, "outer")?.to_vec()))?;
        let i = lift(MeridianSupport::new(slice(inner, n_inner, "inner")?.to_vec()))?;
        let pb = lift(RingProblem::axisym(equation(kind, p)?, &o, &i, n_t))?;
        *out = Box::into_raw(Box::new(LcProblem(pb)));
        Ok(())
    })
}

/// Problem from the JSON `problem` object of a run configuration. Sample
/// paths are resolved against the working directory.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_problem_from_json(json: *const c_char, out: *mut *mut LcProblem) -> LcStatus {
    guard(|| {
        non_null(json, "json")?;
        non_null(out, "out")?;
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| fail(LcStatus::Config, format!("json is not UTF-8: {e}")))?;
        let spec: ProblemSpec = serde_json::from_str(text)
            .map_err(|e| fail(LcStatus::Config, format!("invalid problem JSON: {e}")))?;
        let pb = lift(spec.build())?;
        *out = Box::into_raw(Box::new(LcProblem(pb)));
        Ok(())
    })
}

/// Override the Newton settings of a problem.
///
/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_problem_set_newton(
    problem: *mut LcProblem,
    tol: f64,
    max_iter: usize,
    damping: f64,
    convexity_guard: bool,
) -> LcStatus {
    guard(|| {
        non_null(problem, "problem")?;
        let n = &mut (*problem).0.newton;
        n.tol = tol;
        n.max_iter = max_iter;
        n.damping = damping;
        n.convexity_guard = convexity_guard;
        Ok(())
    })
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_problem_free(problem: *mut LcProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_solve(problem: *const LcProblem, out: *mut *mut LcSolution) -> LcStatus {
    guard(|| {
        non_null(problem, "problem")?;
        non_null(out, "out")?;
        let sol = lift(solve(&(*problem).0))?;
        *out = Box::into_raw(Box::new(LcSolution(sol)));
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_free(solution: *mut LcSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Grid size, final residual and Newton iteration count.
///
/// # Safety
/// `solution` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_info(
    solution: *const LcSolution,
    n_theta: *mut usize,
    n_t: *mut usize,
    residual_norm: *mut f64,
    iterations: *mut usize,
) -> LcStatus {
    guard(|| {
        non_null(solution, "solution")?;
        let s = &(*solution).0;
        if !n_theta.is_null() {
            *n_theta = s.grid.len();
        }
        if !n_t.is_null() {
            *n_t = s.n_t();
        }
        if !residual_norm.is_null() {
            *residual_norm = s.residual_norm;
        }
        if !iterations.is_null() {
            *iterations = s.iterations;
        }
        Ok(())
    })
}

/// Copy the support values `h` into `buf`. On entry `*len` is the buffer
/// capacity; on return it is the number of values (`n_t * n_theta`).
///
/// # Safety
/// `solution` must be a live handle, `len` valid, and `buf` writable for
/// `*len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_h(solution: *const LcSolution, buf: *mut f64, len: *mut usize) -> LcStatus {
    guard(|| {
        non_null(solution, "solution")?;
        let flat: Vec<f64> = (*solution).0.h.concat();
        copy_out(&flat, buf, len)
    })
}

/// Same as [`lc_solution_h`] for `|∇u| = -1/h_t`.
///
/// # Safety
/// As for [`lc_solution_h`].
#[no_mangle]
pub unsafe extern "C" fn lc_solution_grad(solution: *const LcSolution, buf: *mut f64, len: *mut usize) -> LcStatus {
    guard(|| {
        non_null(solution, "solution")?;
        let flat: Vec<f64> = (*solution).0.h_t.concat().iter().map(|v| -1.0 / v).collect();
        copy_out(&flat, buf, len)
    })
}

/// Interior samples of a height profile (`n_t - 2` values) plus its two
/// boundary values.
///
/// # Safety
/// As for [`lc_solution_h`]; `f0` and `f1` may be null.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_profile(
    solution: *const LcSolution,
    kind: u32,
    buf: *mut f64,
    len: *mut usize,
    f0: *mut f64,
    f1: *mut f64,
) -> LcStatus {
    guard(|| {
        non_null(solution, "solution")?;
        let prof = lift(profile_from_solution(&(*solution).0, profile_kind(kind)?))?;
        if !f0.is_null() {
            *f0 = prof.f0;
        }
        if !f1.is_null() {
            *f1 = prof.f1;
        }
        copy_out(&prof.f, buf, len)
    })
}

/// Run one shape check on a profile with an absolute tolerance. A negative
/// `tol` selects `|tol| * max|f|`.
///
/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_check(
    solution: *const LcSolution,
    kind: u32,
    check: u32,
    tol: f64,
    out: *mut LcCheckResult,
) -> LcStatus {
    guard(|| {
        non_null(solution, "solution")?;
        non_null(out, "out")?;
        let prof = lift(profile_from_solution(&(*solution).0, profile_kind(kind)?))?;
        let tol = if tol < 0.0 { -tol * prof.scale() } else { tol };
        let rep: CheckReport = lift(match check {
            c if c == LcCheckKind::Convex as u32 => check_convex(&prof, tol),
            c if c == LcCheckKind::Concave as u32 => check_concave(&prof, tol),
            c if c == LcCheckKind::Affine as u32 => check_affine(&prof, tol),
            c if c == LcCheckKind::EndpointBound as u32 => check_endpoint_bound(&prof, prof.f0, prof.f1, tol),
            c => return Err(bad_enum("LcCheckKind", c)),
        })?;
        *out = LcCheckResult {
            worst_value: rep.worst_value,
            tol_used: rep.tol_used,
            location: rep.location,
            slope: rep.slope.unwrap_or(f64::NAN),
            pass: rep.pass,
        };
        Ok(())
    })
}

/// Check `count` seeded random jets. `threads = 0` uses all cores; the result
/// does not depend on the thread count.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_jets_check(
    mode: u32,
    n: usize,
    p: f64,
    alpha: f64,
    beta: f64,
    count: usize,
    seed: u64,
    threads: usize,
    out: *mut *mut LcJetReport,
) -> LcStatus {
    guard(|| {
        non_null(out, "out")?;
        if n < 2 || !(p > 1.0 && p.is_finite()) || !alpha.is_finite() || !beta.is_finite() {
            return Err(fail(
                LcStatus::InvalidArgument,
                format!("need n >= 2, p > 1 and finite exponents, got n = {n}, p = {p}"),
            ));
        }
        let spec = JetsSpec {
            mode: match mode {
                m if m == LcJetMode::PLaplace as u32 => JetMode::PLaplace,
                m if m == LcJetMode::Minimal as u32 => JetMode::Minimal,
                m => return Err(bad_enum("LcJetMode", m)),
            },
            n,
            p,
            alpha,
            beta,
            count,
            seed,
        };
        let threads = if threads == 0 { levelcurve::cli::thread_count() } else { threads };
        let reports = check_jets(&spec, threads);
        let summary = summarize_jets(&spec, &reports);
        *out = Box::into_raw(Box::new(LcJetReport { reports, summary }));
        Ok(())
    })
}

/// Failure count and worst identity error of a jet batch.
///
/// # Safety
/// `report` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn lc_jet_report_summary(
    report: *const LcJetReport,
    count: *mut usize,
    failures: *mut usize,
    worst_identity: *mut f64,
    worst_inequality: *mut f64,
) -> LcStatus {
    guard(|| {
        non_null(report, "report")?;
        let r = &*report;
        if !count.is_null() {
            *count = r.reports.len();
        }
        if !failures.is_null() {
            *failures = r.summary.failures;
        }
        if !worst_identity.is_null() {
            *worst_identity = r.summary.worst_identity;
        }
        if !worst_inequality.is_null() {
            *worst_inequality = r.summary.worst_inequality;
        }
        Ok(())
    })
}

/// Report of jet `index` as a JSON string, to be released with
/// [`lc_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_jet_report_json(
    report: *const LcJetReport,
    index: usize,
    out: *mut *mut c_char,
) -> LcStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(out, "out")?;
        let r = &*report;
        let item = r.reports.get(index).ok_or_else(|| {
            fail(
                LcStatus::InvalidArgument,
                format!("index {index} out of range for {} jets", r.reports.len()),
            )
        })?;
        let text = serde_json::to_string(item).map_err(|e| fail(LcStatus::Config, e.to_string()))?;
        *out = CString::new(text).map_err(|e| fail(LcStatus::Config, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_jet_report_free(report: *mut LcJetReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
