//! C ABI over `diagmetric`.
//!
//! Every entry point returns a [`DmStatus`]; results come back through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`dm_last_error`]. Objects are opaque handles owned by the caller and
//! released with the matching `_free` function. Strings returned by the
//! library must be released with [`dm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use diagmetric::cone::{self, ConeProblem, ConeVerdict};
use diagmetric::higgs::{self, DiagonalHiggsDatum};
use diagmetric::rootsys::{RootSystem, RootSystemSpec};
use diagmetric::toda::{self, ProblemFile, SolveOptions, SolveReport, TodaProblem, TodaState, Verdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    Solver = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmVerdict {
    Converged = 0,
    Infeasible = 1,
    IterationLimit = 2,
}

impl From<Verdict> for DmVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Converged => DmVerdict::Converged,
            Verdict::Infeasible => DmVerdict::Infeasible,
            Verdict::IterationLimit => DmVerdict::IterationLimit,
        }
    }
}

pub struct DmRootSystem(RootSystem);

pub struct DmHiggsDatum(DiagonalHiggsDatum);

pub struct DmTodaProblem(TodaProblem);

pub struct DmTodaSolution {
    state: TodaState,
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(DmStatus, String);

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure(DmStatus::InvalidInput, e.to_string())
    }

    fn parse(e: impl std::fmt::Display) -> Self {
        Failure(DmStatus::Parse, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(DmStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::input(format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(DmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(DmStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(Failure::input)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn dm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a named root system such as `("G", 2)`.
///
/// # Safety
/// `letter` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_root_system_new(letter: *const c_char, rank: usize, out: *mut *mut DmRootSystem) -> DmStatus {
    guard(|| {
        let letter = str_arg(letter, "letter")?;
        let rs = RootSystem::build(&RootSystemSpec::named(letter, rank)).map_err(Failure::input)?;
        write_out(out, Box::into_raw(Box::new(DmRootSystem(rs))))
    })
}

/// # Safety
/// `rs` must be null or a handle from [`dm_root_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_root_system_free(rs: *mut DmRootSystem) {
    if !rs.is_null() {
        drop(Box::from_raw(rs));
    }
}

/// # Safety
/// `rs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_root_system_root_count(rs: *const DmRootSystem, out: *mut usize) -> DmStatus {
    guard(|| write_out(out, handle(rs, "root system")?.0.roots().len()))
}

/// Roots and their coroots as CSV; free the result with [`dm_string_free`].
///
/// # Safety
/// `rs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_root_system_roots_csv(rs: *const DmRootSystem, out: *mut *mut c_char) -> DmStatus {
    guard(|| {
        let csv = handle(rs, "root system")?.0.roots_csv();
        write_out(out, into_c_string(csv)?)
    })
}

/// Decides closed (`strict = false`) or open (`strict = true`) cone
/// membership for a JSON cone problem. The verdict with its certificate is
/// returned as JSON when `verdict_json` is not null.
///
/// # Safety
/// `problem_json` must be a NUL-terminated string; `answer` must be
/// writable; `verdict_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn dm_cone_decide(
    problem_json: *const c_char,
    strict: bool,
    answer: *mut bool,
    verdict_json: *mut *mut c_char,
) -> DmStatus {
    guard(|| {
        let p: ConeProblem = serde_json::from_str(str_arg(problem_json, "problem")?).map_err(Failure::parse)?;
        p.validate().map_err(Failure::input)?;
        let v = if strict { cone::open_cone_member(&p) } else { cone::closed_cone_member(&p) };
        write_out(answer, v.answer)?;
        if !verdict_json.is_null() {
            let s = serde_json::to_string(&v).map_err(Failure::input)?;
            write_out(verdict_json, into_c_string(s)?)?;
        }
        Ok(())
    })
}

/// Checks a verdict's certificate against its problem, both as JSON.
///
/// # Safety
/// Both strings must be NUL-terminated and `valid` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_cone_verify(
    problem_json: *const c_char,
    verdict_json: *const c_char,
    valid: *mut bool,
) -> DmStatus {
    guard(|| {
        let p: ConeProblem = serde_json::from_str(str_arg(problem_json, "problem")?).map_err(Failure::parse)?;
        let v: ConeVerdict = serde_json::from_str(str_arg(verdict_json, "verdict")?).map_err(Failure::parse)?;
        write_out(valid, cone::verify_certificate(&p, &v))
    })
}

/// Parses a datum such as `{"r":2,"degrees":["1","-1"],"arrows":[[2,1]]}`.
///
/// # Safety
/// `json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_higgs_datum_from_json(json: *const c_char, out: *mut *mut DmHiggsDatum) -> DmStatus {
    guard(|| {
        let d: DiagonalHiggsDatum = serde_json::from_str(str_arg(json, "datum")?).map_err(Failure::parse)?;
        write_out(out, Box::into_raw(Box::new(DmHiggsDatum(d))))
    })
}

/// # Safety
/// `d` must be null or a live datum handle.
#[no_mangle]
pub unsafe extern "C" fn dm_higgs_datum_free(d: *mut DmHiggsDatum) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_higgs_is_semistable(d: *const DmHiggsDatum, out: *mut bool) -> DmStatus {
    guard(|| {
        let ok = higgs::is_semistable(&handle(d, "datum")?.0).map_err(Failure::input)?;
        write_out(out, ok)
    })
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_higgs_is_stable(d: *const DmHiggsDatum, out: *mut bool) -> DmStatus {
    guard(|| {
        let ok = higgs::is_stable(&handle(d, "datum")?.0).map_err(Failure::input)?;
        write_out(out, ok)
    })
}

/// Smallest `n ≥ 1` making the dual character integral.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_higgs_minimal_n(d: *const DmHiggsDatum, out: *mut u64) -> DmStatus {
    guard(|| write_out(out, higgs::minimal_n_of(&handle(d, "datum")?.0)))
}

/// Loads a problem file; relative CSV paths resolve against its directory.
///
/// # Safety
/// `path` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_problem_load(path: *const c_char, out: *mut *mut DmTodaProblem) -> DmStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let (_, p) = toda::load_problem(Path::new(path)).map_err(Failure::input)?;
        write_out(out, Box::into_raw(Box::new(DmTodaProblem(p))))
    })
}

/// Builds a problem from JSON text. `base_dir` may be null, in which case
/// CSV paths resolve against the working directory.
///
/// # Safety
/// `json` must be NUL-terminated, `base_dir` null or NUL-terminated, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_problem_from_json(
    json: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut DmTodaProblem,
) -> DmStatus {
    guard(|| {
        let file: ProblemFile = serde_json::from_str(str_arg(json, "problem")?).map_err(Failure::parse)?;
        let base = if base_dir.is_null() { "." } else { str_arg(base_dir, "base_dir")? };
        let p = file.assemble(Path::new(base)).map_err(Failure::input)?;
        write_out(out, Box::into_raw(Box::new(DmTodaProblem(p))))
    })
}

/// # Safety
/// `p` must be null or a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_problem_free(p: *mut DmTodaProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of doubles in a state: cells times rank.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_problem_len(p: *const DmTodaProblem, out: *mut usize) -> DmStatus {
    guard(|| write_out(out, handle(p, "problem")?.0.len()))
}

/// Runs the solver from `Ω = 0`. Pass `tol <= 0` or `max_iter = 0` for the
/// defaults. A returned solution may carry any verdict; only hard errors
/// give a non-`Ok` status.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_solve(
    p: *const DmTodaProblem,
    tol: f64,
    max_iter: usize,
    force_iterate: bool,
    out: *mut *mut DmTodaSolution,
) -> DmStatus {
    guard(|| {
        let p = &handle(p, "problem")?.0;
        let mut opts = SolveOptions { force_iterate, ..SolveOptions::default() };
        if tol > 0.0 {
            opts.tol = tol;
        }
        if max_iter > 0 {
            opts.max_iter = max_iter;
        }
        let (state, report) = toda::solve(p, &opts).map_err(|e| Failure(DmStatus::Solver, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(DmTodaSolution { state, report })))
    })
}

/// # Safety
/// `s` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_solution_free(s: *mut DmTodaSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_solution_verdict(s: *const DmTodaSolution, out: *mut DmVerdict) -> DmStatus {
    guard(|| write_out(out, handle(s, "solution")?.report.verdict.into()))
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_solution_residual(s: *const DmTodaSolution, out: *mut f64) -> DmStatus {
    guard(|| write_out(out, handle(s, "solution")?.report.residual))
}

/// Copies the state into `buf`, which must hold at least
/// [`dm_toda_problem_len`] doubles; `written` receives the count.
///
/// # Safety
/// `buf` must be valid for `len` writes and `written` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_solution_omega(
    s: *const DmTodaSolution,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> DmStatus {
    guard(|| {
        let omega = &handle(s, "solution")?.state.omega;
        if buf.is_null() {
            return Err(Failure(DmStatus::NullPointer, "buffer is null".into()));
        }
        if len < omega.len() {
            return Err(Failure::input(format!("buffer holds {len} values, state has {}", omega.len())));
        }
        ptr::copy_nonoverlapping(omega.as_ptr(), buf, omega.len());
        write_out(written, omega.len())
    })
}

/// The full solve report as JSON; free with [`dm_string_free`].
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dm_toda_solution_report_json(s: *const DmTodaSolution, out: *mut *mut c_char) -> DmStatus {
    guard(|| {
        let json = serde_json::to_string(&handle(s, "solution")?.report).map_err(Failure::input)?;
        write_out(out, into_c_string(json)?)
    })
}
