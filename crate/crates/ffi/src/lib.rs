//! C interface to the `ltstep` solver.
//!
//! A run is held behind the opaque `LtsRun` handle: create it from configuration text,
//! optionally change variant and mode, solve, read results, free it. Every function
//! returns an [`LtsStatus`]; on failure a message for the calling thread is available
//! from [`lts_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ltstep::cli::{execute, RunConfig, RunResult};
use ltstep::solver::{DEFAULT_EPS, DEFAULT_MAX_ITERS};
use ltstep::{CompositeGrid, Error, SolveMode, Trace, Variant};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtsStatus {
    Ok = 0,
    NullPointer = 1,
    /// A string argument is not UTF-8, or a name or number is out of range.
    InvalidArgument = 2,
    Config = 3,
    Dimension = 4,
    Solver = 5,
    /// The run finished but some window missed the iteration tolerance. Results are
    /// available.
    NotConverged = 6,
    /// Results were requested before a successful solve.
    NotSolved = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// Opaque run handle.
pub struct LtsRun {
    config: RunConfig,
    grid: CompositeGrid,
    result: Option<RunResult>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: LtsStatus, msg: impl Into<String>) -> LtsStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> LtsStatus {
    let status = match e {
        Error::Config(_) | Error::Usage(_) => LtsStatus::Config,
        Error::Dimension { .. } => LtsStatus::Dimension,
        Error::Solver(_) => LtsStatus::Solver,
        Error::Io(_) => LtsStatus::Internal,
    };
    fail(status, e.to_string())
}

/// Run `f`, turning a panic into `Internal`.
fn guard(f: impl FnOnce() -> LtsStatus) -> LtsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(LtsStatus::Internal, "panic inside ltstep"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, LtsStatus> {
    if s.is_null() {
        return Err(fail(LtsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(LtsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(run: *const LtsRun) -> Result<&'a LtsRun, LtsStatus> {
    run.as_ref().ok_or_else(|| fail(LtsStatus::NullPointer, "run handle is null"))
}

unsafe fn handle_mut<'a>(run: *mut LtsRun) -> Result<&'a mut LtsRun, LtsStatus> {
    run.as_mut().ok_or_else(|| fail(LtsStatus::NullPointer, "run handle is null"))
}

fn solved(run: &LtsRun) -> Result<&RunResult, LtsStatus> {
    run.result
        .as_ref()
        .ok_or_else(|| fail(LtsStatus::NotSolved, "run has not been solved"))
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failure on this thread, or null. The pointer stays valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Create a run from configuration text (`section.key = value` lines).
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lts_run_new(config: *const c_char, out: *mut *mut LtsRun) -> LtsStatus {
    guard(|| {
        if out.is_null() {
            return fail(LtsStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = try_status!(read_str(config, "config"));
        let cfg = match RunConfig::parse(text) {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        let grid = match cfg.validate() {
            Ok(g) => g,
            Err(e) => return from_error(e),
        };
        *out = Box::into_raw(Box::new(LtsRun {
            config: cfg,
            grid,
            result: None,
        }));
        LtsStatus::Ok
    })
}

/// Release a run. Null is ignored.
///
/// # Safety
/// `run` must come from [`lts_run_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lts_run_free(run: *mut LtsRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Select the variant by name: `is1-coarse`, `is1-fine`, `is2-coarse` or `is2-fine`.
/// Discards earlier results.
///
/// # Safety
/// `run` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lts_run_set_variant(run: *mut LtsRun, name: *const c_char) -> LtsStatus {
    guard(|| {
        let run = try_status!(handle_mut(run));
        let name = try_status!(read_str(name, "variant name"));
        match name.parse::<Variant>() {
            Ok(v) => {
                run.config.variant = v;
                run.result = None;
                LtsStatus::Ok
            }
            Err(e) => fail(LtsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Select the solve mode by name: `converged`, `single-iteration`, `predictor-only` or
/// `direct`. `eps` and `max_iters` apply to the converged mode; zero picks the defaults.
/// Discards earlier results.
///
/// # Safety
/// `run` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lts_run_set_mode(
    run: *mut LtsRun,
    name: *const c_char,
    eps: f64,
    max_iters: usize,
) -> LtsStatus {
    guard(|| {
        let run = try_status!(handle_mut(run));
        let name = try_status!(read_str(name, "mode name"));
        let mut mode = match name.parse::<SolveMode>() {
            Ok(m) => m,
            Err(e) => return fail(LtsStatus::InvalidArgument, e.to_string()),
        };
        if let SolveMode::Converged { eps: e, max_iters: m } = &mut mode {
            *e = if eps == 0.0 { DEFAULT_EPS } else { eps };
            *m = if max_iters == 0 { DEFAULT_MAX_ITERS } else { max_iters };
        }
        if let Err(e) = mode.validate() {
            return fail(LtsStatus::InvalidArgument, e.to_string());
        }
        run.config.mode = mode;
        run.result = None;
        LtsStatus::Ok
    })
}

/// March over all windows. Returns `NotConverged` when some window missed the tolerance;
/// results are kept in that case.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lts_run_solve(run: *mut LtsRun) -> LtsStatus {
    guard(|| {
        let run = try_status!(handle_mut(run));
        run.result = None;
        let cfg = &run.config;
        match execute(&run.grid, cfg.variant, cfg.mode, &cfg.problem(), cfg.inject_exact) {
            Ok(r) => {
                let converged = r.report.converged();
                run.result = Some(r);
                if converged {
                    LtsStatus::Ok
                } else {
                    fail(LtsStatus::NotConverged, "corrector did not reach the tolerance in every window")
                }
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of cells in the fine and coarse subdomains.
///
/// # Safety
/// `run` must be a live handle; `fine` and `coarse` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lts_run_cell_counts(run: *const LtsRun, fine: *mut usize, coarse: *mut usize) -> LtsStatus {
    guard(|| {
        let run = try_status!(handle(run));
        if fine.is_null() || coarse.is_null() {
            return fail(LtsStatus::NullPointer, "output pointer is null");
        }
        *fine = run.grid.fine().n_cells();
        *coarse = run.grid.coarse().n_cells();
        LtsStatus::Ok
    })
}

/// Number of coarse windows.
///
/// # Safety
/// `run` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lts_run_window_count(run: *const LtsRun, out: *mut usize) -> LtsStatus {
    guard(|| {
        let run = try_status!(handle(run));
        if out.is_null() {
            return fail(LtsStatus::NullPointer, "out is null");
        }
        *out = run.grid.windows();
        LtsStatus::Ok
    })
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> LtsStatus {
    if buf.is_null() {
        return fail(LtsStatus::NullPointer, "buffer is null");
    }
    if len < values.len() {
        return fail(
            LtsStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        );
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    LtsStatus::Ok
}

/// Cell centers, fine subdomain first. `len` is the capacity of `buf`.
///
/// # Safety
/// `run` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lts_run_cell_centers(run: *const LtsRun, buf: *mut f64, len: usize) -> LtsStatus {
    guard(|| {
        let run = try_status!(handle(run));
        copy_out(&run.grid.all_centers(), buf, len)
    })
}

/// Cell values at the final time, fine subdomain first.
///
/// # Safety
/// `run` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lts_run_final_solution(run: *const LtsRun, buf: *mut f64, len: usize) -> LtsStatus {
    guard(|| {
        let run = try_status!(handle(run));
        let r = try_status!(solved(run));
        let t = &r.trajectory;
        let values: Vec<f64> = t.fine[t.fine.len() - 1]
            .iter()
            .chain(&t.coarse[t.coarse.len() - 1])
            .copied()
            .collect();
        copy_out(&values, buf, len)
    })
}

/// Scalar results of a solved run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LtsSummary {
    pub final_l2_error: f64,
    pub final_l2_error_fine: f64,
    pub final_l2_error_coarse: f64,
    pub space_time_h1_error: f64,
    pub mean_iterations: f64,
    pub max_conservativity_defect: f64,
    pub converged: bool,
}

/// # Safety
/// `run` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lts_run_summary(run: *const LtsRun, out: *mut LtsSummary) -> LtsStatus {
    guard(|| {
        let run = try_status!(handle(run));
        let r = try_status!(solved(run));
        if out.is_null() {
            return fail(LtsStatus::NullPointer, "out is null");
        }
        *out = LtsSummary {
            final_l2_error: r.errors.final_l2,
            final_l2_error_fine: r.errors.final_l2_fine,
            final_l2_error_coarse: r.errors.final_l2_coarse,
            space_time_h1_error: r.errors.space_time_h1,
            mean_iterations: r.report.mean_iterations(),
            max_conservativity_defect: r.report.max_conservativity_defect(),
            converged: r.report.converged(),
        };
        LtsStatus::Ok
    })
}

/// Average `ratio` fine trace values into one coarse value.
///
/// # Safety
/// `fine` must be valid for `ratio` reads and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lts_project_fine_to_coarse(fine: *const f64, ratio: usize, out: *mut f64) -> LtsStatus {
    guard(|| {
        if fine.is_null() || out.is_null() {
            return fail(LtsStatus::NullPointer, "trace pointer is null");
        }
        if ratio == 0 {
            return fail(LtsStatus::InvalidArgument, "ratio must be positive");
        }
        let values = std::slice::from_raw_parts(fine, ratio).to_vec();
        match ltstep::project_fine_to_coarse(&Trace::fine(values, 1.0), ratio) {
            Ok(t) => {
                *out = t.at(0);
                LtsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Copy one coarse value into `ratio` fine slots.
///
/// # Safety
/// `out` must be valid for `ratio` writes.
#[no_mangle]
pub unsafe extern "C" fn lts_inject_coarse_to_fine(value: f64, ratio: usize, out: *mut f64) -> LtsStatus {
    guard(|| {
        if out.is_null() {
            return fail(LtsStatus::NullPointer, "output pointer is null");
        }
        if ratio == 0 {
            return fail(LtsStatus::InvalidArgument, "ratio must be positive");
        }
        match ltstep::inject_coarse_to_fine(&Trace::coarse(value, ratio as f64), ratio) {
            Ok(t) => copy_out(t.values(), out, ratio),
            Err(e) => from_error(e),
        }
    })
}

/// Check configuration text without creating a run.
///
/// # Safety
/// `config` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lts_validate_config(config: *const c_char) -> LtsStatus {
    guard(|| {
        let text = try_status!(read_str(config, "config"));
        match RunConfig::parse(text).and_then(|c| c.validate().map(|_| ())) {
            Ok(()) => LtsStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}
