//! C ABI for `consensus-lab`.
//!
//! Conventions:
//! - Every fallible function returns a [`ClStatus`]; results go through out
//!   pointers, which are left untouched on failure.
//! - Scenarios and traces are opaque handles released with their `_free`
//!   function. Passing NULL to a `_free` function is a no-op.
//! - The message of the last failure on the calling thread is available from
//!   [`cl_last_error`].
//! - Panics never cross the boundary; they surface as `CL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use consensus_lab::config::{bundled, ScenarioFile};
use consensus_lab::controller::check_hurwitz;
use consensus_lab::graph::{graph_lyapunov, Topology};
use consensus_lab::output;
use consensus_lab::sim::{self, metrics, Scenario, Trace};
use consensus_lab::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON or a field of the wrong type.
    Parse = 3,
    /// Well-formed input that violates a model invariant.
    Validation = 4,
    /// Singular or indefinite graph matrices.
    Numerical = 5,
    /// The simulation stopped early; the partial trace is still returned.
    Aborted = 6,
    Io = 7,
    OutOfRange = 8,
    Panic = 9,
}

/// A validated scenario.
pub struct ClScenario {
    inner: Scenario,
}

/// A simulation trace.
pub struct ClTrace {
    inner: Trace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> ClStatus {
    match e {
        Error::Scenario { message, .. } if message.starts_with("line ") => ClStatus::Parse,
        Error::SingularPinnedLaplacian { .. } | Error::NonPositiveQ(_) => ClStatus::Numerical,
        Error::Io(_) => ClStatus::Io,
        Error::NonFinite(_) | Error::Diverged(_) | Error::NonFiniteDrift { .. } => {
            ClStatus::Aborted
        }
        _ => ClStatus::Validation,
    }
}

fn fail(e: Error) -> ClStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn guard(f: impl FnOnce() -> ClStatus) -> ClStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            ClStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, ClStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(ClStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        ClStatus::InvalidUtf8
    })
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("`", stringify!($p), "` is null"));
            return ClStatus::NullPointer;
        })+
    };
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn publish(s: Scenario, out: *mut *mut ClScenario) -> ClStatus {
    unsafe { *out = Box::into_raw(Box::new(ClScenario { inner: s })) };
    ClStatus::Ok
}

/// Parses and validates a scenario from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_scenario_from_json(
    json: *const c_char,
    out: *mut *mut ClScenario,
) -> ClStatus {
    guard(|| {
        non_null!(out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ScenarioFile::from_json(text).and_then(|f| f.build()) {
            Ok(s) => publish(s, out),
            Err(e) => fail(e),
        }
    })
}

/// Loads and validates a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_scenario_from_file(
    path: *const c_char,
    out: *mut *mut ClScenario,
) -> ClStatus {
    guard(|| {
        non_null!(out);
        let path = match read_str(path) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match consensus_lab::config::load_scenario(Path::new(path)) {
            Ok(s) => publish(s, out),
            Err(e) => fail(e),
        }
    })
}

/// Loads a bundled scenario: `"sec5"`, `"avoidance_pair"` or `"obstacle"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_scenario_builtin(
    name: *const c_char,
    out: *mut *mut ClScenario,
) -> ClStatus {
    guard(|| {
        non_null!(out);
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let Some((_, text)) = bundled::ALL.iter().find(|(n, _)| *n == name) else {
            set_error(format!("no bundled scenario named `{name}`"));
            return ClStatus::OutOfRange;
        };
        match ScenarioFile::from_json(text).and_then(|f| f.build()) {
            Ok(s) => publish(s, out),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `scenario` must be NULL or a handle from a `cl_scenario_*` constructor
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cl_scenario_free(scenario: *mut ClScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_scenario_n_agents(
    scenario: *const ClScenario,
    out: *mut usize,
) -> ClStatus {
    non_null!(scenario, out);
    *out = (*scenario).inner.n_agents();
    ClStatus::Ok
}

/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_scenario_order(
    scenario: *const ClScenario,
    out: *mut usize,
) -> ClStatus {
    non_null!(scenario, out);
    *out = (*scenario).inner.order();
    ClStatus::Ok
}

/// Replaces the simulated horizon; the scenario is revalidated.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_scenario_set_duration(
    scenario: *mut ClScenario,
    duration: f64,
) -> ClStatus {
    guard(|| {
        non_null!(scenario);
        let mut next = (*scenario).inner.clone();
        next.duration = duration;
        match next.validate() {
            Ok(_) => {
                (*scenario).inner = next;
                ClStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Replaces the integration step; the scenario is revalidated.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_scenario_set_dt(scenario: *mut ClScenario, dt: f64) -> ClStatus {
    guard(|| {
        non_null!(scenario);
        let mut next = (*scenario).inner.clone();
        next.dt = dt;
        match next.validate() {
            Ok(_) => {
                (*scenario).inner = next;
                ClStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs the closed loop. On `CL_STATUS_ABORTED` the partial trace is still
/// written to `out` and must be freed.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_run(scenario: *const ClScenario, out: *mut *mut ClTrace) -> ClStatus {
    guard(|| {
        non_null!(scenario, out);
        match sim::run(&(*scenario).inner) {
            Ok(trace) => {
                let status = match &trace.aborted {
                    Some(reason) => {
                        set_error(format!("aborted: {reason}"));
                        ClStatus::Aborted
                    }
                    None => ClStatus::Ok,
                };
                *out = Box::into_raw(Box::new(ClTrace { inner: trace }));
                status
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `trace` must be NULL or a handle from [`cl_run`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_free(trace: *mut ClTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of records.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_len(trace: *const ClTrace, out: *mut usize) -> ClStatus {
    non_null!(trace, out);
    *out = (*trace).inner.len();
    ClStatus::Ok
}

/// Writes 1 to `out` if the run stopped early, else 0.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_aborted(trace: *const ClTrace, out: *mut c_int) -> ClStatus {
    non_null!(trace, out);
    *out = c_int::from((*trace).inner.aborted.is_some());
    ClStatus::Ok
}

fn record(trace: &Trace, index: usize) -> Result<&sim::Record, ClStatus> {
    trace.records.get(index).ok_or_else(|| {
        set_error(format!("record {index} out of range ({})", trace.len()));
        ClStatus::OutOfRange
    })
}

fn check_index(what: &str, i: usize, n: usize) -> Result<(), ClStatus> {
    if i >= n {
        set_error(format!("{what} {i} out of range ({n})"));
        return Err(ClStatus::OutOfRange);
    }
    Ok(())
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Time of record `index`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_time(
    trace: *const ClTrace,
    index: usize,
    out: *mut f64,
) -> ClStatus {
    non_null!(trace, out);
    *out = try_status!(record(&(*trace).inner, index)).t;
    ClStatus::Ok
}

/// State channel `channel` (0-based) of follower `agent` (0-based) at record
/// `index`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_agent_state(
    trace: *const ClTrace,
    index: usize,
    agent: usize,
    channel: usize,
    out: *mut f64,
) -> ClStatus {
    non_null!(trace, out);
    let t = &(*trace).inner;
    let r = try_status!(record(t, index));
    try_status!(check_index("agent", agent, t.n_agents));
    try_status!(check_index("channel", channel, t.order));
    *out = r.state.agents[agent][channel];
    ClStatus::Ok
}

/// State channel `channel` of the leader at record `index`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_leader_state(
    trace: *const ClTrace,
    index: usize,
    channel: usize,
    out: *mut f64,
) -> ClStatus {
    non_null!(trace, out);
    let t = &(*trace).inner;
    let r = try_status!(record(t, index));
    try_status!(check_index("channel", channel, t.order));
    *out = r.state.leader[channel];
    ClStatus::Ok
}

/// Tracking error `(x_i - ψ_i) - (x_0 - ψ_0)` in channel `channel`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_tracking_error(
    trace: *const ClTrace,
    index: usize,
    agent: usize,
    channel: usize,
    out: *mut f64,
) -> ClStatus {
    non_null!(trace, out);
    let t = &(*trace).inner;
    let r = try_status!(record(t, index));
    try_status!(check_index("agent", agent, t.n_agents));
    try_status!(check_index("channel", channel, t.order));
    *out = r.relative[channel][agent];
    ClStatus::Ok
}

/// Control input of follower `agent` at record `index`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_control(
    trace: *const ClTrace,
    index: usize,
    agent: usize,
    out: *mut f64,
) -> ClStatus {
    non_null!(trace, out);
    let t = &(*trace).inner;
    let r = try_status!(record(t, index));
    try_status!(check_index("agent", agent, t.n_agents));
    *out = r.controls[agent];
    ClStatus::Ok
}

/// Writes `trace.csv`, `summary.json` and the figure tables into `dir`.
///
/// # Safety
/// `trace` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_write_outputs(
    trace: *const ClTrace,
    dir: *const c_char,
) -> ClStatus {
    guard(|| {
        non_null!(trace);
        let dir = try_status!(read_str(dir));
        let t = &(*trace).inner;
        match metrics(t).and_then(|m| output::write_run_outputs(Path::new(dir), t, &m)) {
            Ok(()) => ClStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Metrics summary as a JSON string, released with [`cl_string_free`].
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_trace_metrics_json(
    trace: *const ClTrace,
    out: *mut *mut c_char,
) -> ClStatus {
    guard(|| {
        non_null!(trace, out);
        match metrics(&(*trace).inner) {
            Ok(m) => {
                let text = output::summary_json(&m);
                *out = CString::new(text).expect("JSON has no NUL").into_raw();
                ClStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Solves the graph Lyapunov construction for an `n`-follower topology.
/// `adjacency` is row-major `n×n`; `q_out` receives `n` values of
/// `q = (ν1 L + ν2 B)^{-1} 1`.
///
/// # Safety
/// `adjacency` must hold `n*n` doubles, `leader_weights` and `q_out` `n`
/// doubles each, and `min_eig_q_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_graph_lyapunov(
    n: usize,
    adjacency: *const f64,
    leader_weights: *const f64,
    nu1: f64,
    nu2: f64,
    q_out: *mut f64,
    min_eig_q_out: *mut f64,
) -> ClStatus {
    guard(|| {
        non_null!(adjacency, leader_weights, q_out, min_eig_q_out);
        if n == 0 {
            set_error("n must be positive");
            return ClStatus::OutOfRange;
        }
        let a = std::slice::from_raw_parts(adjacency, n * n);
        let b = std::slice::from_raw_parts(leader_weights, n);
        let rows: Vec<Vec<f64>> = a.chunks(n).map(<[f64]>::to_vec).collect();
        let result =
            Topology::from_rows(&rows, b, nu1, nu2, false).and_then(|t| graph_lyapunov(&t));
        match result {
            Ok(l) => {
                std::slice::from_raw_parts_mut(q_out, n).copy_from_slice(l.q.as_slice());
                *min_eig_q_out = l.min_eig_q;
                ClStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes 1 to `out` if `s^m + λ_m s^{m-1} + ... + λ_1` (`m = len`) is
/// Hurwitz, else 0.
///
/// # Safety
/// `lambda` must hold `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_check_hurwitz(
    lambda: *const f64,
    len: usize,
    out: *mut c_int,
) -> ClStatus {
    guard(|| {
        non_null!(lambda, out);
        let l = std::slice::from_raw_parts(lambda, len);
        *out = c_int::from(check_hurwitz(l));
        ClStatus::Ok
    })
}
