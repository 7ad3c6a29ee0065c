//! C ABI for the `robust-appt` library.
//!
//! Instances and schedules are opaque handles created from JSON and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`RaptStatus`]; on failure [`rapt_last_error_message`] describes the cause.
//! Strings returned by the library must be released with [`rapt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use robust_appt::adversary::{check_feasibility, worst_case_cost, worst_case_wait};
use robust_appt::cli::{solve, Method, SolveOptions, SolveStatus};
use robust_appt::{Error, Instance, Schedule};

/// Status codes shared by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RaptStatus {
    Ok = 0,
    /// Unexpected internal failure.
    Failure = 1,
    InvalidInput = 2,
    /// The method does not apply to this instance.
    NotApplicable = 3,
    /// A time limit stopped the solver; the returned schedule is the best found.
    TimeLimit = 4,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RaptMethod {
    Pta = 0,
    Asap = 1,
    Milp0 = 2,
    Milp = 3,
    Wsras = 4,
    Saa = 5,
    Exact = 6,
}

fn method_of(code: i32) -> Option<Method> {
    const ALL: [Method; 7] =
        [Method::Pta, Method::Asap, Method::Milp0, Method::Milp, Method::Wsras, Method::Saa, Method::Exact];
    usize::try_from(code).ok().and_then(|i| ALL.get(i).copied())
}

/// Solver settings. Zero-initialize for defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RaptSolveOptions {
    /// Seconds; zero or negative means no limit.
    pub time_limit: f64,
    /// Waiting cost for the weighted-sum method.
    pub wait_cost: f64,
    /// Worker threads for the exact method; zero means one.
    pub threads: u32,
    /// Row-major `sample_count x n` service times for the sample-average method.
    pub samples: *const f64,
    pub sample_count: usize,
}

/// Opaque instance handle.
pub struct RaptInstance(Instance);

/// Opaque schedule handle.
pub struct RaptSchedule(Schedule);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RaptStatus {
    match err {
        Error::InvalidInput(_) | Error::Parse(_) | Error::Io { .. } => RaptStatus::InvalidInput,
        Error::NotApplicable(_) | Error::Unsupported(_) | Error::SizeCap { .. } => RaptStatus::NotApplicable,
        Error::Solver(_) => RaptStatus::Failure,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<RaptStatus, RaptStatus>) -> RaptStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) | Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            RaptStatus::Panic
        }
    }
}

fn fail(err: Error) -> RaptStatus {
    set_error(err.to_string());
    status_of(&err)
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, RaptStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(RaptStatus::NullPointer);
    }
    Ok(&*p)
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, RaptStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(RaptStatus::NullPointer);
    }
    Ok(&mut *p)
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, RaptStatus> {
    let c = deref(p, "string")?;
    CStr::from_ptr(c).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        RaptStatus::InvalidInput
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, RaptStatus> {
    serde_json::from_str(s).map_err(|e| fail(Error::Parse(e.to_string())))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn rapt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses and validates an instance from JSON.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rapt_instance_from_json(json: *const c_char, out: *mut *mut RaptInstance) -> RaptStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let inst: Instance = parse_json(read_str(json)?)?;
        inst.validate().map_err(fail)?;
        *out = Box::into_raw(Box::new(RaptInstance(inst)));
        Ok(RaptStatus::Ok)
    })
}

/// # Safety
/// `inst` must come from [`rapt_instance_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rapt_instance_free(inst: *mut RaptInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Parses a schedule `{"perm": [...], "start": [...]}` with one-based `perm`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rapt_schedule_from_json(json: *const c_char, out: *mut *mut RaptSchedule) -> RaptStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s: Schedule = parse_json(read_str(json)?)?;
        *out = Box::into_raw(Box::new(RaptSchedule(s)));
        Ok(RaptStatus::Ok)
    })
}

/// # Safety
/// `sched` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rapt_schedule_free(sched: *mut RaptSchedule) {
    if !sched.is_null() {
        drop(Box::from_raw(sched));
    }
}

/// Number of appointments in the schedule, or zero for a null handle.
///
/// # Safety
/// `sched` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rapt_schedule_len(sched: *const RaptSchedule) -> usize {
    sched.as_ref().map_or(0, |s| s.0.start.len())
}

/// Copies start times (by appointment) and one-based customer numbers into
/// caller buffers of length `len`; either buffer may be null.
///
/// # Safety
/// Non-null buffers must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn rapt_schedule_get(
    sched: *const RaptSchedule,
    start: *mut f64,
    perm: *mut usize,
    len: usize,
) -> RaptStatus {
    guard(|| {
        let s = &deref(sched, "schedule")?.0;
        if len != s.start.len() {
            return Err(fail(Error::InvalidInput(format!("buffer length {len}, schedule has {}", s.start.len()))));
        }
        if !start.is_null() {
            std::slice::from_raw_parts_mut(start, len).copy_from_slice(&s.start);
        }
        if !perm.is_null() {
            std::slice::from_raw_parts_mut(perm, len).copy_from_slice(&s.sequence.to_one_based());
        }
        Ok(RaptStatus::Ok)
    })
}

/// Serializes the schedule as JSON. Release with [`rapt_string_free`].
///
/// # Safety
/// `sched` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rapt_schedule_to_json(sched: *const RaptSchedule, out: *mut *mut c_char) -> RaptStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s = &deref(sched, "schedule")?.0;
        let text = robust_appt::json::to_string(s).map_err(|e| fail(Error::Solver(e.to_string())))?;
        *out = CString::new(text).expect("json has no nul").into_raw();
        Ok(RaptStatus::Ok)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn rapt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Solves `inst` with a [`RaptMethod`] value. On `RAPT_STATUS_OK` or `RAPT_STATUS_TIME_LIMIT` a schedule
/// is stored in `out` and its objective in `objective` (if non-null).
///
/// # Safety
/// Pointers must be valid; `opts` may be null for defaults.
#[no_mangle]
pub unsafe extern "C" fn rapt_solve(
    inst: *const RaptInstance,
    method: i32,
    opts: *const RaptSolveOptions,
    out: *mut *mut RaptSchedule,
    objective: *mut f64,
) -> RaptStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let inst = &deref(inst, "instance")?.0;
        let method = method_of(method).ok_or_else(|| fail(Error::InvalidInput(format!("unknown method {method}"))))?;
        let mut so = SolveOptions { threads: 1, ..Default::default() };
        if let Some(o) = opts.as_ref() {
            so.time_limit = (o.time_limit > 0.0).then(|| Duration::from_secs_f64(o.time_limit));
            so.wait_cost = o.wait_cost;
            so.threads = o.threads.max(1) as usize;
            if o.sample_count > 0 {
                let flat = std::slice::from_raw_parts(deref(o.samples, "samples")?, o.sample_count * inst.n);
                so.samples = flat.chunks(inst.n).map(<[f64]>::to_vec).collect();
            }
        }
        let r = solve(inst, method, &so).map_err(fail)?;
        if let Some(v) = objective.as_mut() {
            *v = r.objective;
        }
        *out = Box::into_raw(Box::new(RaptSchedule(r.schedule)));
        Ok(if r.status == SolveStatus::TimeLimit { RaptStatus::TimeLimit } else { RaptStatus::Ok })
    })
}

/// Worst-case total cost of a schedule over the uncertainty set.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rapt_worst_case_cost(
    sched: *const RaptSchedule,
    inst: *const RaptInstance,
    out: *mut f64,
) -> RaptStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let (s, i) = (&deref(sched, "schedule")?.0, &deref(inst, "instance")?.0);
        s.check_against(i).map_err(fail)?;
        *out = worst_case_cost(s, i).map_err(fail)?.value;
        Ok(RaptStatus::Ok)
    })
}

/// Worst-case waiting time of zero-based appointment `appointment`.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rapt_worst_case_wait(
    sched: *const RaptSchedule,
    inst: *const RaptInstance,
    appointment: usize,
    out: *mut f64,
) -> RaptStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let (s, i) = (&deref(sched, "schedule")?.0, &deref(inst, "instance")?.0);
        s.check_against(i).map_err(fail)?;
        if appointment >= i.n {
            return Err(fail(Error::InvalidInput(format!("appointment {appointment} out of range"))));
        }
        *out = worst_case_wait(s, i, appointment).map_err(fail)?;
        Ok(RaptStatus::Ok)
    })
}

/// Sets `feasible` to whether every guarantee holds in the worst case.
///
/// # Safety
/// Handles must be live and `feasible` valid.
#[no_mangle]
pub unsafe extern "C" fn rapt_check_feasibility(
    sched: *const RaptSchedule,
    inst: *const RaptInstance,
    feasible: *mut bool,
) -> RaptStatus {
    guard(|| {
        let feasible = out_ptr(feasible, "feasible")?;
        let (s, i) = (&deref(sched, "schedule")?.0, &deref(inst, "instance")?.0);
        s.check_against(i).map_err(fail)?;
        *feasible = check_feasibility(s, i).map_err(fail)?.feasible;
        Ok(RaptStatus::Ok)
    })
}
