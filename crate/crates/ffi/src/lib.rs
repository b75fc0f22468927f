//! C ABI over the poolbudget solvers.
//!
//! Instances and reports are opaque heap handles released with their
//! `_free` function. Every fallible call returns a [`PbStatus`]; on failure
//! [`pb_last_error`] describes the problem on the calling thread. Strings
//! returned through out-parameters are owned by the caller and released
//! with [`pb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use poolbudget::cli::{exit_code, solve, Algorithm};
use poolbudget::genio::{gen_synthetic, load_instance, save_instance, Family, SyntheticConfig};
use poolbudget::model::validate_instance;
use poolbudget::{Error, Instance, Rational, SolveReport};

/// Opaque validated instance.
pub struct PbInstance(Instance);

/// Opaque solver report.
pub struct PbReport(SolveReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not UTF-8.
    InvalidUtf8 = 2,
    /// Malformed or invalid input data.
    InputError = 3,
    /// The instance does not meet the solver's preconditions.
    PreconditionFailed = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbAlgorithm {
    OracleUwo = 0,
    OracleUwowp = 1,
    UwoFptas = 2,
    IdenticalCosts = 3,
    Greedy = 4,
    Symmetric = 5,
    LaminarFptas = 6,
    Maxpe = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbFamily {
    Uniform = 0,
    Normal = 1,
    Bernoulli = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: PbStatus, msg: &str) -> PbStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> PbStatus {
    let status = if exit_code(e) == 3 { PbStatus::PreconditionFailed } else { PbStatus::InputError };
    fail(status, &e.to_string())
}

/// Runs `f`, turning panics into [`PbStatus::Panic`].
fn guard(f: impl FnOnce() -> PbStatus) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(PbStatus::Ok) => {
            set_error("");
            PbStatus::Ok
        }
        Ok(status) => status,
        Err(_) => fail(PbStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `s` is null or a valid nul-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, PbStatus> {
    if s.is_null() {
        return Err(fail(PbStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(PbStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn give_string(text: String, out: *mut *mut c_char) -> PbStatus {
    match CString::new(text) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before building the text.
            unsafe { *out = c.into_raw() };
            PbStatus::Ok
        }
        Err(_) => fail(PbStatus::InputError, "output contains a nul byte"),
    }
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn pb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses and validates a JSON instance.
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_from_json(json: *const c_char, out: *mut *mut PbInstance) -> PbStatus {
    guard(|| {
        if out.is_null() {
            return fail(PbStatus::NullPointer, "out is null");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_instance(text).and_then(|raw| validate_instance(&raw, false)) {
            Ok(v) => {
                *out = Box::into_raw(Box::new(PbInstance(v.instance)));
                PbStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Draws a synthetic additive instance.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pb_generate_synthetic(
    family: PbFamily,
    agents: usize,
    projects: usize,
    seed: u64,
    out: *mut *mut PbInstance,
) -> PbStatus {
    guard(|| {
        if out.is_null() {
            return fail(PbStatus::NullPointer, "out is null");
        }
        if agents == 0 || projects == 0 {
            return fail(PbStatus::InputError, "agent and project counts must be at least 1");
        }
        let family = match family {
            PbFamily::Uniform => Family::Uniform,
            PbFamily::Normal => Family::Normal,
            PbFamily::Bernoulli => Family::Bernoulli,
        };
        let inst = gen_synthetic(&SyntheticConfig { family, n: agents, m: projects, seed });
        *out = Box::into_raw(Box::new(PbInstance(inst)));
        PbStatus::Ok
    })
}

/// Serializes an instance as JSON into a new string.
///
/// # Safety
/// `instance` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_to_json(instance: *const PbInstance, out: *mut *mut c_char) -> PbStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(PbStatus::NullPointer, "instance or out is null");
        }
        give_string(save_instance(&(*instance).0), out)
    })
}

/// Project count, or 0 for a null handle.
///
/// # Safety
/// `instance` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_num_projects(instance: *const PbInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.0.num_projects())
}

/// Agent count, or 0 for a null handle.
///
/// # Safety
/// `instance` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_num_agents(instance: *const PbInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.0.num_agents())
}

/// # Safety
/// `instance` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_free(instance: *mut PbInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Runs a solver. `eps_num / eps_den` is the approximation parameter and is
/// ignored by exact algorithms.
///
/// # Safety
/// `instance` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pb_solve(
    instance: *const PbInstance,
    algorithm: PbAlgorithm,
    eps_num: i64,
    eps_den: i64,
    out: *mut *mut PbReport,
) -> PbStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(PbStatus::NullPointer, "instance or out is null");
        }
        if eps_den == 0 {
            return fail(PbStatus::InputError, "epsilon denominator is zero");
        }
        let alg = match algorithm {
            PbAlgorithm::OracleUwo => Algorithm::OracleUwo,
            PbAlgorithm::OracleUwowp => Algorithm::OracleUwowp,
            PbAlgorithm::UwoFptas => Algorithm::UwoFptas,
            PbAlgorithm::IdenticalCosts => Algorithm::IdenticalCosts,
            PbAlgorithm::Greedy => Algorithm::Greedy,
            PbAlgorithm::Symmetric => Algorithm::Symmetric,
            PbAlgorithm::LaminarFptas => Algorithm::LaminarFptas,
            PbAlgorithm::Maxpe => Algorithm::Maxpe,
        };
        match solve(&(*instance).0, alg, &Rational::new(eps_num, eps_den)) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(PbReport(report)));
                PbStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Number of funded projects, or 0 for a null handle.
///
/// # Safety
/// `report` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_report_funded_len(report: *const PbReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.outcome.funded.len())
}

/// Copies up to `cap` funded project indices, ascending, into `buf` and
/// returns the total count.
///
/// # Safety
/// `report` is null or a live handle; `buf` holds `cap` writable slots.
#[no_mangle]
pub unsafe extern "C" fn pb_report_funded(report: *const PbReport, buf: *mut usize, cap: usize) -> usize {
    let Some(r) = report.as_ref() else { return 0 };
    let funded = r.0.outcome.funded.as_slice();
    if !buf.is_null() {
        ptr::copy_nonoverlapping(funded.as_ptr(), buf, funded.len().min(cap));
    }
    funded.len()
}

/// Social welfare of the funded set, rounded to a double; NaN for a null
/// handle. The exact value is in the JSON report.
///
/// # Safety
/// `report` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_report_welfare(report: *const PbReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.welfare.to_f64())
}

/// Payment excess of the funded set, rounded to a double; NaN for a null
/// handle.
///
/// # Safety
/// `report` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_report_excess(report: *const PbReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.excess.to_f64())
}

/// Serializes a report, with exact fractions, as JSON into a new string.
///
/// # Safety
/// `report` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pb_report_to_json(report: *const PbReport, out: *mut *mut c_char) -> PbStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(PbStatus::NullPointer, "report or out is null");
        }
        give_string(serde_json::to_string_pretty(&(*report).0).expect("reports serialize"), out)
    })
}

/// # Safety
/// `report` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pb_report_free(report: *mut PbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
