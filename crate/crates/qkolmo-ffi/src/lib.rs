//! C ABI over the core library. Every call returns a [`QkStatus`]; on failure
//! the message is kept per thread and read with [`qk_last_error`].
//!
//! Handles are opaque and owned by the caller, who frees them with the
//! matching `*_free` function. Passing a freed handle is undefined behaviour.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use qkolmo::halting::exact_halting_spaces;
use qkolmo::pipeline::counting_bound;
use qkolmo::qtm::{halting_time, run, validate_unitarity, QtmSpec, QubitString};
use qkolmo::{Caps, Error};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Dimension = 4,
    CapExceeded = 5,
    NonHalting = 6,
    InvalidArgument = 7,
    BufferTooSmall = 8,
    Other = 9,
}

/// A parsed machine.
pub struct QkMachine(QtmSpec);

/// A qubit string (density operator on strings of bounded length).
pub struct QkQubitString(QubitString);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QkStatus, msg: impl Into<String>) -> QkStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> QkStatus {
    match e {
        Error::Parse { .. } | Error::MalformedTable(_) | Error::MalformedStream => QkStatus::Parse,
        Error::DimensionMismatch { .. } => QkStatus::Dimension,
        Error::CapExceeded { .. } | Error::SearchCapExceeded(_) => QkStatus::CapExceeded,
        Error::NonHalting(_) => QkStatus::NonHalting,
        Error::InvalidArgument(_) | Error::NotHermitian | Error::KraftViolated(_) => QkStatus::InvalidArgument,
        _ => QkStatus::Other,
    }
}

fn from_error(e: Error) -> QkStatus {
    let s = status_of(&e);
    fail(s, e.to_string())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, QkStatus> {
    if p.is_null() {
        return Err(fail(QkStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(QkStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn caps() -> Caps {
    Caps::from_env().unwrap_or_default()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a machine from its text format.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qk_machine_parse(src: *const c_char, out: *mut *mut QkMachine) -> QkStatus {
    if out.is_null() {
        return fail(QkStatus::NullPointer, "null output pointer");
    }
    let s = match text(src) {
        Ok(s) => s,
        Err(e) => return e,
    };
    match QtmSpec::parse(s) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(QkMachine(m)));
            QkStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `m` must come from [`qk_machine_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn qk_machine_free(m: *mut QkMachine) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Exact unitarity check on the window reachable from inputs of length at
/// most `n_max` within `t_max` steps.
///
/// # Safety
/// `m` must be a live handle and `unitary` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qk_machine_validate(
    m: *const QkMachine,
    t_max: usize,
    n_max: usize,
    unitary: *mut bool,
) -> QkStatus {
    if m.is_null() || unitary.is_null() {
        return fail(QkStatus::NullPointer, "null argument");
    }
    match validate_unitarity(&(*m).0, t_max, n_max, &caps()) {
        Ok(u) => {
            *unitary = u;
            QkStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Dimensions of the exact halting spaces `H^(n)(t)` for `t = 0..=t_max`,
/// written to `dims[0..=t_max]`; `len` must be at least `t_max + 1`.
///
/// # Safety
/// `m` must be a live handle and `dims` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn qk_halting_dims(
    m: *const QkMachine,
    n: usize,
    t_max: usize,
    dims: *mut usize,
    len: usize,
) -> QkStatus {
    if m.is_null() || dims.is_null() {
        return fail(QkStatus::NullPointer, "null argument");
    }
    if len < t_max + 1 {
        return fail(QkStatus::BufferTooSmall, format!("need {} slots", t_max + 1));
    }
    let spaces = match exact_halting_spaces(&(*m).0, n, t_max, &caps()) {
        Ok(s) => s,
        Err(e) => return from_error(e),
    };
    let out = std::slice::from_raw_parts_mut(dims, len);
    out[..=t_max].fill(0);
    for h in spaces {
        if h.t <= t_max {
            out[h.t] = h.dim();
        }
    }
    QkStatus::Ok
}

/// Classical basis state `|s⟩`.
///
/// # Safety
/// `s` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qk_qstring_classical(s: *const c_char, out: *mut *mut QkQubitString) -> QkStatus {
    if out.is_null() {
        return fail(QkStatus::NullPointer, "null output pointer");
    }
    let s = match text(s) {
        Ok(s) => s,
        Err(e) => return e,
    };
    match QubitString::classical(s) {
        Ok(q) => {
            *out = Box::into_raw(Box::new(QkQubitString(q)));
            QkStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `q` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn qk_qstring_free(q: *mut QkQubitString) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Human-readable form (`01` for a classical string). Free with
/// [`qk_string_free`].
///
/// # Safety
/// `q` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qk_qstring_describe(q: *const QkQubitString, out: *mut *mut c_char) -> QkStatus {
    if q.is_null() || out.is_null() {
        return fail(QkStatus::NullPointer, "null argument");
    }
    match CString::new((*q).0.describe()) {
        Ok(c) => {
            *out = c.into_raw();
            QkStatus::Ok
        }
        Err(_) => fail(QkStatus::Other, "description contains NUL"),
    }
}

/// Trace distance between two qubit strings.
///
/// # Safety
/// Both handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qk_qstring_trace_distance(
    a: *const QkQubitString,
    b: *const QkQubitString,
    out: *mut f64,
) -> QkStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return fail(QkStatus::NullPointer, "null argument");
    }
    match (*a).0.trace_distance(&(*b).0) {
        Ok(d) => {
            *out = d;
            QkStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn qk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs `input` to its halting time (at most `t_max`) and returns the time
/// and the output qubit string.
///
/// # Safety
/// Handles must be live; `time` and `output` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qk_simulate(
    m: *const QkMachine,
    input: *const QkQubitString,
    t_max: usize,
    time: *mut usize,
    output: *mut *mut QkQubitString,
) -> QkStatus {
    if m.is_null() || input.is_null() || time.is_null() || output.is_null() {
        return fail(QkStatus::NullPointer, "null argument");
    }
    let caps = caps();
    let (spec, sigma) = (&(*m).0, &(*input).0);
    let t = match halting_time(spec, sigma, t_max, &caps) {
        Ok(Some(t)) => t,
        Ok(None) => return from_error(Error::NonHalting(t_max)),
        Err(e) => return from_error(e),
    };
    match run(spec, sigma, t, &caps) {
        Ok(state) => {
            *time = t;
            *output = Box::into_raw(Box::new(QkQubitString(state.read_output())));
            QkStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// `(log d + 4δ log(1/δ)) / (1 − 4δ)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qk_counting_bound(d: u64, delta: f64, out: *mut f64) -> QkStatus {
    if out.is_null() {
        return fail(QkStatus::NullPointer, "null output pointer");
    }
    match counting_bound(d, delta) {
        Ok(b) => {
            *out = b;
            QkStatus::Ok
        }
        Err(e) => from_error(e),
    }
}
