use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use qkolmo_ffi::*;

fn fixture(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../qkolmo/fixtures")
        .join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn machine(name: &str) -> *mut QkMachine {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { qk_machine_parse(fixture(name).as_ptr(), &mut m) },
        QkStatus::Ok
    );
    m
}

#[test]
fn simulate_identity_through_handles() {
    let m = machine("identity.qtm");
    let mut unitary = false;
    assert_eq!(unsafe { qk_machine_validate(m, 8, 3, &mut unitary) }, QkStatus::Ok);
    assert!(unitary);

    let input = CString::new("01").unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { qk_qstring_classical(input.as_ptr(), &mut q) }, QkStatus::Ok);
    let (mut t, mut out) = (0usize, ptr::null_mut());
    assert_eq!(unsafe { qk_simulate(m, q, 10, &mut t, &mut out) }, QkStatus::Ok);
    assert_eq!(t, 3);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qk_qstring_describe(out, &mut s) }, QkStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "01");
    let mut d = 1.0;
    assert_eq!(unsafe { qk_qstring_trace_distance(q, out, &mut d) }, QkStatus::Ok);
    assert_eq!(d, 0.0);
    unsafe {
        qk_string_free(s);
        qk_qstring_free(out);
        qk_qstring_free(q);
        qk_machine_free(m);
    }
}

#[test]
fn error_codes_and_messages() {
    let bad = CString::new("states: q0\n").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { qk_machine_parse(bad.as_ptr(), &mut m) }, QkStatus::Parse);
    assert!(m.is_null());
    assert!(!qk_last_error().is_null());

    assert_eq!(unsafe { qk_machine_parse(ptr::null(), &mut m) }, QkStatus::NullPointer);

    let never = machine("never_halting.qtm");
    let input = CString::new("1").unwrap();
    let mut q = ptr::null_mut();
    unsafe { qk_qstring_classical(input.as_ptr(), &mut q) };
    let (mut t, mut out) = (0usize, ptr::null_mut());
    assert_eq!(
        unsafe { qk_simulate(never, q, 10, &mut t, &mut out) },
        QkStatus::NonHalting
    );
    let msg = unsafe { CStr::from_ptr(qk_last_error()) }.to_str().unwrap();
    assert!(msg.contains("does not halt"), "{msg}");

    let not_binary = CString::new("012").unwrap();
    let mut q2 = ptr::null_mut();
    assert_eq!(
        unsafe { qk_qstring_classical(not_binary.as_ptr(), &mut q2) },
        QkStatus::InvalidArgument
    );
    unsafe {
        qk_qstring_free(q);
        qk_machine_free(never);
    }
}

#[test]
fn halting_dims_and_buffer_check() {
    let m = machine("identity.qtm");
    let mut dims = [9usize; 6];
    assert_eq!(
        unsafe { qk_halting_dims(m, 2, 5, dims.as_mut_ptr(), dims.len()) },
        QkStatus::Ok
    );
    assert_eq!(dims, [0, 0, 0, 4, 0, 0]);
    assert_eq!(
        unsafe { qk_halting_dims(m, 2, 8, dims.as_mut_ptr(), dims.len()) },
        QkStatus::BufferTooSmall
    );
    unsafe { qk_machine_free(m) };
}

#[test]
fn counting_bound_trivial_case() {
    let mut b = 0.0;
    assert_eq!(unsafe { qk_counting_bound(8, 0.0, &mut b) }, QkStatus::Ok);
    assert_eq!(b, 3.0);
    assert_eq!(unsafe { qk_counting_bound(8, 0.5, &mut b) }, QkStatus::InvalidArgument);
}

#[test]
fn header_compiles_as_c() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/qkolmo.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "qk_machine_parse",
        "qk_simulate",
        "qk_last_error",
        "QK_STATUS_NON_HALTING",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}
