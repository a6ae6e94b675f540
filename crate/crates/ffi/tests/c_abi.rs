use std::ffi::{c_char, CString};
use std::ptr;

use orlicz_eig_ffi::*;

fn young(spec: &str) -> *mut OeYoung {
    let spec = CString::new(spec).unwrap();
    let mut y = ptr::null_mut();
    assert_eq!(unsafe { oe_young_new(spec.as_ptr(), &mut y) }, OeStatus::Ok);
    assert!(!y.is_null());
    y
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { oe_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn young_round_trip() {
    let y = young("power:3");
    let (mut g_big, mut g, mut gp) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { oe_young_evaluate(y, 2.0, &mut g_big, &mut g, &mut gp) }, OeStatus::Ok);
    assert!((g_big - 8.0 / 3.0).abs() < 1e-15 && (g - 4.0).abs() < 1e-15 && (gp - 4.0).abs() < 1e-15);
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { oe_young_exponents(y, &mut lo, &mut hi) }, OeStatus::Ok);
    assert_eq!((lo, hi), (3.0, 3.0));
    let (mut a, mut b) = (false, false);
    assert_eq!(unsafe { oe_young_flags(y, &mut a, &mut b) }, OeStatus::Ok);
    assert!(a && !b);
    unsafe { oe_young_free(y) };
}

#[test]
fn errors_are_reported() {
    let spec = CString::new("power:0.9").unwrap();
    let mut y = ptr::null_mut();
    assert_eq!(unsafe { oe_young_new(spec.as_ptr(), &mut y) }, OeStatus::ConfigError);
    assert!(y.is_null());
    assert!(last_error().contains("p must be"));
    assert_eq!(unsafe { oe_young_new(ptr::null(), &mut y) }, OeStatus::InvalidArgument);
    let mut x = 0.0;
    assert_eq!(unsafe { oe_young_exponents(ptr::null(), &mut x, &mut x) }, OeStatus::InvalidArgument);
    unsafe { oe_young_free(ptr::null_mut()) };
    unsafe { oe_eigenpair_free(ptr::null_mut()) };
    assert!(unsafe { oe_eigenpair_lambda(ptr::null()) }.is_nan());
}

#[test]
fn norms_of_a_hat() {
    let y = young("power:2");
    let coeffs = [1.0];
    let mut out = 0.0;
    assert_eq!(unsafe { oe_seminorm(y, 1.0, 0.0, 1.0, 2, coeffs.as_ptr(), 1, &mut out) }, OeStatus::Ok);
    assert!((out - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(unsafe { oe_norm_g(y, 0.0, 1.0, 2, coeffs.as_ptr(), 1, &mut out) }, OeStatus::Ok);
    assert!((out - (1.0f64 / 6.0).sqrt()).abs() < 1e-12);
    assert_eq!(
        unsafe { oe_norm_g(y, 0.0, 1.0, 3, coeffs.as_ptr(), 1, &mut out) },
        OeStatus::ConfigError
    );
    unsafe { oe_young_free(y) };
}

#[test]
fn first_eigenpair() {
    let y = young("power:2");
    let mut opts = oe_solve_options_default();
    opts.n_elements = 64;
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { oe_eig_first(y, 1.0, &opts, &mut p) }, OeStatus::Ok);
    assert!(unsafe { oe_eigenpair_converged(p) });
    assert!((unsafe { oe_eigenpair_lambda(p) } - std::f64::consts::PI).abs() < 1e-3);
    assert!((unsafe { oe_eigenpair_mu(p) } - unsafe { oe_eigenpair_lambda(p) }).abs() < 1e-8);
    assert!(unsafe { oe_eigenpair_residual(p) } <= 1e-7);
    let len = unsafe { oe_eigenpair_len(p) };
    assert_eq!(len, 65);
    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { oe_eigenpair_values(p, buf.as_mut_ptr(), len) }, OeStatus::Ok);
    assert_eq!((buf[0], buf[64]), (0.0, 0.0));
    assert!(buf[32] > 0.0);
    assert_eq!(unsafe { oe_eigenpair_values(p, buf.as_mut_ptr(), 3) }, OeStatus::InvalidArgument);
    unsafe { oe_eigenpair_free(p) };

    let y15 = young("power:1.5");
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { oe_eig_first(y15, 1.0, &opts, &mut q) }, OeStatus::ConfigError);
    assert!(last_error().contains("not admitted"));
    unsafe { oe_young_free(y15) };
    unsafe { oe_young_free(y) };
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/orlicz_eig.h")).unwrap();
    for name in [
        "oe_young_new",
        "oe_young_free",
        "oe_eig_first",
        "oe_eigenpair_values",
        "oe_last_error_message",
        "typedef struct OeYoung OeYoung",
        "OE_STATUS_CONFIG_ERROR = 2",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("liborlicz_eig_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = env!("CARGO_MANIFEST_DIR");
    let exe = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("oe_smoke");
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I", &format!("{dir}/include"), &format!("{dir}/tests/smoke.c")])
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("3.14"));
}
