use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use involutions_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(inv_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn catalog_handle(name: &str, params: &[f64]) -> *mut InvInvolution {
    let name = CString::new(name).unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { inv_catalog_new(name.as_ptr(), params.as_ptr(), params.len(), &mut h) };
    assert_eq!(st, InvStatus::InvOk, "{}", last_error());
    assert!(!h.is_null());
    h
}

#[test]
fn negation_round_trip() {
    let h = catalog_handle("negation", &[]);
    unsafe {
        let mut v = 0.0;
        assert_eq!(inv_involution_eval(h, 1.25, &mut v), InvStatus::InvOk);
        assert_eq!(v, -1.25);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(inv_involution_domain(h, &mut lo, &mut hi), InvStatus::InvOk);
        assert!(lo == f64::NEG_INFINITY && hi == f64::INFINITY);
        let (mut res, mut passed) = (1.0, 0);
        assert_eq!(
            inv_involution_verify(h, 101, 1e-9, &mut res, &mut passed),
            InvStatus::InvOk
        );
        assert_eq!(passed, 1);
        assert_eq!(res, 0.0);
        let mut fp = 1.0;
        assert_eq!(inv_involution_fixed_point(h, 1e-12, &mut fp), InvStatus::InvOk);
        assert!(fp.abs() <= 1e-12);
        inv_involution_free(h);
    }
}

#[test]
fn even_preset_matches_closed_form() {
    let name = CString::new("y2_over_8").unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(
            inv_from_even_preset(name.as_ptr(), ptr::null(), 0, &mut h),
            InvStatus::InvOk
        );
        for x in [-0.9, -0.5, 0.0, 1.0, 2.5] {
            let mut v = 0.0;
            assert_eq!(inv_involution_eval(h, x, &mut v), InvStatus::InvOk);
            let exact = x + 4.0 - 4.0 * (1.0 + x).sqrt();
            assert!((v - exact).abs() <= 1e-8, "x = {x}: {v} vs {exact}");
        }
        inv_involution_free(h);
    }
}

#[test]
fn potential_period_is_constant() {
    let h = catalog_handle("rational", &[1.0]);
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(inv_potential_new(h, 2.0, &mut p), InvStatus::InvOk);
        let mut v = 1.0;
        assert_eq!(inv_potential_eval(p, 0.0, &mut v), InvStatus::InvOk);
        assert_eq!(v, 0.0);
        for e in [0.05, 0.3, 1.0] {
            let mut t = 0.0;
            assert_eq!(inv_potential_period(p, e, &mut t), InvStatus::InvOk, "{}", last_error());
            assert!((t - std::f64::consts::PI).abs() <= 1e-8, "E = {e}: T = {t}");
        }
        inv_potential_free(p);
        inv_involution_free(h);
    }
}

#[test]
fn fde_closed_form_initial_value() {
    let mut y = 0.0;
    unsafe {
        assert_eq!(inv_fde_closed_form(0.5, 3.0, 0.0, &mut y), InvStatus::InvOk);
    }
    assert!((y - 3.0).abs() <= 1e-15);
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let name = CString::new("no_such_thing").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(
            inv_catalog_new(name.as_ptr(), ptr::null(), 0, &mut h),
            InvStatus::InvUnknownName
        );
        assert!(h.is_null());
        assert!(last_error().contains("no_such_thing"));

        assert_eq!(
            inv_catalog_new(ptr::null(), ptr::null(), 0, &mut h),
            InvStatus::InvNullPointer
        );
        assert!(last_error().contains("null pointer"));

        let p = catalog_handle("parabolic", &[]);
        let mut v = 0.0;
        assert_eq!(inv_involution_eval(p, 1e6, &mut v), InvStatus::InvOutsideDomain);
        assert_eq!(inv_involution_eval(p, 0.0, ptr::null_mut()), InvStatus::InvNullPointer);
        let (mut r, mut ok) = (0.0, 0);
        assert_eq!(
            inv_involution_verify(p, 101, -1.0, &mut r, &mut ok),
            InvStatus::InvInvalidArgument
        );
        inv_involution_free(p);

        assert_eq!(inv_involution_eval(ptr::null(), 0.0, &mut v), InvStatus::InvNullPointer);
        inv_involution_free(ptr::null_mut());
        inv_potential_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(inv_involution_eval(ptr::null(), 0.0, &mut v), InvStatus::InvNullPointer);
    }
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(other.is_empty());
    assert!(!last_error().is_empty());
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_symbol() {
    let header = std::fs::read_to_string(manifest_dir().join("include/involutions.h")).unwrap();
    for sym in [
        "inv_last_error",
        "inv_catalog_new",
        "inv_from_even_preset",
        "inv_involution_free",
        "inv_involution_eval",
        "inv_involution_domain",
        "inv_involution_verify",
        "inv_involution_fixed_point",
        "inv_potential_new",
        "inv_potential_free",
        "inv_potential_eval",
        "inv_potential_period",
        "inv_fde_closed_form",
        "typedef struct InvInvolution InvInvolution",
        "INV_NULL_POINTER = 1",
    ] {
        assert!(header.contains(sym), "missing {sym}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "involutions.h"

int main(void) {
    InvInvolution *h = NULL;
    double a = 1.0, v = 0.0, t = 0.0;
    if (inv_catalog_new("rational", &a, 1, &h) != INV_OK) return 10;
    if (inv_involution_eval(h, 0.5, &v) != INV_OK) return 11;
    double back = 0.0;
    if (inv_involution_eval(h, v, &back) != INV_OK) return 12;
    if (fabs(back - 0.5) > 1e-12) return 13;
    InvPotential *p = NULL;
    if (inv_potential_new(h, 1.0, &p) != INV_OK) return 14;
    if (inv_potential_period(p, 0.2, &t) != INV_OK) return 15;
    if (fabs(t - 2.0 * M_PI) > 1e-8) return 16;
    if (inv_catalog_new("bogus", NULL, 0, &h) != INV_UNKNOWN_NAME) return 17;
    printf("%s\n", inv_last_error());
    inv_potential_free(p);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let Ok(exe) = std::env::current_exe() else { return };
    // target/<profile>/deps/<test binary>
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libinvolutions_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("main.c");
    let bin = dir.join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-D_DEFAULT_SOURCE")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).contains("bogus"));
    std::fs::remove_dir_all(&dir).ok();
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("involutions-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
