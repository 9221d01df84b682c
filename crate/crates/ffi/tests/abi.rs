use std::f64::consts::PI;
use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use ab_solenoid_ffi::*;

fn infinite() -> *mut AbSolenoid {
    let mut h = ptr::null_mut();
    assert_eq!(ab_solenoid_new_infinite(1.0, 1.0, &mut h), AbStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    // SAFETY: buffer is 256 bytes.
    unsafe { ab_last_error_message(buf.as_mut_ptr(), buf.len()) };
    // SAFETY: the call always NUL-terminates.
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn potentials_and_phase() {
    let h = infinite();
    let mut a = AbVec2::default();
    assert_eq!(ab_potential(h, AbGauge::Symmetric, 2.0, 0.0, &mut a), AbStatus::Ok);
    assert_eq!(a, AbVec2 { x: 0.0, y: 0.25 });
    assert_eq!(ab_potential(h, AbGauge::Landau2, 0.5, 0.2, &mut a), AbStatus::Ok);
    assert!((a.y - 0.5).abs() < 1e-15 && a.x == 0.0);
    let mut flux = 0.0;
    assert_eq!(ab_solenoid_flux(h, &mut flux), AbStatus::Ok);
    assert!((flux - PI).abs() < 1e-15);
    for gauge in [AbGauge::Symmetric, AbGauge::Landau2] {
        let mut ph = 0.0;
        assert_eq!(
            ab_phase_circle(h, gauge, 0.1, 0.0, 2.0, 2, -1.0, 1e-10, &mut ph),
            AbStatus::Ok
        );
        assert!((ph + 2.0 * PI).abs() < 1e-8, "{ph}");
    }
    let mut dl = 0.0;
    assert_eq!(
        ab_ramp_delta_l_mech(h, 3.0, AbRampShape::Linear, 5.0, -1.0, &mut dl),
        AbStatus::Ok
    );
    assert!((dl - 0.5).abs() < 1e-9);
    // SAFETY: handle from ab_solenoid_new_infinite, freed once.
    unsafe { ab_solenoid_free(h) };
}

#[test]
fn finite_handle() {
    let mut h = ptr::null_mut();
    assert_eq!(ab_solenoid_new_finite(1.0, 1.0, 100.0, &mut h), AbStatus::Ok);
    let mut f = AbCylindricalField::default();
    assert_eq!(ab_finite_field(h, 0.0, 0.0, 1e-12, &mut f), AbStatus::Ok);
    assert!((f.b_z - 100.0 / (100.0f64 * 100.0 + 1.0).sqrt()).abs() < 1e-9);
    let mut alpha = 0.0;
    assert_eq!(ab_alpha_exponent(h, 1, 2.0, 0.0, -1.0, 1e-9, &mut alpha), AbStatus::Ok);
    assert!((alpha - 1.5).abs() < 0.02 * 1.5);
    assert_eq!(ab_finite_field(h, 1.0, 0.0, 1e-12, &mut f), AbStatus::NearSingular);
    assert!(last_error().contains("current sheet"), "{}", last_error());
    // SAFETY: handle from ab_solenoid_new_finite, freed once.
    unsafe { ab_solenoid_free(h) };
}

#[test]
fn errors_and_null_pointers() {
    let mut h = ptr::null_mut();
    assert_eq!(ab_solenoid_new_infinite(-1.0, 1.0, &mut h), AbStatus::InvalidInput);
    assert!(h.is_null());
    assert!(last_error().contains("radius"));
    assert_eq!(
        ab_solenoid_new_infinite(1.0, 1.0, ptr::null_mut()),
        AbStatus::NullPointer
    );
    let mut v = 0.0;
    assert_eq!(ab_solenoid_flux(ptr::null(), &mut v), AbStatus::InvalidInput);
    assert_eq!(ab_bessel_j(-1.0, 1.0, 1e-12, &mut v), AbStatus::InvalidInput);
    assert_eq!(ab_bessel_j(0.5, 2.0, 1e-12, &mut v), AbStatus::Ok);
    assert!((v - (2.0 / (PI * 2.0)).sqrt() * 2.0f64.sin()).abs() < 1e-12);
    // SAFETY: null is accepted.
    unsafe { ab_solenoid_free(ptr::null_mut()) };
    // infinite solenoids have no alpha exponent
    let h = infinite();
    assert_eq!(
        ab_alpha_exponent(h, 1, 2.0, 0.0, -1.0, 1e-9, &mut v),
        AbStatus::InvalidInput
    );
    // SAFETY: handle freed once.
    unsafe { ab_solenoid_free(h) };
}

#[test]
fn error_message_sizing() {
    assert_eq!(
        ab_solenoid_new_infinite(0.0, 1.0, &mut ptr::null_mut()),
        AbStatus::InvalidInput
    );
    // SAFETY: null buffer with zero length only queries the size.
    let need = unsafe { ab_last_error_message(ptr::null_mut(), 0) };
    assert_eq!(need, last_error().len() + 1);
    let mut small = [1 as std::ffi::c_char; 4];
    // SAFETY: buffer is 4 bytes.
    unsafe { ab_last_error_message(small.as_mut_ptr(), 4) };
    assert_eq!(small[3], 0);
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ab_solenoid.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "ab_solenoid_new_finite",
        "ab_phase_circle",
        "ab_last_error_message",
        "AB_STATUS_NEAR_SINGULAR",
    ] {
        assert!(text.contains(name), "{name}");
    }
    // a C compiler is optional in the build environment
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror", header])
        .output()
    else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
