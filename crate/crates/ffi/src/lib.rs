//! C ABI over the solenoid toolkit.
//!
//! Every function returns an [`AbStatus`]; results go through out-pointers.
//! On failure, [`ab_last_error_message`] holds a description for the calling
//! thread. Handles from `ab_solenoid_new_*` must be released with
//! [`ab_solenoid_free`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ab_solenoid::dynamics::{ramp_scenario, RampProfile, RampShape};
use ab_solenoid::geometry::{Path, Point2};
use ab_solenoid::observables::ab_phase;
use ab_solenoid::quantum::{alpha_exponent, bessel_j};
use ab_solenoid::sources::{finite_cylindrical, GaugeField, SolenoidSpec};
use ab_solenoid::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NearSingular = 3,
    NotConverged = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbGauge {
    Symmetric = 0,
    Landau2 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbRampShape {
    Smoothstep = 0,
    Linear = 1,
}

/// Cylindrical components of the finite-solenoid fields at one point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AbCylindricalField {
    pub a_phi: f64,
    pub b_r: f64,
    pub b_z: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AbVec2 {
    pub x: f64,
    pub y: f64,
}

/// Opaque solenoid handle.
pub struct AbSolenoid {
    spec: SolenoidSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> AbStatus {
    match e {
        Error::InvalidInput(_) | Error::NonAxisymmetric { .. } | Error::NonCompact(_) => AbStatus::InvalidInput,
        Error::NearSingular { .. } | Error::IllConditioned(_) => AbStatus::NearSingular,
        Error::Convergence { .. } => AbStatus::NotConverged,
        Error::NonFinite { .. } | Error::Stencil { .. } | Error::Integrator { .. } => AbStatus::Numerical,
    }
}

/// Runs `f`, storing its value in `out` and turning errors and panics into a
/// status code.
fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Error>) -> AbStatus {
    if out.is_null() {
        set_error("output pointer is null".into());
        return AbStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null above; the caller guarantees it is writable.
            unsafe { out.write(v) };
            AbStatus::Ok
        }
        Ok(Err(e)) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            AbStatus::Panic
        }
    }
}

fn handle<'a>(h: *const AbSolenoid) -> Result<&'a AbSolenoid, Error> {
    // SAFETY: non-null handles come from `ab_solenoid_new_*` and stay valid
    // until `ab_solenoid_free`.
    unsafe { h.as_ref() }.ok_or_else(|| Error::InvalidInput("solenoid handle is null".into()))
}

fn new_handle(spec: Result<SolenoidSpec, Error>, out: *mut *mut AbSolenoid) -> AbStatus {
    guard(out, || Ok(Box::into_raw(Box::new(AbSolenoid { spec: spec? }))))
}

/// Infinite solenoid of radius `radius` and interior field `b0`.
#[no_mangle]
pub extern "C" fn ab_solenoid_new_infinite(radius: f64, b0: f64, out: *mut *mut AbSolenoid) -> AbStatus {
    new_handle(SolenoidSpec::infinite(radius, b0), out)
}

/// Finite solenoid occupying `|z| <= half_length`.
#[no_mangle]
pub extern "C" fn ab_solenoid_new_finite(
    radius: f64,
    b0: f64,
    half_length: f64,
    out: *mut *mut AbSolenoid,
) -> AbStatus {
    new_handle(SolenoidSpec::finite(radius, b0, half_length), out)
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ab_solenoid_free(h: *mut AbSolenoid) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

#[no_mangle]
pub extern "C" fn ab_solenoid_flux(h: *const AbSolenoid, out: *mut f64) -> AbStatus {
    guard(out, || Ok(handle(h)?.spec.flux()))
}

fn gauge_field(spec: &SolenoidSpec, gauge: AbGauge) -> Result<GaugeField, Error> {
    match gauge {
        AbGauge::Symmetric => GaugeField::symmetric(spec),
        AbGauge::Landau2 => GaugeField::landau2(spec),
    }
}

/// Vector potential of an infinite solenoid at `(x, y)`.
#[no_mangle]
pub extern "C" fn ab_potential(h: *const AbSolenoid, gauge: AbGauge, x: f64, y: f64, out: *mut AbVec2) -> AbStatus {
    guard(out, || {
        let a = gauge_field(&handle(h)?.spec, gauge)?.eval(Point2::new(x, y))?;
        Ok(AbVec2 { x: a.x, y: a.y })
    })
}

/// Fields of a finite solenoid at cylindrical `(r, z)`.
#[no_mangle]
pub extern "C" fn ab_finite_field(
    h: *const AbSolenoid,
    r: f64,
    z: f64,
    tol: f64,
    out: *mut AbCylindricalField,
) -> AbStatus {
    guard(out, || {
        let c = finite_cylindrical(&handle(h)?.spec, r, z, tol)?;
        Ok(AbCylindricalField {
            a_phi: c.a_phi,
            b_r: c.b_r,
            b_z: c.b_z,
        })
    })
}

/// `e ∮ A · dx` over a circle traversed `winding` times counterclockwise.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn ab_phase_circle(
    h: *const AbSolenoid,
    gauge: AbGauge,
    cx: f64,
    cy: f64,
    radius: f64,
    winding: u32,
    e: f64,
    tol: f64,
    out: *mut f64,
) -> AbStatus {
    guard(out, || {
        let a = gauge_field(&handle(h)?.spec, gauge)?;
        let p = Path::circle(Point2::new(cx, cy), radius)?.repeat(winding)?;
        ab_phase(&a, &p, e, tol)
    })
}

#[no_mangle]
pub extern "C" fn ab_bessel_j(nu: f64, x: f64, tol: f64, out: *mut f64) -> AbStatus {
    guard(out, || bessel_j(nu, x, tol))
}

/// Exponent of the radial wave function near a finite solenoid.
#[no_mangle]
pub extern "C" fn ab_alpha_exponent(
    h: *const AbSolenoid,
    m: i64,
    r: f64,
    z: f64,
    e: f64,
    tol: f64,
    out: *mut f64,
) -> AbStatus {
    guard(out, || alpha_exponent(m, r, z, &handle(h)?.spec, e, tol))
}

/// Change of mechanical angular momentum of a charge held at `r_e` while the
/// interior field ramps from 0 to the handle's `b0` over `t_f`.
#[no_mangle]
pub extern "C" fn ab_ramp_delta_l_mech(
    h: *const AbSolenoid,
    r_e: f64,
    shape: AbRampShape,
    t_f: f64,
    e: f64,
    out: *mut f64,
) -> AbStatus {
    guard(out, || {
        let spec = handle(h)?.spec;
        let shape = match shape {
            AbRampShape::Smoothstep => RampShape::Smoothstep,
            AbRampShape::Linear => RampShape::Linear,
        };
        let ramp = RampProfile::new(shape, t_f, spec.b0)?;
        let tr = ramp_scenario(r_e, &spec, &ramp, e, 0.0, 8, 1e-10)?;
        Ok(tr.last().l_mech - tr.first().l_mech)
    })
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `len` bytes, into `buf`. Returns the untruncated length plus
/// one, so a zero-length call can size the buffer.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ab_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}
