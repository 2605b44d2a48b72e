//! C ABI over the `involutions` crate.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! an [`InvStatus`]; on failure a message is kept per thread and can be read
//! with [`inv_last_error`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use involutions::construct::from_even_function;
use involutions::fde::closed_form;
use involutions::involution::{catalog, fixed_point, verify_involution};
use involutions::isochrony::{period, potential_from_involution, Potential};
use involutions::{presets, Error, Involution, Tolerance};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvStatus {
    InvOk = 0,
    InvNullPointer = 1,
    InvInvalidArgument = 2,
    InvUnknownName = 3,
    InvOutsideDomain = 4,
    InvNumericalFailure = 5,
    InvVerificationFailed = 6,
    InvPanic = 7,
}

/// An involution `h` of an open interval.
pub struct InvInvolution {
    inner: Involution,
}

/// An isochronous potential built from an involution.
pub struct InvPotential {
    inner: Potential,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> InvStatus {
    match e {
        Error::InvalidParameter(_) | Error::InvalidInterval { .. } => InvStatus::InvInvalidArgument,
        Error::UnknownName(_) => InvStatus::InvUnknownName,
        Error::OutsideDomain { .. } | Error::EnergyTooLarge { .. } => InvStatus::InvOutsideDomain,
        Error::Verification(_) | Error::NotSelfMap { .. } => InvStatus::InvVerificationFailed,
        _ => InvStatus::InvNumericalFailure,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> InvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InvStatus::InvOk,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            InvStatus::InvNullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            InvStatus::InvPanic
        }
    }
}

unsafe fn name_arg<'a>(name: *const c_char) -> Result<&'a str, Fail> {
    if name.is_null() {
        return Err(Fail::Null("name"));
    }
    CStr::from_ptr(name)
        .to_str()
        .map_err(|_| Fail::Lib(Error::InvalidParameter("name is not UTF-8".into())))
}

unsafe fn params_arg<'a>(params: *const f64, n: usize) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if params.is_null() {
        return Err(Fail::Null("params"));
    }
    Ok(std::slice::from_raw_parts(params, n))
}

unsafe fn out_arg<'a, T>(out: *mut T) -> Result<&'a mut T, Fail> {
    out.as_mut().ok_or(Fail::Null("output"))
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Fail> {
    h.as_ref().ok_or(Fail::Null("handle"))
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn inv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a catalog involution, e.g. `"rational"` with one parameter.
///
/// # Safety
/// `name` must be a NUL-terminated string, `params` must point to `n_params`
/// doubles (or be null when `n_params` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_catalog_new(
    name: *const c_char,
    params: *const f64,
    n_params: usize,
    out: *mut *mut InvInvolution,
) -> InvStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let h = catalog(name_arg(name)?, params_arg(params, n_params)?)?;
        *out = Box::into_raw(Box::new(InvInvolution { inner: h }));
        Ok(())
    })
}

/// Builds the involution of a named even function, e.g. `"y2_over_8"`.
///
/// # Safety
/// Same contract as [`inv_catalog_new`].
#[no_mangle]
pub unsafe extern "C" fn inv_from_even_preset(
    name: *const c_char,
    params: *const f64,
    n_params: usize,
    out: *mut *mut InvInvolution,
) -> InvStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let p = presets::even(name_arg(name)?, params_arg(params, n_params)?)?;
        let c = from_even_function(&p)?;
        *out = Box::into_raw(Box::new(InvInvolution { inner: c.h }));
        Ok(())
    })
}

/// Releases an involution; null is ignored.
///
/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn inv_involution_free(h: *mut InvInvolution) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `h(x)`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn inv_involution_eval(h: *const InvInvolution, x: f64, out: *mut f64) -> InvStatus {
    guard(|| {
        let v = handle(h)?.inner.eval(x)?;
        *out_arg(out)? = v;
        Ok(())
    })
}

/// Endpoints of the domain; infinite ends are returned as ±infinity.
///
/// # Safety
/// `h` must be a live handle and `lo`, `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn inv_involution_domain(h: *const InvInvolution, lo: *mut f64, hi: *mut f64) -> InvStatus {
    guard(|| {
        let d = handle(h)?.inner.domain();
        *out_arg(lo)? = d.lo();
        *out_arg(hi)? = d.hi();
        Ok(())
    })
}

/// Checks `h∘h = id`, strict decrease and `h(0) = 0` on `samples` points
/// with absolute and relative tolerance `tol`. `passed` receives 1 or 0.
///
/// # Safety
/// `h` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn inv_involution_verify(
    h: *const InvInvolution,
    samples: usize,
    tol: f64,
    max_residual: *mut f64,
    passed: *mut i32,
) -> InvStatus {
    guard(|| {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")).into());
        }
        let h = &handle(h)?.inner;
        let r = verify_involution(h.function(), h.domain(), samples, Tolerance::new(tol, tol))?;
        *out_arg(max_residual)? = r.max_involution_residual;
        *out_arg(passed)? = r.passed as i32;
        Ok(())
    })
}

/// The unique fixed point, found by bracketing `x − h(x)`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn inv_involution_fixed_point(h: *const InvInvolution, tol: f64, out: *mut f64) -> InvStatus {
    guard(|| {
        let h = &handle(h)?.inner;
        *out_arg(out)? = fixed_point(h.function(), h.domain(), tol)?;
        Ok(())
    })
}

/// `V(x) = ω²/8·(x − h(x))²`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn inv_potential_new(
    h: *const InvInvolution,
    omega: f64,
    out: *mut *mut InvPotential,
) -> InvStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let p = potential_from_involution(&handle(h)?.inner, omega)?;
        *out = Box::into_raw(Box::new(InvPotential { inner: p }));
        Ok(())
    })
}

/// Releases a potential; null is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn inv_potential_free(p: *mut InvPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `V(x)`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn inv_potential_eval(p: *const InvPotential, x: f64, out: *mut f64) -> InvStatus {
    guard(|| {
        let v = handle(p)?.inner.v().eval(x)?;
        *out_arg(out)? = v;
        Ok(())
    })
}

/// Period of the orbit with energy `energy`, by quadrature.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn inv_potential_period(p: *const InvPotential, energy: f64, out: *mut f64) -> InvStatus {
    guard(|| {
        let t = period(&handle(p)?.inner, energy)?;
        *out_arg(out)? = t;
        Ok(())
    })
}

/// Closed-form solution of `y'(t) = a·y(−t/(1+t))`, `y(0) = y0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_fde_closed_form(a: f64, y0: f64, t: f64, out: *mut f64) -> InvStatus {
    guard(|| {
        let v = closed_form(a, y0, t)?;
        *out_arg(out)? = v;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::UnknownName("x".into())), InvStatus::InvUnknownName);
        assert_eq!(status_of(&Error::Quadrature(1.0)), InvStatus::InvNumericalFailure);
        assert_eq!(
            status_of(&Error::Verification("x".into())),
            InvStatus::InvVerificationFailed
        );
    }

    #[test]
    fn panics_become_status() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, InvStatus::InvPanic);
        let msg = unsafe { CStr::from_ptr(inv_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }
}
