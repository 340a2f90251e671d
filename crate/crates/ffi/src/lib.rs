//! C ABI over `rcatenoid`.
//!
//! Every fallible function returns an [`RcStatus`]; results go through out
//! pointers, which are left untouched on failure. The message of the last
//! failure on the calling thread is available from [`rc_last_error`].
//! Families and sampled profiles are opaque handles released with their
//! `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use rcatenoid::analysis::{
    alpha_of, count_bvp_scan, count_bvp_solutions, envelope_min, height_threshold_t,
    neck_threshold_m, phi, profile_intersections,
};
use rcatenoid::curvature::{mean_curvatures, principal_curvatures};
use rcatenoid::export::{sample_profile, ProfileSamples};
use rcatenoid::profile::OdeSettings;
use rcatenoid::quadrature::{half_height, half_height_derivative, height_limit, lambda_height};
use rcatenoid::{Error, FamilyParams, ProfilePoint, QuadratureSettings, Regime};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    CylinderRegime = 3,
    NotApplicable = 4,
    OutOfRange = 5,
    QuadratureNonConvergence = 6,
    NoBracket = 7,
    IterationLimit = 8,
    HeightNotReached = 9,
    UnvalidatedRegime = 10,
    StepUnderflow = 11,
    StepLimit = 12,
    Io = 13,
    Parse = 14,
    BufferTooSmall = 15,
    IndexOutOfRange = 16,
    Panic = 17,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcRegime {
    Cylinder = 0,
    QBelowOne = 1,
    QAtLeastOne = 2,
}

/// Rotational family `(n, r)` with its numerical settings.
pub struct RcFamily {
    params: FamilyParams,
    quad: QuadratureSettings,
    ode: OdeSettings,
}

/// Upper half of a sampled profile curve.
pub struct RcProfile {
    samples: ProfileSamples,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcValue {
    pub value: f64,
    pub error_estimate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcProfilePoint {
    pub t: f64,
    pub f: f64,
    pub f_t: f64,
    pub f_tt: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcEnvelopePoint {
    pub t: f64,
    pub m: f64,
    pub a_star: f64,
    pub validated: bool,
}

/// Roots beyond the second are counted but not stored; absent roots are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcBvpResult {
    pub count: usize,
    pub root_lo: f64,
    pub root_hi: f64,
    pub m0: f64,
    pub a0: f64,
    pub validated: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcCrossing {
    pub rho: f64,
    pub t: f64,
    pub residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> RcStatus {
    match e {
        Error::Domain(_) => RcStatus::Domain,
        Error::CylinderRegime { .. } => RcStatus::CylinderRegime,
        Error::NotApplicable { .. } => RcStatus::NotApplicable,
        Error::OutOfRange { .. } => RcStatus::OutOfRange,
        Error::QuadratureNonConvergence { .. } => RcStatus::QuadratureNonConvergence,
        Error::NoBracket { .. } => RcStatus::NoBracket,
        Error::IterationLimit(_) => RcStatus::IterationLimit,
        Error::HeightNotReached { .. } => RcStatus::HeightNotReached,
        Error::UnvalidatedRegime { .. } => RcStatus::UnvalidatedRegime,
        Error::StepUnderflow { .. } => RcStatus::StepUnderflow,
        Error::StepLimit { .. } => RcStatus::StepLimit,
        Error::Io { .. } => RcStatus::Io,
        Error::Parse(_) => RcStatus::Parse,
    }
}

enum Failure {
    Status(RcStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(RcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Failure> + UnwindSafe>(body: F) -> RcStatus {
    let (status, msg) = match catch_unwind(body) {
        Ok(Ok(())) => return RcStatus::Ok,
        Ok(Err(Failure::Lib(e))) => (status_of(&e), e.to_string()),
        Ok(Err(Failure::Status(s, msg))) => (s, msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            (RcStatus::Panic, format!("panic: {msg}"))
        }
    };
    set_error(msg);
    status
}

unsafe fn family<'a>(fam: *const RcFamily) -> Result<&'a RcFamily, Failure> {
    fam.as_ref().ok_or_else(|| null("family"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
#[no_mangle]
pub unsafe extern "C" fn rc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates the family `(n, r)` with default tolerances.
#[no_mangle]
pub unsafe extern "C" fn rc_family_new(n: i64, r: i64, out: *mut *mut RcFamily) -> RcStatus {
    guard(|| {
        let params = FamilyParams::new(n, r)?;
        let fam = Box::new(RcFamily {
            params,
            quad: QuadratureSettings::default(),
            ode: OdeSettings::default(),
        });
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(Box::into_raw(fam));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rc_family_free(fam: *mut RcFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// Replaces the quadrature and ODE tolerances; the handle is unchanged on error.
#[no_mangle]
pub unsafe extern "C" fn rc_family_set_tolerances(
    fam: *mut RcFamily,
    quad_rel_tol: f64,
    quad_abs_tol: f64,
    ode_rel_tol: f64,
    ode_abs_tol: f64,
) -> RcStatus {
    guard(|| {
        let fam = fam.as_mut().ok_or_else(|| null("family"))?;
        let quad = QuadratureSettings {
            rel_tol: quad_rel_tol,
            abs_tol: quad_abs_tol,
            ..fam.quad
        };
        let ode = OdeSettings {
            rel_tol: ode_rel_tol,
            abs_tol: ode_abs_tol,
            ..fam.ode
        };
        quad.validate()?;
        ode.validate()?;
        fam.quad = quad;
        fam.ode = ode;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rc_family_q(fam: *const RcFamily, out: *mut f64) -> RcStatus {
    guard(|| write(out, family(fam)?.params.q()))
}

#[no_mangle]
pub unsafe extern "C" fn rc_family_regime(fam: *const RcFamily, out: *mut RcRegime) -> RcStatus {
    guard(|| {
        let regime = match family(fam)?.params.regime() {
            Regime::Cylinder => RcRegime::Cylinder,
            Regime::QBelowOne => RcRegime::QBelowOne,
            Regime::QAtLeastOne => RcRegime::QAtLeastOne,
        };
        write(out, regime)
    })
}

/// Half-height `L(a)`.
#[no_mangle]
pub unsafe extern "C" fn rc_half_height(fam: *const RcFamily, a: f64, out: *mut RcValue) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        let v = half_height(&fam.params, a, &fam.quad)?;
        write(out, RcValue { value: v.value, error_estimate: v.error_estimate })
    })
}

/// `dL/da`.
#[no_mangle]
pub unsafe extern "C" fn rc_half_height_derivative(fam: *const RcFamily, a: f64, out: *mut RcValue) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        let v = half_height_derivative(&fam.params, a, &fam.quad)?;
        write(out, RcValue { value: v.value, error_estimate: v.error_estimate })
    })
}

/// Height `λ(a, ρ)` at which the catenoid with neck `a` reaches radius `ρ`.
#[no_mangle]
pub unsafe extern "C" fn rc_lambda(fam: *const RcFamily, a: f64, rho: f64, out: *mut RcValue) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        let v = lambda_height(&fam.params, a, rho, &fam.quad)?;
        write(out, RcValue { value: v.value, error_estimate: v.error_estimate })
    })
}

/// Limit of `L(a)` as `a` grows.
#[no_mangle]
pub unsafe extern "C" fn rc_height_limit(fam: *const RcFamily, out: *mut f64) -> RcStatus {
    guard(|| write(out, height_limit(&family(fam)?.params)?))
}

/// Radius `φ^{t0}(a)` of the catenoid with neck `a` at height `t0`.
#[no_mangle]
pub unsafe extern "C" fn rc_phi(fam: *const RcFamily, t0: f64, a: f64, out: *mut f64) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        write(out, phi(&fam.params, t0, a, &fam.quad)?)
    })
}

/// Neck whose half-height equals `t0`.
#[no_mangle]
pub unsafe extern "C" fn rc_alpha(fam: *const RcFamily, t0: f64, out: *mut f64) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        write(out, alpha_of(&fam.params, t0, &fam.quad)?)
    })
}

/// Neck threshold `M`, for `0 < q < 1` only.
#[no_mangle]
pub unsafe extern "C" fn rc_neck_threshold(fam: *const RcFamily, out: *mut f64) -> RcStatus {
    guard(|| write(out, neck_threshold_m(&family(fam)?.params)?))
}

/// Height threshold `T`; for `q >= 1` it is the height limit.
#[no_mangle]
pub unsafe extern "C" fn rc_height_threshold(fam: *const RcFamily, out: *mut f64) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        write(out, height_threshold_t(&fam.params, &fam.quad)?)
    })
}

/// Minimal radius `m(t0)` over the family and its minimiser.
#[no_mangle]
pub unsafe extern "C" fn rc_envelope_min(fam: *const RcFamily, t0: f64, out: *mut RcEnvelopePoint) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        let p = envelope_min(&fam.params, t0, &fam.quad)?;
        write(out, RcEnvelopePoint { t: p.t, m: p.m, a_star: p.a_star, validated: p.validated })
    })
}

/// Catenoids through the circles of radius `radius` at heights `±t0`.
/// Outside the validated range this fails with `UnvalidatedRegime` unless
/// `allow_unvalidated` is set, in which case a grid scan answers.
#[no_mangle]
pub unsafe extern "C" fn rc_count_bvp(
    fam: *const RcFamily,
    t0: f64,
    radius: f64,
    allow_unvalidated: bool,
    out: *mut RcBvpResult,
) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        let res = match count_bvp_solutions(&fam.params, t0, radius, &fam.quad) {
            Err(Error::UnvalidatedRegime { .. }) if allow_unvalidated => {
                count_bvp_scan(&fam.params, t0, radius, &fam.quad)?
            }
            other => other?,
        };
        let root = |i: usize| res.roots.get(i).copied().unwrap_or(f64::NAN);
        write(
            out,
            RcBvpResult {
                count: res.count,
                root_lo: root(0),
                root_hi: root(1),
                m0: res.m0,
                a0: res.a0,
                validated: res.validated,
            },
        )
    })
}

/// Crossings in `t > 0` of the profiles with necks `a` and `b`. Writes up to
/// `cap` crossings and stores the total number in `count`; fails with
/// `BufferTooSmall` (after filling the buffer) when `cap` is short.
#[no_mangle]
pub unsafe extern "C" fn rc_intersections(
    fam: *const RcFamily,
    a: f64,
    b: f64,
    buf: *mut RcCrossing,
    cap: usize,
    count: *mut usize,
) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        let crossings = profile_intersections(&fam.params, a, b, &fam.quad)?;
        write(count, crossings.len())?;
        if cap > 0 && buf.is_null() {
            return Err(null("crossing buffer"));
        }
        for (i, c) in crossings.iter().take(cap).enumerate() {
            buf.add(i).write(RcCrossing { rho: c.rho, t: c.t, residual: c.residual });
        }
        if crossings.len() > cap {
            return Err(Failure::Status(
                RcStatus::BufferTooSmall,
                format!("{} crossings, buffer holds {cap}", crossings.len()),
            ));
        }
        Ok(())
    })
}

/// Samples the upper half of the profile with neck `a` at `n_t + 1` points.
#[no_mangle]
pub unsafe extern "C" fn rc_profile_sample(
    fam: *const RcFamily,
    a: f64,
    n_t: usize,
    out: *mut *mut RcProfile,
) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let samples = sample_profile(&fam.params, a, n_t, &fam.ode, &fam.quad)?;
        out.write(Box::into_raw(Box::new(RcProfile { samples })));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rc_profile_free(profile: *mut RcProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

#[no_mangle]
pub unsafe extern "C" fn rc_profile_len(profile: *const RcProfile, out: *mut usize) -> RcStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        write(out, p.samples.points.len())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rc_profile_point(
    profile: *const RcProfile,
    index: usize,
    out: *mut RcProfilePoint,
) -> RcStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        let pt = p.samples.points.get(index).ok_or_else(|| {
            Failure::Status(
                RcStatus::IndexOutOfRange,
                format!("index {index} >= {}", p.samples.points.len()),
            )
        })?;
        write(out, RcProfilePoint { t: pt.t, f: pt.f, f_t: pt.f_t, f_tt: pt.f_tt })
    })
}

/// Mean curvatures `H_1 … H_n` at a profile point; `buf` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn rc_mean_curvatures(
    fam: *const RcFamily,
    point: RcProfilePoint,
    buf: *mut f64,
    cap: usize,
) -> RcStatus {
    guard(|| {
        let fam = family(fam)?;
        let n = fam.params.n();
        if buf.is_null() {
            return Err(null("curvature buffer"));
        }
        if cap < n {
            return Err(Failure::Status(RcStatus::BufferTooSmall, format!("need {n} values, buffer holds {cap}")));
        }
        let p = ProfilePoint::new(point.t, point.f, point.f_t, point.f_tt)?;
        let h = mean_curvatures(&principal_curvatures(&fam.params, &p));
        ptr::copy_nonoverlapping(h.as_ptr(), buf, n);
        Ok(())
    })
}
