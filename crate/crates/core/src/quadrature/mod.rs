//! Height integrals of the profile curve.
//!
//! Every integral here has the form `∫_1^V (v^{2q} - 1)^{-1/2} K(v) dv` with a
//! smooth kernel `K`. The substitution `v = exp(s²)` turns the inverse square
//! root at `v = 1` into a bounded analytic factor and makes the integrand
//! decay like `exp(-q s²)`, so an unbounded upper limit becomes a short finite
//! interval in `s`. The integral to infinity is truncated at `V_max` with the
//! bound `(v^{2q} - 1)^{-1/2} ≤ √2 v^{-q}` (valid for `v^{2q} ≥ 2`) added to
//! the reported error.

pub mod gauss_kronrod;

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::FamilyParams;

pub use gauss_kronrod::Estimate;

/// Largest neck radius or radius accepted by the height integrals.
pub const RADIUS_CAP: f64 = 100.0;

/// `(sinh ρ / sinh a)^{2q} - 1` below this makes the derivative boundary
/// terms numerically meaningless.
pub const BOUNDARY_GAP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Upper cut `V_max` for integrals to infinity; `None` picks the smallest
    /// cut whose tail bound is below `abs_tol / 2`.
    pub tail_cut: Option<f64>,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 200,
            tail_cut: None,
        }
    }
}

impl QuadratureSettings {
    /// Tight settings used by oracles and finite-difference checks.
    pub fn tight() -> Self {
        QuadratureSettings {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_subdivisions: 400,
            tail_cut: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        if let Some(v) = self.tail_cut {
            if !(v > 1.0) {
                return Err(Error::domain(format!("tail cut V_max = {v} must exceed 1")));
            }
        }
        Ok(())
    }
}

/// An integral value with its total error estimate (quadrature plus tail).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    pub value: f64,
    pub error_estimate: f64,
}

/// `ln sinh x` for `x > 0` without overflow.
pub(crate) fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - std::f64::consts::LN_2
}

fn check_radius(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) {
        return Err(Error::domain(format!("{name} = {value} must be positive")));
    }
    if value > RADIUS_CAP {
        return Err(Error::OutOfRange {
            name,
            value,
            cap: RADIUS_CAP,
        });
    }
    Ok(())
}

/// `s`-space integrand for the kernel `k`: with `v = exp(s²)`,
/// `dv = 2 s v ds` and the singular factor becomes `2 s v / sqrt(exp(2 q s²) - 1)`.
fn transformed<K: Fn(f64) -> f64>(q: f64, kernel: K) -> impl Fn(f64) -> f64 {
    move |s: f64| {
        let s2 = s * s;
        if s2 < 1e-300 {
            return (2.0 / q).sqrt() * kernel(1.0);
        }
        let v = s2.exp();
        2.0 * s * v * kernel(v) / (2.0 * q * s2).exp_m1().sqrt()
    }
}

fn integrate_s<K: Fn(f64) -> f64>(
    q: f64,
    kernel: K,
    s_upper: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    gauss_kronrod::integrate(
        transformed(q, kernel),
        0.0,
        s_upper,
        settings.rel_tol,
        settings.abs_tol,
        settings.max_subdivisions,
    )
}

/// `ln V_max` for the tail cut, honouring an explicit override.
fn ln_tail_cut(q: f64, settings: &QuadratureSettings) -> f64 {
    let minimal = std::f64::consts::LN_2 / (2.0 * q);
    match settings.tail_cut {
        Some(v) => v.ln().max(minimal),
        None => {
            // sqrt(2) V^{-q} / q < abs_tol / 2
            let needed = (2.0 * SQRT_2 / (q * settings.abs_tol)).ln() / q;
            needed.max(minimal) * (1.0 + 1e-12)
        }
    }
}

/// Bound on `∫_V^∞ (v^{2q}-1)^{-1/2} v^{-1-extra} dv`, used for kernels
/// bounded by `C v^{-1-extra}`.
fn tail_bound(q: f64, ln_v: f64, extra: f64) -> f64 {
    SQRT_2 * (-(q + extra) * ln_v).exp() / (q + extra)
}

fn height_kernel(sinh_a: f64) -> impl Fn(f64) -> f64 {
    move |v: f64| sinh_a / 1f64.hypot(v * sinh_a)
}

fn derivative_kernel(a: f64) -> impl Fn(f64) -> f64 {
    let (sh, ch) = (a.sinh(), a.cosh());
    move |v: f64| {
        let w = 1.0 / 1f64.hypot(v * sh);
        ch * w * w * w
    }
}

fn second_derivative_kernel(a: f64) -> impl Fn(f64) -> f64 {
    let (sh, ch) = (a.sinh(), a.cosh());
    let c = 1.0 + 2.0 * ch * ch;
    move |v: f64| {
        let w = 1.0 / 1f64.hypot(v * sh);
        let vw2 = (v * w) * (v * w);
        // (1 + v² sinh² a)^{-5/2} (1 - v² - 2 v² cosh² a)
        sh * w * w * w * (w * w - vw2 * c)
    }
}

fn into_height(est: Estimate, tail: f64) -> HeightValue {
    HeightValue {
        value: est.value,
        error_estimate: est.error + tail,
    }
}

/// Height `λ(a, ρ)` at which the catenoid with neck `a` reaches radius `ρ`.
pub fn lambda_height(
    fp: &FamilyParams,
    a: f64,
    rho: f64,
    settings: &QuadratureSettings,
) -> Result<HeightValue> {
    fp.require_catenoid("lambda_height")?;
    settings.validate()?;
    check_radius("a", a)?;
    check_radius("rho", rho)?;
    if rho < a {
        return Err(Error::domain(format!("rho = {rho} is below the neck radius a = {a}")));
    }
    if rho == a {
        return Ok(HeightValue {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let ln_v = (ln_sinh(rho) - ln_sinh(a)).max(0.0);
    lambda_in_s(fp, a, ln_v.sqrt(), settings)
}

/// `λ` parametrised by `s = sqrt(ln(sinh ρ / sinh a))`; smooth in `s`, which
/// makes it the natural unknown for root-finding.
pub(crate) fn lambda_in_s(
    fp: &FamilyParams,
    a: f64,
    s_upper: f64,
    settings: &QuadratureSettings,
) -> Result<HeightValue> {
    let est = integrate_s(fp.q(), height_kernel(a.sinh()), s_upper, settings)?;
    Ok(into_height(est, 0.0))
}

/// Radius reached at parameter `s`, the inverse of the map used by
/// [`lambda_in_s`].
pub(crate) fn radius_from_s(a: f64, s: f64) -> f64 {
    // sinh ρ = sinh a · exp(s²)
    (ln_sinh(a) + s * s).exp().asinh()
}

/// `s` at which [`radius_from_s`] reaches the cap.
pub(crate) fn s_at_radius(a: f64, rho: f64) -> f64 {
    (ln_sinh(rho) - ln_sinh(a)).max(0.0).sqrt()
}

/// `∫_1^V (v^{2q} - 1)^{-1/2} K(v) dv` for a kernel with `|K(v)| ≤ C v^{-1-extra}`
/// (`C = kernel_bound`). `ln_upper = None` integrates to infinity and adds the
/// tail bound to the error estimate.
pub fn singular_integral<K: Fn(f64) -> f64>(
    fp: &FamilyParams,
    kernel: K,
    ln_upper: Option<f64>,
    kernel_bound: f64,
    extra: f64,
    settings: &QuadratureSettings,
) -> Result<HeightValue> {
    fp.require_catenoid("singular_integral")?;
    settings.validate()?;
    let q = fp.q();
    match ln_upper {
        Some(ln_v) => {
            if !(ln_v >= 0.0) {
                return Err(Error::domain(format!("upper limit exp({ln_v}) is below 1")));
            }
            Ok(into_height(integrate_s(q, kernel, ln_v.sqrt(), settings)?, 0.0))
        }
        None => {
            let ln_v = ln_tail_cut(q, settings);
            let est = integrate_s(q, kernel, ln_v.sqrt(), settings)?;
            Ok(into_height(est, kernel_bound * tail_bound(q, ln_v, extra)))
        }
    }
}

/// Half-height `L(a) = λ(a, ∞)`.
pub fn half_height(fp: &FamilyParams, a: f64, settings: &QuadratureSettings) -> Result<HeightValue> {
    fp.require_catenoid("half_height")?;
    settings.validate()?;
    check_radius("a", a)?;
    let q = fp.q();
    let ln_v = ln_tail_cut(q, settings);
    let est = integrate_s(q, height_kernel(a.sinh()), ln_v.sqrt(), settings)?;
    Ok(into_height(est, tail_bound(q, ln_v, 0.0)))
}

/// The truncation bound used by [`half_height`] for the given settings.
pub fn half_height_tail_bound(fp: &FamilyParams, settings: &QuadratureSettings) -> Result<f64> {
    fp.require_catenoid("half_height_tail_bound")?;
    let q = fp.q();
    Ok(tail_bound(q, ln_tail_cut(q, settings), 0.0))
}

/// Limit of `L(a)` as `a → ∞`: `π (r + 1) / (2 (n - r - 1))`.
pub fn height_limit(fp: &FamilyParams) -> Result<f64> {
    fp.require_catenoid("height_limit")?;
    let (num, den) = fp.q_ratio();
    Ok(PI * den as f64 / (2.0 * num as f64))
}

/// `dL/da = cosh a ∫_1^∞ (v^{2q}-1)^{-1/2} (1 + v² sinh² a)^{-3/2} dv`.
pub fn half_height_derivative(
    fp: &FamilyParams,
    a: f64,
    settings: &QuadratureSettings,
) -> Result<HeightValue> {
    fp.require_catenoid("half_height_derivative")?;
    settings.validate()?;
    check_radius("a", a)?;
    let q = fp.q();
    let ln_v = ln_tail_cut(q, settings);
    let est = integrate_s(q, derivative_kernel(a), ln_v.sqrt(), settings)?;
    // kernel ≤ cosh a / (sinh a)^3 · v^{-3}
    let sh = a.sinh();
    let tail = a.cosh() / (sh * sh * sh) * tail_bound(q, ln_v, 2.0);
    Ok(into_height(est, tail))
}

struct Boundary {
    ln_v: f64,
    /// `(sinh ρ / sinh a)^{2q} - 1`
    gap: f64,
}

fn boundary(fp: &FamilyParams, a: f64, rho: f64) -> Result<Boundary> {
    check_radius("a", a)?;
    check_radius("rho", rho)?;
    if !(rho > a) {
        return Err(Error::domain(format!("rho = {rho} must exceed a = {a}")));
    }
    let ln_v = ln_sinh(rho) - ln_sinh(a);
    let exponent = 2.0 * fp.q() * ln_v;
    if exponent > 700.0 {
        return Err(Error::OutOfRange {
            name: "(sinh rho / sinh a)^(2q)",
            value: exponent.exp(),
            cap: 700f64.exp(),
        });
    }
    let gap = exponent.exp_m1();
    if gap < BOUNDARY_GAP {
        return Err(Error::domain(format!(
            "rho = {rho} is too close to a = {a}: boundary term is singular"
        )));
    }
    Ok(Boundary { ln_v, gap })
}

/// First derivative of `λ(a, ρ)` with respect to the neck radius `a`.
pub fn lambda_a(fp: &FamilyParams, a: f64, rho: f64, settings: &QuadratureSettings) -> Result<f64> {
    fp.require_catenoid("lambda_a")?;
    settings.validate()?;
    let b = boundary(fp, a, rho)?;
    let edge = -rho.tanh() / a.tanh() / b.gap.sqrt();
    let est = integrate_s(fp.q(), derivative_kernel(a), b.ln_v.sqrt(), settings)?;
    Ok(edge + est.value)
}

/// Second derivative of `λ(a, ρ)` with respect to `a`.
pub fn lambda_aa(fp: &FamilyParams, a: f64, rho: f64, settings: &QuadratureSettings) -> Result<f64> {
    fp.require_catenoid("lambda_aa")?;
    settings.validate()?;
    let b = boundary(fp, a, rho)?;
    let q = fp.q();
    let (sh, ch) = (a.sinh(), a.cosh());
    let ratio = (ch / rho.cosh()).powi(2);
    let v2q = b.gap + 1.0;
    let bracket = v2q * (1.0 - q * ch * ch - ratio) + (ratio - 1.0);
    let edge = rho.tanh() / (sh * sh) * bracket / (b.gap * b.gap.sqrt());
    let est = integrate_s(q, second_derivative_kernel(a), b.ln_v.sqrt(), settings)?;
    Ok(edge + est.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: i64, r: i64) -> FamilyParams {
        FamilyParams::new(n, r).unwrap()
    }

    /// Direct evaluation of λ in the original variable `u` via the
    /// substitution u = a + w², which removes the inverse square root at u = a.
    fn lambda_direct(q: f64, a: f64, rho: f64) -> f64 {
        let sa = a.sinh().powf(q);
        let g = |w: f64| {
            if w == 0.0 {
                // sinh^{2q}(a + w²) - sinh^{2q}(a) ≈ 2q sinh^{2q} coth(a) w²
                return 2.0 * sa / (2.0 * q * sa * sa / a.tanh()).sqrt();
            }
            let u = a + w * w;
            2.0 * w * sa / (u.sinh().powf(2.0 * q) - sa * sa).sqrt()
        };
        gauss_kronrod::integrate(g, 0.0, (rho - a).sqrt(), 1e-13, 1e-15, 500)
            .unwrap()
            .value
    }

    #[test]
    fn lambda_matches_untransformed_integral() {
        let s = QuadratureSettings::tight();
        for &(n, r) in &[(3, 1), (4, 1), (6, 2), (5, 1)] {
            let fp = fam(n, r);
            for &(a, rho) in &[(0.3, 0.5), (1.0, 2.0), (0.05, 3.0), (2.0, 2.2)] {
                let got = lambda_height(&fp, a, rho, &s).unwrap().value;
                let want = lambda_direct(fp.q(), a, rho);
                assert!((got - want).abs() < 1e-10, "({n},{r}) a={a} rho={rho}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn lambda_zero_at_neck_and_rejects_bad_inputs() {
        let fp = fam(4, 1);
        let s = QuadratureSettings::default();
        assert_eq!(lambda_height(&fp, 0.7, 0.7, &s).unwrap().value, 0.0);
        assert!(lambda_height(&fp, 0.7, 0.6, &s).is_err());
        assert!(matches!(
            lambda_height(&fam(3, 2), 0.7, 1.0, &s),
            Err(Error::CylinderRegime { .. })
        ));
        assert!(matches!(
            lambda_height(&fp, 0.7, 150.0, &s),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(half_height(&fp, 101.0, &s), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn height_limits() {
        assert!((height_limit(&fam(4, 1)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((height_limit(&fam(3, 1)).unwrap() - PI).abs() < 1e-15);
        assert!((height_limit(&fam(5, 1)).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!(height_limit(&fam(3, 2)).is_err());
    }

    #[test]
    fn large_neck_reaches_limit() {
        let s = QuadratureSettings::default();
        for &(n, r) in &[(4, 1), (3, 1), (5, 1)] {
            let fp = fam(n, r);
            let l = half_height(&fp, 10.0, &s).unwrap();
            assert!((l.value - height_limit(&fp).unwrap()).abs() < 1e-3);
        }
    }

    #[test]
    fn half_height_vanishes_at_small_neck() {
        let fp = fam(4, 1);
        let s = QuadratureSettings::default();
        let small = half_height(&fp, 1e-6, &s).unwrap().value;
        let smaller = half_height(&fp, 1e-8, &s).unwrap().value;
        assert!(smaller < small && small < 1e-4);
    }

    #[test]
    fn error_estimate_within_tolerance() {
        let s = QuadratureSettings::default();
        for &(n, r) in &[(3, 1), (4, 1), (9, 1)] {
            let fp = fam(n, r);
            for &a in &[0.05, 0.5, 5.0] {
                let h = half_height(&fp, a, &s).unwrap();
                assert!(h.error_estimate <= s.rel_tol * h.value.abs() + s.abs_tol);
            }
        }
    }

    #[test]
    fn tail_bound_covers_truncation() {
        // Integral to a much larger cut minus the default one must stay
        // below the default bound.
        for &(n, r) in &[(3, 1), (4, 1), (6, 1)] {
            let fp = fam(n, r);
            let base = QuadratureSettings::default();
            let far = QuadratureSettings {
                tail_cut: Some(1e200),
                abs_tol: 1e-16,
                rel_tol: 1e-13,
                max_subdivisions: 400,
            };
            for &a in &[0.1, 1.0, 4.0] {
                let near = half_height(&fp, a, &base).unwrap().value;
                let full = half_height(&fp, a, &far).unwrap();
                let remainder = full.value - near;
                let bound = half_height_tail_bound(&fp, &base).unwrap();
                assert!(remainder <= bound + 1e-14, "({n},{r}) a={a}: {remainder} > {bound}");
            }
        }
    }

    #[test]
    fn settings_validation() {
        let fp = fam(4, 1);
        let bad = QuadratureSettings {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(half_height(&fp, 1.0, &bad).is_err());
        let bad = QuadratureSettings {
            max_subdivisions: 0,
            ..Default::default()
        };
        assert!(half_height(&fp, 1.0, &bad).is_err());
    }

    #[test]
    fn derivative_boundary_guard() {
        let fp = fam(4, 1);
        let s = QuadratureSettings::default();
        assert!(lambda_a(&fp, 1.0, 1.0, &s).is_err());
        assert!(lambda_aa(&fp, 1.0, 1.0 + 1e-13, &s).is_err());
        assert!(lambda_a(&fp, 1.0, 1.01, &s).is_ok());
    }

    #[test]
    fn radius_s_round_trip() {
        for &(a, rho) in &[(0.1, 0.2), (1.0, 30.0), (2.0, 99.0)] {
            let s = s_at_radius(a, rho);
            assert!((radius_from_s(a, s) - rho).abs() < 1e-12 * rho);
        }
    }
}
