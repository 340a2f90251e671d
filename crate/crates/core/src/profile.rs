//! Direct integration of the profile equation
//! `f'' = q coth(f) (1 + f'^2)`, `f(0) = a`, `f'(0) = 0`,
//! as an independent check on the height integrals.
//!
//! Only `t >= 0` is integrated; the profile is even in `t`. Integration stops
//! once `f` reaches `f_cap` or the slope reaches [`SLOPE_CAP`], and the
//! half-height is completed with the quadrature remainder `L(a) - λ(a, f(t_stop))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilyParams, ProfilePoint};
use crate::ode::{self, AbortReason, Step, Tolerances};
use crate::quadrature::{half_height, lambda_height, QuadratureSettings};

/// Necks below this are rejected: `coth a` makes the initial curvature
/// too large for the explicit integrator.
pub const MIN_NECK: f64 = 1e-4;

/// Past this slope the remaining height is below `1 / (q SLOPE_CAP)` and the
/// step size approaches the rounding of `t` for large `q`.
pub const SLOPE_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OdeSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub f_cap: f64,
    pub max_steps: usize,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            f_cap: 30.0,
            max_steps: 200_000,
        }
    }
}

impl OdeSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::domain("ODE tolerances must be positive"));
        }
        if !(self.f_cap > 0.0) || self.f_cap > crate::quadrature::RADIUS_CAP {
            return Err(Error::domain(format!(
                "f_cap = {} must lie in (0, {}]",
                self.f_cap,
                crate::quadrature::RADIUS_CAP
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::domain("max_steps must be positive"));
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_steps: self.max_steps,
        }
    }
}

/// Sampled upper half (`t >= 0`) of the profile of the catenoid with neck `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub family: FamilyParams,
    pub a: f64,
    /// Accepted steps, strictly increasing in `t`, starting at the neck.
    pub samples: Vec<ProfilePoint>,
    pub t_stop: f64,
    /// `t_stop` plus the quadrature remainder; NaN on partial trajectories.
    pub l_estimate: f64,
}

fn profile_rhs(q: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_t, y| [y[1], q / y[0].tanh() * (1.0 + y[1] * y[1])]
}

fn to_point(step: &Step<2>) -> ProfilePoint {
    ProfilePoint {
        t: step.t,
        f: step.y[0],
        f_t: step.y[1],
        f_tt: step.dy[1],
    }
}

fn check_inputs(fp: &FamilyParams, a: f64, settings: &OdeSettings) -> Result<()> {
    fp.require_catenoid("integrate_profile")?;
    settings.validate()?;
    if !(a > 0.0) {
        return Err(Error::domain(format!("neck radius a = {a} must be positive")));
    }
    if a < MIN_NECK {
        return Err(Error::domain(format!(
            "neck radius a = {a} is below the supported minimum {MIN_NECK}"
        )));
    }
    if a >= settings.f_cap {
        return Err(Error::domain(format!(
            "neck radius a = {a} must be below f_cap = {}",
            settings.f_cap
        )));
    }
    Ok(())
}

fn partial_curve(fp: &FamilyParams, a: f64, steps: &[Step<2>]) -> ProfileCurve {
    let samples: Vec<ProfilePoint> = steps.iter().map(to_point).collect();
    let t_stop = samples.last().map_or(0.0, |p| p.t);
    ProfileCurve {
        family: *fp,
        a,
        samples,
        t_stop,
        l_estimate: f64::NAN,
    }
}

fn abort_error(fp: &FamilyParams, a: f64, aborted: ode::Aborted<2>) -> Error {
    let partial = partial_curve(fp, a, &aborted.partial.steps);
    match aborted.error {
        AbortReason::StepUnderflow { t } | AbortReason::NonFinite { t } => Error::StepUnderflow {
            t,
            f: partial.samples.last().map_or(a, |p| p.f),
            partial: Box::new(partial),
        },
        AbortReason::StepLimit { t, max_steps } => Error::StepLimit { max_steps, t },
    }
}

/// Integrates the profile from the neck until `f >= f_cap` or `f_t >= SLOPE_CAP`.
pub fn integrate_profile(
    fp: &FamilyParams,
    a: f64,
    ode_settings: &OdeSettings,
    quad: &QuadratureSettings,
) -> Result<ProfileCurve> {
    check_inputs(fp, a, ode_settings)?;
    let f_cap = ode_settings.f_cap;
    let traj = ode::integrate(
        profile_rhs(fp.q()),
        0.0,
        [a, 0.0],
        f64::INFINITY,
        &[],
        &ode_settings.tolerances(),
        |s| s.y[0] >= f_cap || s.y[1] >= SLOPE_CAP,
    )
    .map_err(|e| abort_error(fp, a, e))?;
    let mut curve = partial_curve(fp, a, &traj.steps);
    let f_stop = curve.samples.last().map_or(a, |p| p.f);
    let remainder = half_height(fp, a, quad)?.value - lambda_height(fp, a, f_stop, quad)?.value;
    curve.l_estimate = curve.t_stop + remainder;
    Ok(curve)
}

/// Profile points at the given ascending times in `[0, L(a))`, each one an
/// accepted integrator step.
pub fn integrate_profile_at(
    fp: &FamilyParams,
    a: f64,
    times: &[f64],
    ode_settings: &OdeSettings,
) -> Result<Vec<ProfilePoint>> {
    check_inputs(fp, a, ode_settings)?;
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::domain("sample times must be non-negative and strictly increasing"));
    }
    let Some(&t_end) = times.last() else {
        return Ok(Vec::new());
    };
    let traj = ode::integrate(
        profile_rhs(fp.q()),
        0.0,
        [a, 0.0],
        t_end,
        times,
        &ode_settings.tolerances(),
        |_| false,
    )
    .map_err(|e| abort_error(fp, a, e))?;
    if traj.stop_indices.len() != times.len() {
        return Err(Error::domain(format!(
            "profile blew up before t = {t_end}: only {} of {} samples reached",
            traj.stop_indices.len(),
            times.len()
        )));
    }
    Ok(traj.stop_indices.iter().map(|&i| to_point(&traj.steps[i])).collect())
}

/// `sinh^q(f) / sqrt(1 + f_t^2) - sinh^q(a)`; zero on exact solutions.
pub fn first_integral_residual(fp: &FamilyParams, a: f64, p: &ProfilePoint) -> f64 {
    let q = fp.q();
    p.f.sinh().powf(q) / 1f64.hypot(p.f_t) - a.sinh().powf(q)
}

impl ProfileCurve {
    /// Cubic Hermite value at `|t|` for `|t| <= t_stop`; `f_tt` is evaluated
    /// from the profile equation at the interpolated state.
    pub fn interpolate(&self, t: f64) -> Option<ProfilePoint> {
        let t_abs = t.abs();
        if t_abs > self.t_stop || self.samples.is_empty() {
            return None;
        }
        let idx = self.samples.partition_point(|p| p.t < t_abs);
        let q = self.family.q();
        let point = if idx == 0 {
            self.samples[0]
        } else {
            let (p0, p1) = (&self.samples[idx - 1], &self.samples[idx]);
            let s0 = Step { t: p0.t, y: [p0.f, p0.f_t], dy: [p0.f_t, p0.f_tt] };
            let s1 = Step { t: p1.t, y: [p1.f, p1.f_t], dy: [p1.f_t, p1.f_tt] };
            let (y, _) = ode::hermite(&s0, &s1, t_abs);
            ProfilePoint {
                t: t_abs,
                f: y[0],
                f_t: y[1],
                f_tt: q / y[0].tanh() * (1.0 + y[1] * y[1]),
            }
        };
        Some(ProfilePoint {
            t,
            f_t: if t < 0.0 { -point.f_t } else { point.f_t },
            ..point
        })
    }

    /// Both halves of the profile, `t` ascending from `-t_stop` to `t_stop`.
    pub fn mirrored(&self) -> Vec<ProfilePoint> {
        let lower = self.samples.iter().skip(1).rev().map(|p| ProfilePoint {
            t: -p.t,
            f_t: -p.f_t,
            ..*p
        });
        lower.chain(self.samples.iter().copied()).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|p| first_integral_residual(&self.family, self.a, p).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub max_gap: f64,
    pub n_points: usize,
    pub passed: bool,
}

/// Gap allowed between the integrated trajectory and the height integral.
pub const CROSS_VALIDATION_TOLERANCE: f64 = 1e-6;

/// Compares `t` with `λ(a, f(t))` at every accepted step and at the Hermite
/// midpoint of every step interval.
pub fn cross_validate(
    fp: &FamilyParams,
    a: f64,
    ode_settings: &OdeSettings,
    quad: &QuadratureSettings,
) -> Result<CrossValidation> {
    let curve = integrate_profile(fp, a, ode_settings, quad)?;
    let mut probes: Vec<ProfilePoint> = Vec::with_capacity(2 * curve.samples.len());
    for w in curve.samples.windows(2) {
        probes.push(w[0]);
        if let Some(mid) = curve.interpolate(0.5 * (w[0].t + w[1].t)) {
            probes.push(mid);
        }
    }
    probes.extend(curve.samples.last().copied());
    let mut max_gap: f64 = 0.0;
    for p in &probes {
        let rho = p.f.max(a);
        let t = lambda_height(fp, a, rho, quad)?.value;
        max_gap = max_gap.max((t - p.t).abs());
    }
    Ok(CrossValidation {
        max_gap,
        n_points: probes.len(),
        passed: max_gap < CROSS_VALIDATION_TOLERANCE,
    })
}
