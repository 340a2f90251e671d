//! Dormand–Prince 5(4) with PI step-size control for first-order systems
//! of fixed dimension.

use crate::error::Error;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

/// An accepted step: time, state and derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

/// Why integration ended without error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The stop predicate fired on the last accepted step.
    Event,
    /// `t_end` was reached.
    End,
}

#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub steps: Vec<Step<N>>,
    /// Indices into `steps` of the requested output times, in order.
    pub stop_indices: Vec<usize>,
    pub termination: Termination,
}

/// Failure with whatever was integrated so far.
#[derive(Debug, Clone)]
pub struct Aborted<const N: usize> {
    pub partial: Trajectory<N>,
    pub error: AbortReason,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbortReason {
    StepUnderflow { t: f64 },
    StepLimit { t: f64, max_steps: usize },
    NonFinite { t: f64 },
}

impl<const N: usize> Aborted<N> {
    pub fn into_error(self) -> Error {
        match self.error {
            AbortReason::StepLimit { t, max_steps } => Error::StepLimit { max_steps, t },
            AbortReason::StepUnderflow { t } | AbortReason::NonFinite { t } => {
                Error::domain(format!("integration failed at t = {t}"))
            }
        }
    }
}

fn add_scaled<const N: usize>(y: &[f64; N], h: f64, terms: &[(&[f64; N], f64)]) -> [f64; N] {
    let mut out = *y;
    for (k, w) in terms {
        for i in 0..N {
            out[i] += h * w * k[i];
        }
    }
    out
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], tol: &Tolerances) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = tol.abs_tol + tol.rel_tol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(rhs: &F, t0: f64, y0: &[f64; N], f0: &[f64; N], tol: &Tolerances) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let norm = |v: &[f64; N]| {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = tol.abs_tol + tol.rel_tol * y0[i].abs();
            acc += (v[i] / sc).powi(2);
        }
        (acc / N as f64).sqrt()
    };
    let (d0, d1) = (norm(y0), norm(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = add_scaled(y0, h0, &[(f0, 1.0)]);
    let f1 = rhs(t0 + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Integrates `y' = rhs(t, y)` from `t0` until `stop(step)` holds or `t_end`
/// is reached, landing exactly on every time in `outputs` (ascending).
pub fn integrate<const N: usize, F, S>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    outputs: &[f64],
    tol: &Tolerances,
    stop: S,
) -> std::result::Result<Trajectory<N>, Aborted<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: Fn(&Step<N>) -> bool,
{
    let f0 = rhs(t0, &y0);
    let mut steps = vec![Step { t: t0, y: y0, dy: f0 }];
    let mut stop_indices = Vec::new();
    let mut next_output = 0;
    while next_output < outputs.len() && outputs[next_output] <= t0 {
        if outputs[next_output] == t0 {
            stop_indices.push(0);
        }
        next_output += 1;
    }

    let mut h = initial_step(&rhs, t0, &y0, &f0, tol);
    let mut err_old: f64 = 1e-4;
    let mut rejected_last = false;
    let (mut t, mut y, mut k1) = (t0, y0, f0);

    let abort = |steps: Vec<Step<N>>, stop_indices: Vec<usize>, error: AbortReason| Aborted {
        partial: Trajectory {
            steps,
            stop_indices,
            termination: Termination::End,
        },
        error,
    };

    loop {
        if steps.len() > tol.max_steps {
            return Err(abort(steps, stop_indices, AbortReason::StepLimit { t, max_steps: tol.max_steps }));
        }
        let mut lands_on_output = false;
        let mut target = t_end;
        if next_output < outputs.len() && outputs[next_output] <= target {
            target = outputs[next_output];
            lands_on_output = true;
        }
        let proposed = h;
        let mut hits_target = false;
        if t + h >= target {
            h = target - t;
            hits_target = true;
        }
        // The systems integrated here are autonomous, so a step only has to
        // move t forward; rounding of t does not feed back into the state.
        if !(t + h > t) {
            return Err(abort(steps, stop_indices, AbortReason::StepUnderflow { t }));
        }

        let k2 = rhs(t + C[1] * h, &add_scaled(&y, h, &[(&k1, A2[0])]));
        let k3 = rhs(t + C[2] * h, &add_scaled(&y, h, &[(&k1, A3[0]), (&k2, A3[1])]));
        let k4 = rhs(
            t + C[3] * h,
            &add_scaled(&y, h, &[(&k1, A4[0]), (&k2, A4[1]), (&k3, A4[2])]),
        );
        let k5 = rhs(
            t + C[4] * h,
            &add_scaled(&y, h, &[(&k1, A5[0]), (&k2, A5[1]), (&k3, A5[2]), (&k4, A5[3])]),
        );
        let k6 = rhs(
            t + C[5] * h,
            &add_scaled(
                &y,
                h,
                &[(&k1, A6[0]), (&k2, A6[1]), (&k3, A6[2]), (&k4, A6[3]), (&k5, A6[4])],
            ),
        );
        let y_new = add_scaled(
            &y,
            h,
            &[(&k1, B[0]), (&k3, B[2]), (&k4, B[3]), (&k5, B[4]), (&k6, B[5])],
        );
        let t_new = if hits_target { target } else { t + h };
        let k7 = rhs(t_new, &y_new);
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h
                * (E[0] * k1[i] + E[2] * k3[i] + E[3] * k4[i] + E[4] * k5[i] + E[5] * k6[i] + E[6] * k7[i]);
        }
        let en = error_norm(&err, &y, &y_new, tol);
        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            // treat as a rejection with maximal shrink
            h *= MIN_FACTOR;
            rejected_last = true;
            if !(t + h > t) {
                return Err(abort(steps, stop_indices, AbortReason::NonFinite { t }));
            }
            continue;
        }

        if en <= 1.0 {
            let en = en.max(1e-10);
            let mut factor = SAFETY * en.powf(-ALPHA) * err_old.powf(BETA);
            factor = factor.clamp(MIN_FACTOR, MAX_FACTOR);
            if rejected_last {
                factor = factor.min(1.0);
            }
            err_old = en;
            rejected_last = false;
            let step = Step { t: t_new, y: y_new, dy: k7 };
            steps.push(step);
            if hits_target && lands_on_output {
                stop_indices.push(steps.len() - 1);
                next_output += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            if stop(&step) {
                return Ok(Trajectory {
                    steps,
                    stop_indices,
                    termination: Termination::Event,
                });
            }
            if t_new >= t_end {
                return Ok(Trajectory {
                    steps,
                    stop_indices,
                    termination: Termination::End,
                });
            }
            h = if hits_target { proposed.max(h * factor) } else { h * factor };
        } else {
            let factor = (SAFETY * en.powf(-0.2)).max(MIN_FACTOR);
            h *= factor;
            rejected_last = true;
        }
    }
}

/// Cubic Hermite interpolation of the state and its derivative between two
/// accepted steps.
pub fn hermite<const N: usize>(s0: &Step<N>, s1: &Step<N>, t: f64) -> ([f64; N], [f64; N]) {
    let h = s1.t - s0.t;
    let th = (t - s0.t) / h;
    let (h00, h10, h01, h11) = (
        (1.0 + 2.0 * th) * (1.0 - th).powi(2),
        th * (1.0 - th).powi(2),
        th * th * (3.0 - 2.0 * th),
        th * th * (th - 1.0),
    );
    let (d00, d10, d01, d11) = (
        6.0 * th * (th - 1.0) / h,
        (1.0 - th) * (1.0 - 3.0 * th),
        -6.0 * th * (th - 1.0) / h,
        th * (3.0 * th - 2.0),
    );
    let mut y = [0.0; N];
    let mut dy = [0.0; N];
    for i in 0..N {
        y[i] = h00 * s0.y[i] + h10 * h * s0.dy[i] + h01 * s1.y[i] + h11 * h * s1.dy[i];
        dy[i] = d00 * s0.y[i] + d10 * s0.dy[i] + d01 * s1.y[i] + d11 * s1.dy[i];
    }
    (y, dy)
}
