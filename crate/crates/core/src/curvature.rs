//! Pointwise extrinsic geometry of the rotational hypersurfaces: principal
//! curvatures, normalised mean curvatures `H_j`, Newton-tensor eigenvalues
//! and the sign pattern of the `H_j` along catenoids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilyParams, ProfilePoint, Regime};
use crate::profile::{integrate_profile_at, OdeSettings};
use crate::quadrature::{half_height, QuadratureSettings};

/// `|H_j|` below this counts as numerically zero.
pub const SIGN_DEAD_BAND: f64 = 1e-12;

/// Bound on `|H_{r+1}|` and on `|k_n + q k_1|` along catenoids.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Fraction of `L(a)` covered by [`verify_hj_signs`]; closer to the blow-up
/// the `H_j` decay like `k_1^j` into the dead-band.
pub const SAMPLE_SPAN: f64 = 0.9;

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `k_1 = … = k_{n-1} = coth f / sqrt(1 + f_t²)`, `k_n = -f_tt / (1 + f_t²)^{3/2}`.
pub fn principal_curvatures(fp: &FamilyParams, p: &ProfilePoint) -> Vec<f64> {
    let w = 1.0 / 1f64.hypot(p.f_t);
    let k1 = w / p.f.tanh();
    let mut k = vec![k1; fp.n()];
    // adding 0.0 turns a -0.0 into 0.0
    k[fp.n() - 1] = -p.f_tt * w * w * w + 0.0;
    k
}

/// Elementary symmetric polynomials `e_0 … e_n` by the ascending product
/// recursion.
pub fn elementary_symmetric(k: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; k.len() + 1];
    e[0] = 1.0;
    for (i, &ki) in k.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += ki * e[j - 1];
        }
    }
    e
}

/// `H_1 … H_n` with `H_j = e_j / C(n, j)`.
pub fn mean_curvatures(k: &[f64]) -> Vec<f64> {
    let n = k.len();
    let e = elementary_symmetric(k);
    (1..=n).map(|j| e[j] / binomial(n, j)).collect()
}

/// Diagonals of `P_0 … P_{up_to}` in the principal frame, from
/// `P_0 = I`, `P_j = e_j I - A P_{j-1}`.
pub fn newton_eigenvalues(k: &[f64], up_to: usize) -> Result<Vec<Vec<f64>>> {
    let n = k.len();
    if n == 0 || up_to >= n {
        return Err(Error::domain(format!(
            "Newton tensors exist up to P_{{n-1}}; asked for P_{up_to} with n = {n}"
        )));
    }
    let e = elementary_symmetric(k);
    let mut out = vec![vec![1.0; n]];
    for j in 1..=up_to {
        let prev = &out[j - 1];
        let next = k.iter().zip(prev).map(|(ki, pi)| e[j] - ki * pi).collect();
        out.push(next);
    }
    Ok(out)
}

/// `(q + 1) H_{r+1}` written out from the profile data; zero for solutions
/// of the profile equation.
pub fn r_minimal_residual(fp: &FamilyParams, p: &ProfilePoint) -> f64 {
    let r = fp.r() as i32;
    let q = fp.q();
    let w = 1.0 / 1f64.hypot(p.f_t);
    let c = 1.0 / p.f.tanh();
    -c.powi(r) * p.f_tt * w.powi(r + 3) + q * c.powi(r + 1) * w.powi(r + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureRecord {
    pub point: ProfilePoint,
    pub k: Vec<f64>,
    pub h: Vec<f64>,
    /// Diagonals of `P_0 … P_{n-1}`.
    pub newton_eigs: Vec<Vec<f64>>,
}

pub fn curvature_record(fp: &FamilyParams, p: &ProfilePoint) -> CurvatureRecord {
    let k = principal_curvatures(fp, p);
    let h = mean_curvatures(&k);
    let newton_eigs = newton_eigenvalues(&k, fp.n() - 1).expect("n >= 2");
    CurvatureRecord {
        point: *p,
        k,
        h,
        newton_eigs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignViolation {
    pub t: f64,
    /// 1-based index of `H_j`, or 0 for a Newton-tensor finding.
    pub j: usize,
    pub value: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjReport {
    pub a: f64,
    pub n_samples: usize,
    pub t_max: f64,
    pub max_abs_h_r1: f64,
    pub max_kn_residual: f64,
    pub min_pr_eigenvalue: f64,
    /// Smallest `|H_{r+2}|`, absent when `r + 2 > n`.
    pub min_abs_h_r2: Option<f64>,
    pub violations: Vec<SignViolation>,
    pub pass: bool,
}

fn expected_sign(r: usize, j: usize) -> f64 {
    if j < r + 1 {
        1.0
    } else {
        -1.0
    }
}

/// Checks `sign H_j = sign(r + 1 - j)`, `H_{r+1} = 0`, `k_n = -q k_1` and
/// `P_r > 0` at `n_samples` heights evenly spread over `[0, 0.9 L(a)]`.
pub fn verify_hj_signs(
    fp: &FamilyParams,
    a: f64,
    n_samples: usize,
    ode: &OdeSettings,
    quad: &QuadratureSettings,
) -> Result<HjReport> {
    if n_samples < 2 {
        return Err(Error::domain("at least two samples are needed"));
    }
    let l = half_height(fp, a, quad)?.value;
    let t_max = SAMPLE_SPAN * l;
    let times: Vec<f64> = (0..n_samples)
        .map(|i| t_max * i as f64 / (n_samples - 1) as f64)
        .collect();
    let points = integrate_profile_at(fp, a, &times, ode)?;
    let (n, r, q) = (fp.n(), fp.r(), fp.q());
    let mut report = HjReport {
        a,
        n_samples,
        t_max,
        max_abs_h_r1: 0.0,
        max_kn_residual: 0.0,
        min_pr_eigenvalue: f64::INFINITY,
        min_abs_h_r2: (r + 2 <= n).then_some(f64::INFINITY),
        violations: Vec::new(),
        pass: true,
    };
    for p in &points {
        let rec = curvature_record(fp, p);
        report.max_kn_residual = report.max_kn_residual.max((rec.k[n - 1] + q * rec.k[0]).abs());
        for (idx, &h) in rec.h.iter().enumerate() {
            let j = idx + 1;
            if j == r + 1 {
                report.max_abs_h_r1 = report.max_abs_h_r1.max(h.abs());
                continue;
            }
            if j == r + 2 {
                report.min_abs_h_r2 = report.min_abs_h_r2.map(|m| m.min(h.abs()));
            }
            let reason = if h.abs() < SIGN_DEAD_BAND {
                Some("numerically zero")
            } else if h.signum() != expected_sign(r, j) {
                Some("wrong sign")
            } else {
                None
            };
            if let Some(reason) = reason {
                report.violations.push(SignViolation {
                    t: p.t,
                    j,
                    value: h,
                    reason: reason.into(),
                });
            }
        }
        for &e in &rec.newton_eigs[r] {
            report.min_pr_eigenvalue = report.min_pr_eigenvalue.min(e);
            if !(e > 0.0) {
                report.violations.push(SignViolation {
                    t: p.t,
                    j: 0,
                    value: e,
                    reason: format!("P_{r} eigenvalue not positive"),
                });
            }
        }
    }
    report.pass = report.violations.is_empty()
        && report.max_abs_h_r1 < IDENTITY_TOLERANCE
        && report.max_kn_residual < IDENTITY_TOLERANCE;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderReport {
    pub c: f64,
    pub k: Vec<f64>,
    pub h: Vec<f64>,
    pub residual: f64,
    pub pass: bool,
}

/// The right cylinder `f ≡ c` for `n = r + 1`.
pub fn cylinder_case(fp: &FamilyParams, c: f64) -> Result<CylinderReport> {
    if fp.regime() != Regime::Cylinder {
        return Err(Error::NotApplicable {
            operation: "cylinder_case",
            q: fp.q(),
        });
    }
    let p = ProfilePoint::new(0.0, c, 0.0, 0.0)?;
    let k = principal_curvatures(fp, &p);
    let h = mean_curvatures(&k);
    let residual = r_minimal_residual(fp, &p);
    let n = fp.n();
    let coth = c.cosh() / c.sinh();
    let pass = residual == 0.0
        && k[n - 1] == 0.0
        && h[n - 1] == 0.0
        && k[..n - 1].iter().all(|&ki| (ki - coth).abs() <= 4.0 * f64::EPSILON * coth);
    Ok(CylinderReport { c, k, h, residual, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: i64, r: i64) -> FamilyParams {
        FamilyParams::new(n, r).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn mean_curvature_examples() {
        let h = mean_curvatures(&[1.0, 1.0, 1.0, -1.0]);
        assert_eq!(h, vec![0.5, 0.0, -0.5, -1.0]);
        let h = mean_curvatures(&[0.7; 5]);
        for (j, hj) in h.iter().enumerate() {
            assert!((hj - 0.7f64.powi(j as i32 + 1)).abs() < 1e-15);
        }
        assert!(mean_curvatures(&[0.0; 3]).iter().all(|h| *h == 0.0));
    }

    #[test]
    fn newton_examples() {
        let p = newton_eigenvalues(&[1.0, 1.0, 1.0, -1.0], 3).unwrap();
        assert_eq!(p[0], vec![1.0; 4]);
        assert_eq!(p[1], vec![1.0, 1.0, 1.0, 3.0]);
        assert!(newton_eigenvalues(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn newton_trace_identity() {
        let k = [0.3, -1.2, 2.5, 0.8, -0.4];
        let e = elementary_symmetric(&k);
        let p = newton_eigenvalues(&k, 4).unwrap();
        for (j, pj) in p.iter().enumerate() {
            let trace: f64 = pj.iter().sum();
            assert!((trace - (5 - j) as f64 * e[j]).abs() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn neck_curvatures() {
        let fp = fam(4, 1);
        let a: f64 = 0.6;
        let p = ProfilePoint::new(0.0, a, 0.0, fp.q() / a.tanh()).unwrap();
        let k = principal_curvatures(&fp, &p);
        let coth = 1.0 / a.tanh();
        assert_eq!(&k[..3], &[coth; 3]);
        assert!((k[3] + fp.q() * coth).abs() < 1e-15);
        assert!(r_minimal_residual(&fp, &p).abs() < 1e-15);
    }

    #[test]
    fn residual_matches_expanded_h() {
        // the closed form equals (q + 1) H_{r+1} at arbitrary profile data
        for &(n, r) in &[(4, 1), (6, 2), (5, 3), (7, 0)] {
            let fp = fam(n, r);
            let p = ProfilePoint::new(0.3, 1.1, 0.7, -0.4).unwrap();
            let h = mean_curvatures(&principal_curvatures(&fp, &p));
            let lhs = (fp.q() + 1.0) * h[fp.r()];
            assert!((lhs - r_minimal_residual(&fp, &p)).abs() < 1e-14, "({n}, {r})");
        }
    }

    #[test]
    fn steep_limit_flattens_curvature() {
        let fp = fam(3, 1);
        let p = ProfilePoint::new(1.0, 2.0, 1e8, 1.0).unwrap();
        assert!(principal_curvatures(&fp, &p).iter().all(|k| k.abs() < 1e-7));
    }

    #[test]
    fn hj_signs_on_catenoids() {
        let ode = OdeSettings::default();
        let quad = QuadratureSettings::default();
        for &(n, r, a) in &[(4, 1, 1.0), (6, 2, 0.7)] {
            let rep = verify_hj_signs(&fam(n, r), a, 100, &ode, &quad).unwrap();
            assert!(rep.pass, "{rep:?}");
            assert!(rep.min_pr_eigenvalue > 0.0);
            assert!(rep.min_abs_h_r2.unwrap() > SIGN_DEAD_BAND);
        }
    }

    #[test]
    fn cylinder() {
        let fp = fam(3, 2);
        let rep = cylinder_case(&fp, 1.0).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.residual, 0.0);
        assert!((rep.k[0] - 1.313_035_285_499_331).abs() < 1e-15);
        assert!(cylinder_case(&fam(4, 1), 1.0).is_err());
    }
}
