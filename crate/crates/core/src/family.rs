//! Ambient geometry of H^n x R in the ball model and the parameters of the
//! rotational family.
//!
//! Heights `t` and hyperbolic radii `f` are geodesic lengths. The ball-model
//! radial coordinate `tanh(f/2)` only appears in [`AmbientPoint`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|zeta| = 1` for rotation directions.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Largest admissible `|x|` for [`metric_factor`].
pub const BALL_EDGE: f64 = 1.0 - 1e-12;

/// Which branch of the classification a family falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// n = r + 1: right cylinders over spheres.
    Cylinder,
    /// 0 < q < 1: heights bounded, minimiser uniqueness proven only below T.
    QBelowOne,
    /// q >= 1.
    QAtLeastOne,
}

/// Ambient dimension `n`, curvature order `r` and the exponent
/// `q = (n - r - 1) / (r + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    n: usize,
    r: usize,
    q: f64,
}

impl FamilyParams {
    /// Builds the parameters, rejecting `n < 2`, `r < 0` and `r > n - 1`.
    pub fn new(n: i64, r: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("n = {n} violates n >= 2")));
        }
        if r < 0 {
            return Err(Error::domain(format!("r = {r} violates r >= 0")));
        }
        if r > n - 1 {
            return Err(Error::domain(format!("r = {r} violates r <= n - 1 = {}", n - 1)));
        }
        let (num, den) = (n - r - 1, r + 1);
        Ok(FamilyParams {
            n: n as usize,
            r: r as usize,
            q: num as f64 / den as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `q` as the exact ratio `(n - r - 1, r + 1)`.
    pub fn q_ratio(&self) -> (usize, usize) {
        (self.n - self.r - 1, self.r + 1)
    }

    pub fn regime(&self) -> Regime {
        let (num, den) = self.q_ratio();
        if num == 0 {
            Regime::Cylinder
        } else if num < den {
            Regime::QBelowOne
        } else {
            Regime::QAtLeastOne
        }
    }

    pub(crate) fn require_catenoid(&self, operation: &'static str) -> Result<()> {
        if self.regime() == Regime::Cylinder {
            Err(Error::CylinderRegime { operation })
        } else {
            Ok(())
        }
    }
}

/// A point of H^n x R: ball-model coordinates and height.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    pub x: Vec<f64>,
    pub t: f64,
}

/// One point of a profile curve `t -> f(t)` with its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub f: f64,
    pub f_t: f64,
    pub f_tt: f64,
}

impl ProfilePoint {
    pub fn new(t: f64, f: f64, f_t: f64, f_tt: f64) -> Result<Self> {
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::domain(format!("profile radius f = {f} must be positive")));
        }
        if !(t.is_finite() && f_t.is_finite() && f_tt.is_finite()) {
            return Err(Error::domain("profile point has non-finite entries"));
        }
        Ok(ProfilePoint { t, f, f_t, f_tt })
    }
}

/// A tangent vector of H^n x R split into its horizontal (ball-model
/// coordinates) and vertical parts.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub horizontal: Vec<f64>,
    pub vertical: f64,
}

impl TangentVector {
    /// Length in the product metric `g_H + dt^2` at the base point `x`.
    pub fn product_norm(&self, x: &[f64]) -> Result<f64> {
        let factor = metric_factor(x)?;
        let h2: f64 = self.horizontal.iter().map(|c| c * c).sum();
        Ok((factor * factor * h2 + self.vertical * self.vertical).sqrt())
    }
}

fn check_unit(zeta: &[f64]) -> Result<()> {
    let norm = zeta.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::domain(format!("direction has norm {norm}, expected 1")));
    }
    Ok(())
}

/// Conformal factor `2 / (1 - |x|^2)` of the ball metric.
pub fn metric_factor(x: &[f64]) -> Result<f64> {
    let s2: f64 = x.iter().map(|c| c * c).sum();
    if !(s2.sqrt() <= BALL_EDGE) {
        return Err(Error::domain(format!(
            "|x| = {} is not inside the ball (limit {BALL_EDGE})",
            s2.sqrt()
        )));
    }
    Ok(2.0 / (1.0 - s2))
}

/// Places the point at hyperbolic distance `rho` from the axis in direction
/// `zeta`, at height `t`.
pub fn ball_embed(rho: f64, t: f64, zeta: &[f64]) -> Result<AmbientPoint> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("rho = {rho} must be positive")));
    }
    check_unit(zeta)?;
    let s = (0.5 * rho).tanh();
    Ok(AmbientPoint {
        x: zeta.iter().map(|z| s * z).collect(),
        t,
    })
}

/// Unit normal of the rotational hypersurface through `p` in direction
/// `zeta`. The horizontal part points towards the axis.
pub fn normal_vector(p: &ProfilePoint, zeta: &[f64]) -> Result<TangentVector> {
    check_unit(zeta)?;
    let scale = 1.0 / 1f64.hypot(p.f_t);
    let c = (0.5 * p.f).cosh();
    let h = -scale / (2.0 * c * c);
    Ok(TangentVector {
        horizontal: zeta.iter().map(|z| h * z).collect(),
        vertical: scale * p.f_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        v
    }

    #[test]
    fn family_q_and_regime() {
        let fp = FamilyParams::new(4, 1).unwrap();
        assert_eq!(fp.q(), 1.0);
        assert_eq!(fp.regime(), Regime::QAtLeastOne);
        let fp = FamilyParams::new(3, 1).unwrap();
        assert_eq!(fp.q(), 0.5);
        assert_eq!(fp.regime(), Regime::QBelowOne);
        let fp = FamilyParams::new(3, 2).unwrap();
        assert_eq!(fp.q(), 0.0);
        assert_eq!(fp.regime(), Regime::Cylinder);
    }

    #[test]
    fn family_rejects_bad_bounds() {
        let msg = FamilyParams::new(1, 0).unwrap_err().to_string();
        assert!(msg.contains("n >= 2"), "{msg}");
        let msg = FamilyParams::new(4, -1).unwrap_err().to_string();
        assert!(msg.contains("r >= 0"), "{msg}");
        let msg = FamilyParams::new(4, 4).unwrap_err().to_string();
        assert!(msg.contains("r <= n - 1"), "{msg}");
    }

    #[test]
    fn q_monotone_in_n_and_r() {
        for n in 2..12 {
            for r in 0..n - 1 {
                let a = FamilyParams::new(n, r).unwrap().q();
                let b = FamilyParams::new(n, r + 1).unwrap().q();
                let c = FamilyParams::new(n + 1, r).unwrap().q();
                assert!(b < a && c > a);
            }
        }
    }

    #[test]
    fn embed_examples() {
        let p = ball_embed(1e-300, 0.0, &e1(3)).unwrap();
        assert!(p.x[0] < 1e-299 && p.t == 0.0);
        let rho = 2.0 * 0.5f64.atanh();
        let p = ball_embed(rho, 3.0, &e1(3)).unwrap();
        assert!((p.x[0] - 0.5).abs() < 1e-15);
        assert_eq!(&p.x[1..], &[0.0, 0.0]);
        assert_eq!(p.t, 3.0);
        assert!(ball_embed(1.0, 0.0, &[1.0, 1e-5]).is_err());
        assert!(ball_embed(0.0, 0.0, &e1(2)).is_err());
    }

    #[test]
    fn embedded_point_is_at_geodesic_distance_rho() {
        // Integrate the metric factor along the radius and compare with rho.
        for &rho in &[0.1, 1.0, 2.5, 6.0] {
            let s = ball_embed(rho, 0.0, &e1(2)).unwrap().x[0];
            let dist = crate::quadrature::gauss_kronrod::integrate(
                |u| metric_factor(&[u]).unwrap(),
                0.0,
                s,
                1e-13,
                1e-15,
                200,
            )
            .unwrap()
            .value;
            assert!((dist - rho).abs() < 1e-8 * rho.max(1.0), "rho {rho} dist {dist}");
        }
    }

    #[test]
    fn metric_factor_values() {
        assert_eq!(metric_factor(&[0.0, 0.0]).unwrap(), 2.0);
        assert!((metric_factor(&[0.5, 0.0]).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!(metric_factor(&[1.0]).is_err());
        assert!(metric_factor(&[1.0 - 1e-13]).is_err());
        assert!(metric_factor(&[1.0 - 1e-11]).unwrap().is_finite());
    }

    #[test]
    fn normal_examples() {
        let p = ProfilePoint::new(0.0, 1.3, 0.0, 0.7).unwrap();
        let z = e1(3);
        let nv = normal_vector(&p, &z).unwrap();
        let c = (0.65f64).cosh();
        assert!((nv.horizontal[0] + 1.0 / (2.0 * c * c)).abs() < 1e-15);
        assert_eq!(nv.vertical, 0.0);
        let x = ball_embed(p.f, p.t, &z).unwrap().x;
        assert!((nv.product_norm(&x).unwrap() - 1.0).abs() < 1e-12);

        let steep = ProfilePoint::new(0.0, 1.0, 1e9, 1.0).unwrap();
        let nv = normal_vector(&steep, &z).unwrap();
        assert!((nv.vertical - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_point_rejects_nonpositive_radius() {
        assert!(ProfilePoint::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(ProfilePoint::new(0.0, -1.0, 0.0, 0.0).is_err());
    }
}
