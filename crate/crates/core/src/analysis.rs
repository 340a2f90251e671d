//! Family-level structure: the radius `φ^t(a)` reached at height `t` by the
//! catenoid with neck `a`, its minimum over `a` (the envelope), the
//! thresholds `M` and `T`, boundary-value counts and pairwise crossings.
//!
//! Grids over `a` are logarithmic in the offset `a - α(t)`, since `φ^t`
//! blows up at `α` and flattens out far away.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilyParams, Regime};
use crate::quadrature::{
    half_height, height_limit, lambda_height, lambda_in_s, radius_from_s, s_at_radius,
    QuadratureSettings, RADIUS_CAP,
};
use crate::solve::{bisect, brent_root, golden_section};

/// Relative tie tolerance `|R - m0| ≤ TIE · max(1, m0)` for the tangent case.
pub const TIE_TOLERANCE: f64 = 1e-6;

/// Points in the coarse grid bracketing the envelope minimiser.
const COARSE_POINTS: usize = 65;

/// Points per level of the brute-force scan.
pub const SCAN_POINTS: usize = 2000;

/// Smallest offset `(a - α) / (U - α)` on log grids.
const MIN_OFFSET: f64 = 1e-6;

/// `φ^{t0}(a)`: the radius at which the catenoid with neck `a` reaches height `t0`.
pub fn phi(fp: &FamilyParams, t0: f64, a: f64, s: &QuadratureSettings) -> Result<f64> {
    fp.require_catenoid("phi")?;
    if !(t0 >= 0.0) {
        return Err(Error::domain(format!("height t0 = {t0} must be non-negative")));
    }
    if t0 == 0.0 {
        return Ok(a);
    }
    let l = half_height(fp, a, s)?.value;
    if l <= t0 {
        return Err(Error::HeightNotReached { a, t0, half_height: l });
    }
    let s_cap = s_at_radius(a, RADIUS_CAP);
    let g = |x: f64| -> Result<f64> { Ok(lambda_in_s(fp, a, x, s)?.value - t0) };
    if g(s_cap)? < 0.0 {
        return Err(Error::OutOfRange {
            name: "phi",
            value: f64::INFINITY,
            cap: RADIUS_CAP,
        });
    }
    let root = brent_root(g, 0.0, s_cap, 1e-14)?;
    Ok(radius_from_s(a, root))
}

/// `φ` with the blow-up side mapped to `+∞`, for scans and flank searches.
fn phi_or_inf(fp: &FamilyParams, t0: f64, a: f64, s: &QuadratureSettings) -> Result<f64> {
    match phi(fp, t0, a, s) {
        Err(Error::OutOfRange { .. }) | Err(Error::HeightNotReached { .. }) => Ok(f64::INFINITY),
        other => other,
    }
}

/// The neck `α` with `L(α) = t0`; `φ^{t0}` is defined exactly on `(α, ∞)`.
pub fn alpha_of(fp: &FamilyParams, t0: f64, s: &QuadratureSettings) -> Result<f64> {
    let limit = height_limit(fp)?;
    if !(t0 > 0.0) || t0 >= limit {
        return Err(Error::domain(format!(
            "height t0 = {t0} must lie in (0, {limit}) for a finite alpha"
        )));
    }
    let l = |a: f64| -> Result<f64> { Ok(half_height(fp, a, s)?.value - t0) };
    let mut hi = 1.0;
    while l(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > RADIUS_CAP {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: hi,
                cap: RADIUS_CAP,
            });
        }
    }
    let mut lo = 0.5 * hi;
    while l(lo)? >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::IterationLimit("alpha_of"));
        }
    }
    brent_root(l, lo, hi, 1e-15 * hi)
}

/// `M = arcosh(sqrt(1 / (1 - q)))`, defined for `0 < q < 1`.
pub fn neck_threshold_m(fp: &FamilyParams) -> Result<f64> {
    match fp.regime() {
        Regime::Cylinder => Err(Error::CylinderRegime {
            operation: "neck_threshold_m",
        }),
        Regime::QAtLeastOne => Err(Error::NotApplicable {
            operation: "neck_threshold_m",
            q: fp.q(),
        }),
        Regime::QBelowOne => Ok((1.0 / (1.0 - fp.q())).sqrt().acosh()),
    }
}

/// Maximum of `a ↦ λ(a, ρ)` over `(0, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightMaximum {
    pub a: f64,
    pub height: f64,
}

/// Maximises `λ(·, ρ)` on `(0, ρ)` by golden section; the map is strictly
/// concave when `ρ` lies in `J_q`.
pub fn height_maximum(fp: &FamilyParams, rho: f64, s: &QuadratureSettings) -> Result<HeightMaximum> {
    fp.require_catenoid("height_maximum")?;
    let neg = |a: f64| -> Result<f64> { Ok(-lambda_height(fp, a, rho, s)?.value) };
    let m = golden_section(neg, 1e-9 * rho, rho * (1.0 - 1e-9), 1e-10 * rho)?;
    Ok(HeightMaximum {
        a: m.x,
        height: -m.value,
    })
}

/// Heights below `T` have a unique envelope minimiser: `λ(A, M)` for `q < 1`,
/// the height limit otherwise.
pub fn height_threshold_t(fp: &FamilyParams, s: &QuadratureSettings) -> Result<f64> {
    match fp.regime() {
        Regime::QBelowOne => Ok(height_maximum(fp, neck_threshold_m(fp)?, s)?.height),
        _ => height_limit(fp),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub t: f64,
    /// Minimal radius `m(t)`.
    pub m: f64,
    pub a_star: f64,
    /// False when `t >= T` (`q < 1`), where uniqueness is not established.
    pub validated: bool,
    /// False when the coarse grid was not unimodal and a dense scan was used.
    pub unimodal: bool,
}

fn log_offsets(alpha: f64, upper: f64, count: usize) -> Vec<f64> {
    let span = upper - alpha;
    let (l0, l1) = (MIN_OFFSET.ln(), 0.0);
    (0..count)
        .map(|i| {
            let frac = if i + 1 == count {
                1.0
            } else {
                (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp()
            };
            alpha + span * frac
        })
        .collect()
}

fn phi_on_grid(fp: &FamilyParams, t0: f64, grid: &[f64], s: &QuadratureSettings) -> Result<Vec<f64>> {
    grid.par_iter().map(|&a| phi_or_inf(fp, t0, a, s)).collect()
}

/// An upper bound for the minimiser: `a0 < m0 ≤ φ(x)` for every `x`.
fn minimiser_bound(fp: &FamilyParams, t0: f64, alpha: f64, s: &QuadratureSettings) -> Result<f64> {
    let mut offset = alpha.max(1.0);
    for _ in 0..60 {
        let v = phi_or_inf(fp, t0, alpha + offset, s)?;
        if v.is_finite() {
            return Ok(v);
        }
        offset *= 2.0;
    }
    Err(Error::IterationLimit("minimiser_bound"))
}

fn is_unimodal(values: &[f64], k: usize) -> bool {
    values[..=k].windows(2).all(|w| w[1] < w[0] || w[0].is_infinite())
        && values[k..].windows(2).all(|w| w[1] > w[0])
}

fn refine_minimum(
    fp: &FamilyParams,
    t0: f64,
    grid: &[f64],
    k: usize,
    s: &QuadratureSettings,
) -> Result<(f64, f64)> {
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    let m = golden_section(|a| phi_or_inf(fp, t0, a, s), lo, hi, 1e-10 * hi)?;
    let at_grid = phi_or_inf(fp, t0, grid[k], s)?;
    Ok(if m.value <= at_grid { (m.x, m.value) } else { (grid[k], at_grid) })
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v < values[best] { i } else { best })
}

fn minimise(fp: &FamilyParams, t0: f64, s: &QuadratureSettings) -> Result<(f64, f64, bool)> {
    let alpha = alpha_of(fp, t0, s)?;
    let upper = minimiser_bound(fp, t0, alpha, s)?;
    let grid = log_offsets(alpha, upper, COARSE_POINTS);
    let values = phi_on_grid(fp, t0, &grid, s)?;
    let k = argmin(&values);
    if is_unimodal(&values, k) {
        let (a0, m0) = refine_minimum(fp, t0, &grid, k, s)?;
        return Ok((a0, m0, true));
    }
    let dense = log_offsets(alpha, upper, SCAN_POINTS);
    let values = phi_on_grid(fp, t0, &dense, s)?;
    let k = argmin(&values);
    let (a0, m0) = refine_minimum(fp, t0, &dense, k, s)?;
    Ok((a0, m0, false))
}

fn check_validated(fp: &FamilyParams, t0: f64, s: &QuadratureSettings) -> Result<bool> {
    if !(t0 > 0.0) {
        return Err(Error::domain(format!("height t0 = {t0} must be positive")));
    }
    let threshold = height_threshold_t(fp, s)?;
    Ok(t0 < threshold)
}

/// Minimiser `a0` of `φ^{t0}` on `(α, ∞)` and the minimal radius `m0`.
/// Heights at or above `T` are rejected.
pub fn envelope_min(fp: &FamilyParams, t0: f64, s: &QuadratureSettings) -> Result<EnvelopePoint> {
    if !check_validated(fp, t0, s)? {
        return Err(Error::UnvalidatedRegime {
            t0,
            threshold: height_threshold_t(fp, s)?,
        });
    }
    let (a_star, m, unimodal) = minimise(fp, t0, s)?;
    Ok(EnvelopePoint {
        t: t0,
        m,
        a_star,
        validated: true,
        unimodal,
    })
}

/// Like [`envelope_min`] but also answers for `T ≤ t0 < L_∞`, marking the
/// result as unvalidated.
pub fn envelope_min_unchecked(fp: &FamilyParams, t0: f64, s: &QuadratureSettings) -> Result<EnvelopePoint> {
    let validated = check_validated(fp, t0, s)?;
    let (a_star, m, unimodal) = minimise(fp, t0, s)?;
    Ok(EnvelopePoint {
        t: t0,
        m,
        a_star,
        validated,
        unimodal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvpResult {
    pub t0: f64,
    pub radius: f64,
    pub count: usize,
    /// Necks with `φ^{t0}(a) = R`, ascending.
    pub roots: Vec<f64>,
    pub m0: f64,
    pub a0: f64,
    /// False when the answer comes from a grid scan outside the proven range.
    pub validated: bool,
    pub note: Option<String>,
}

/// Number of catenoids through the circle of radius `R` at heights `±t0`.
pub fn count_bvp_solutions(
    fp: &FamilyParams,
    t0: f64,
    radius: f64,
    s: &QuadratureSettings,
) -> Result<BvpResult> {
    if !(radius > 0.0) {
        return Err(Error::domain(format!("radius R = {radius} must be positive")));
    }
    let env = envelope_min(fp, t0, s)?;
    let (m0, a0) = (env.m, env.a_star);
    let tie = TIE_TOLERANCE * m0.max(1.0);
    let mut result = BvpResult {
        t0,
        radius,
        count: 0,
        roots: Vec::new(),
        m0,
        a0,
        validated: true,
        note: None,
    };
    if radius < m0 - tie {
        return Ok(result);
    }
    if radius <= m0 + tie {
        result.count = 1;
        result.roots.push(a0);
        return Ok(result);
    }
    if fp.regime() == Regime::QBelowOne && radius > neck_threshold_m(fp)? {
        let scan = count_bvp_scan(fp, t0, radius, s)?;
        result.count = scan.count;
        result.roots = scan.roots;
        result.validated = false;
        result.note = Some("R exceeds M: outside the validated domain, count from grid scan".into());
        return Ok(result);
    }
    let g = |a: f64| -> Result<f64> { Ok(phi_or_inf(fp, t0, a, s)? - radius) };
    let alpha = alpha_of(fp, t0, s)?;
    let mut left = a0;
    for k in 1..=200 {
        left = alpha + (a0 - alpha) * 0.5f64.powi(k);
        if g(left)? > 0.0 {
            break;
        }
    }
    let a1 = bisect(g, left, a0, 1e-13 * a0)?;
    // φ(a) > a, so R itself lies to the right of the upper root
    let a2 = bisect(g, a0, radius, 1e-13 * radius)?;
    result.count = 2;
    result.roots = vec![a1, a2];
    Ok(result)
}

/// Brute-force picture of `φ^{t0}`: a log-offset grid on `(α, hi]` and a
/// second linear grid around the smallest sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiScan {
    pub t0: f64,
    pub alpha: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub a0: f64,
    pub m0: f64,
}

/// Samples `φ^{t0}` at `SCAN_POINTS` necks on `(α, hi]`, then refines the
/// minimum on a second grid of the same size.
pub fn scan_phi(fp: &FamilyParams, t0: f64, hi: f64, s: &QuadratureSettings) -> Result<PhiScan> {
    let alpha = alpha_of(fp, t0, s)?;
    if !(hi > alpha) {
        return Err(Error::domain(format!("scan end {hi} must exceed alpha = {alpha}")));
    }
    let grid = log_offsets(alpha, hi, SCAN_POINTS);
    let values = phi_on_grid(fp, t0, &grid, s)?;
    let k = argmin(&values);
    let lo = grid[k.saturating_sub(1)];
    let up = grid[(k + 1).min(grid.len() - 1)];
    let fine: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (up - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let fine_values = phi_on_grid(fp, t0, &fine, s)?;
    let j = argmin(&fine_values);
    Ok(PhiScan {
        t0,
        alpha,
        grid,
        values,
        a0: fine[j],
        m0: fine_values[j],
    })
}

impl PhiScan {
    /// Roots of `φ - R` seen on the grid. Samples within the tie tolerance of
    /// `R` count as touching: a sign change is one root, and a touching run
    /// between samples of equal sign is one (tangent) root. Counts are never
    /// clamped.
    pub fn count(&self, radius: f64) -> usize {
        let tie = TIE_TOLERANCE * self.m0.max(1.0);
        let mut count = 0;
        let mut last_sign: Option<bool> = None;
        let mut touching = (self.m0 - radius).abs() <= tie && self.values.iter().all(|v| *v > radius - tie);
        if touching {
            // the refined minimum touches R even if no grid sample does
            return 1;
        }
        for &v in &self.values {
            if (v - radius).abs() <= tie {
                touching = true;
                continue;
            }
            let above = v > radius;
            match last_sign {
                Some(prev) if prev != above => count += 1,
                Some(_) if touching => count += 1,
                _ => {}
            }
            last_sign = Some(above);
            touching = false;
        }
        count
    }

    /// Brackets `[a_i, a_{i+1}]` containing a sign change of `φ - R`.
    pub fn brackets(&self, radius: f64) -> Vec<(f64, f64)> {
        self.values
            .windows(2)
            .zip(self.grid.windows(2))
            .filter(|(w, _)| (w[0] > radius) != (w[1] > radius))
            .map(|(_, g)| (g[0], g[1]))
            .collect()
    }
}

/// Grid-scan count used outside the validated domain and as an oracle.
pub fn count_bvp_scan(fp: &FamilyParams, t0: f64, radius: f64, s: &QuadratureSettings) -> Result<BvpResult> {
    let alpha = alpha_of(fp, t0, s)?;
    let upper = minimiser_bound(fp, t0, alpha, s)?;
    let scan = scan_phi(fp, t0, upper.max(radius) * 1.01, s)?;
    let count = scan.count(radius);
    let g = |a: f64| -> Result<f64> { Ok(phi_or_inf(fp, t0, a, s)? - radius) };
    let mut roots = Vec::new();
    for (lo, hi) in scan.brackets(radius) {
        roots.push(bisect(g, lo, hi, 1e-13 * hi)?);
    }
    if roots.is_empty() && count == 1 {
        roots.push(scan.a0);
    }
    Ok(BvpResult {
        t0,
        radius,
        count,
        roots,
        m0: scan.m0,
        a0: scan.a0,
        validated: check_validated(fp, t0, s)?,
        note: Some("grid scan".into()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub rho: f64,
    pub t: f64,
    /// `|λ(a, ρ) - λ(b, ρ)|` at the refined crossing.
    pub residual: f64,
}

const CROSSING_GRID: usize = 400;

/// Upper-half crossings of the profiles with necks `a` and `b`; the mirror
/// points `(ρ, -t)` are implied.
pub fn profile_intersections(fp: &FamilyParams, a: f64, b: f64, s: &QuadratureSettings) -> Result<Vec<Crossing>> {
    fp.require_catenoid("profile_intersections")?;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("neck radii must be positive"));
    }
    if a == b {
        return Err(Error::domain("identical necks give identical curves"));
    }
    let (small, big) = if a < b { (a, b) } else { (b, a) };
    let d = |rho: f64| -> Result<f64> {
        Ok(lambda_height(fp, small, rho, s)?.value - lambda_height(fp, big, rho, s)?.value)
    };
    let grid = log_offsets(big, RADIUS_CAP, CROSSING_GRID);
    let values: Vec<f64> = grid.par_iter().map(|&rho| d(rho)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..grid.len() - 1 {
        if (values[i] > 0.0) != (values[i + 1] > 0.0) {
            let rho = bisect(d, grid[i], grid[i + 1], 1e-14 * grid[i + 1])?;
            let ta = lambda_height(fp, small, rho, s)?.value;
            let tb = lambda_height(fp, big, rho, s)?.value;
            out.push(Crossing {
                rho,
                t: 0.5 * (ta + tb),
                residual: (ta - tb).abs(),
            });
        }
    }
    Ok(out)
}

/// Envelope point with its first-order tangency residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub t: f64,
    pub point: std::result::Result<EnvelopePoint, String>,
    /// Central difference of `φ^t` in `a` at the minimiser.
    pub tangency: Option<f64>,
}

/// Tolerance on the tangency residual `|dφ/da|` at the minimiser.
pub const TANGENCY_TOLERANCE: f64 = 1e-5;

/// [`envelope_min`] over an ascending grid, with per-point status.
pub fn envelope_curve(fp: &FamilyParams, t_grid: &[f64], s: &QuadratureSettings) -> Result<Vec<EnvelopeSample>> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("height grid must be strictly ascending"));
    }
    Ok(t_grid
        .par_iter()
        .map(|&t| {
            let point = envelope_min(fp, t, s).and_then(|p| {
                let delta = 1e-4 * p.a_star;
                let up = phi(fp, t, p.a_star + delta, s)?;
                let down = phi(fp, t, p.a_star - delta, s)?;
                Ok((p, (up - down) / (2.0 * delta)))
            });
            match point {
                Ok((p, slope)) => EnvelopeSample {
                    t,
                    point: Ok(p),
                    tangency: Some(slope),
                },
                Err(e) => EnvelopeSample {
                    t,
                    point: Err(e.to_string()),
                    tangency: None,
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{integrate_profile_at, OdeSettings};

    fn fam(n: i64, r: i64) -> FamilyParams {
        FamilyParams::new(n, r).unwrap()
    }

    fn qs() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn phi_at_zero_height_is_neck() {
        assert_eq!(phi(&fam(4, 1), 0.0, 0.7, &qs()).unwrap(), 0.7);
    }

    #[test]
    fn phi_matches_ode() {
        let fp = fam(4, 1);
        let rho = phi(&fp, 0.5, 1.0, &qs()).unwrap();
        let pts = integrate_profile_at(&fp, 1.0, &[0.5], &OdeSettings::default()).unwrap();
        let p = pts.iter().find(|p| p.t == 0.5).unwrap();
        assert!((rho - p.f).abs() < 1e-6, "{rho} vs {}", p.f);
    }

    #[test]
    fn phi_rejects_unreached_height() {
        let fp = fam(4, 1);
        let err = phi(&fp, 1.0, 0.1, &qs()).unwrap_err();
        assert!(matches!(err, Error::HeightNotReached { .. }));
    }

    #[test]
    fn phi_blows_up_at_alpha() {
        let fp = fam(4, 1);
        let alpha = alpha_of(&fp, 0.5, &qs()).unwrap();
        let near = phi(&fp, 0.5, alpha * (1.0 + 1e-3), &qs()).unwrap();
        let nearer = phi(&fp, 0.5, alpha * (1.0 + 1e-6), &qs()).unwrap();
        assert!(nearer > near + 2.0);
    }

    #[test]
    fn alpha_inverts_half_height() {
        let fp = fam(4, 1);
        let alpha = alpha_of(&fp, 0.7, &qs()).unwrap();
        assert!((half_height(&fp, alpha, &qs()).unwrap().value - 0.7).abs() < 1e-10);
        assert!(alpha_of(&fp, 0.8, &qs()).unwrap() > alpha);
        assert!(alpha_of(&fp, 1e-4, &qs()).unwrap() < 1e-3);
        assert!(alpha_of(&fp, std::f64::consts::FRAC_PI_2, &qs()).is_err());
    }

    #[test]
    fn neck_threshold_values() {
        let m = neck_threshold_m(&fam(3, 1)).unwrap();
        assert!((m - 0.881_373_587_019_543).abs() < 1e-12);
        assert!(matches!(
            neck_threshold_m(&fam(4, 1)),
            Err(Error::NotApplicable { .. })
        ));
        assert!(neck_threshold_m(&fam(3, 2)).is_err());
        // q = 1/11 is small, q = 10/11 is close to one
        assert!(neck_threshold_m(&fam(12, 10)).unwrap() < 0.35);
        assert!(neck_threshold_m(&fam(21, 10)).unwrap() > 1.8);
    }

    #[test]
    fn height_threshold_branches() {
        let t = height_threshold_t(&fam(4, 1), &qs()).unwrap();
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let fp = fam(5, 2);
        let t = height_threshold_t(&fp, &qs()).unwrap();
        let m = neck_threshold_m(&fp).unwrap();
        assert!((m - 3f64.sqrt().acosh()).abs() < 1e-14);
        // dense scan of λ(·, M)
        let best = (1..2000)
            .map(|i| lambda_height(&fp, m * i as f64 / 2000.0, m, &qs()).unwrap().value)
            .fold(0.0, f64::max);
        assert!(t >= best - 1e-12 && t - best < 1e-6, "{t} vs {best}");
        assert!(t < height_limit(&fp).unwrap());
    }

    #[test]
    fn envelope_matches_brute_force_scan() {
        let fp = fam(4, 1);
        let env = envelope_min(&fp, 0.5, &qs()).unwrap();
        assert!(env.unimodal && env.validated);
        let scan = scan_phi(&fp, 0.5, 3.0 * env.m, &qs()).unwrap();
        assert!((scan.m0 - env.m).abs() < 1e-5, "{} vs {}", scan.m0, env.m);
        assert!((scan.a0 - env.a_star).abs() < 1e-5, "{} vs {}", scan.a0, env.a_star);
        let d = 1e-3 * env.a_star;
        assert!(phi(&fp, 0.5, env.a_star + d, &qs()).unwrap() > env.m);
        assert!(phi(&fp, 0.5, env.a_star - d, &qs()).unwrap() > env.m);
        assert!(scan.values.iter().all(|v| *v >= env.m - 1e-12));
    }

    #[test]
    fn envelope_rejects_unvalidated_heights() {
        let fp = fam(3, 1);
        let t = height_threshold_t(&fp, &qs()).unwrap();
        assert!(matches!(
            envelope_min(&fp, t * 1.01, &qs()),
            Err(Error::UnvalidatedRegime { .. })
        ));
        let p = envelope_min_unchecked(&fp, t * 1.01, &qs()).unwrap();
        assert!(!p.validated);
    }

    #[test]
    fn bvp_three_cases() {
        let fp = fam(4, 1);
        let env = envelope_min(&fp, 0.7, &qs()).unwrap();
        assert_eq!(count_bvp_solutions(&fp, 0.7, 0.9 * env.m, &qs()).unwrap().count, 0);
        let one = count_bvp_solutions(&fp, 0.7, env.m, &qs()).unwrap();
        assert_eq!(one.count, 1);
        assert_eq!(one.roots, vec![env.a_star]);
        let two = count_bvp_solutions(&fp, 0.7, 1.5 * env.m, &qs()).unwrap();
        assert_eq!(two.count, 2);
        assert!(two.roots[0] < env.a_star && env.a_star < two.roots[1]);
        for a in two.roots {
            assert!((phi(&fp, 0.7, a, &qs()).unwrap() - 1.5 * env.m).abs() < 1e-8);
        }
    }

    #[test]
    fn bvp_outside_j_q_is_flagged() {
        let fp = fam(3, 1);
        let m = neck_threshold_m(&fp).unwrap();
        let t0 = 0.2;
        let env = envelope_min(&fp, t0, &qs()).unwrap();
        assert!(env.m < m);
        let res = count_bvp_solutions(&fp, t0, 1.2 * m.max(env.m), &qs()).unwrap();
        assert!(!res.validated && res.note.is_some());
        assert!(res.count >= 2);
    }

    #[test]
    fn single_crossing_of_two_profiles() {
        let fp = fam(4, 1);
        let c = profile_intersections(&fp, 0.5, 1.0, &qs()).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].rho > 1.0 && c[0].t > 0.0 && c[0].residual < 1e-8);

        let fp = fam(3, 1);
        let c = profile_intersections(&fp, 0.9, 0.3, &qs()).unwrap();
        assert_eq!(c.len(), 1);
        let la = lambda_height(&fp, 0.3, c[0].rho, &qs()).unwrap().value;
        let lb = lambda_height(&fp, 0.9, c[0].rho, &qs()).unwrap().value;
        assert!((la - lb).abs() < 1e-8);
        assert!(profile_intersections(&fp, 0.4, 0.4, &qs()).is_err());
    }

    #[test]
    fn envelope_curve_is_tangent() {
        let fp = fam(4, 1);
        let samples = envelope_curve(&fp, &[0.3, 0.6, 0.9], &qs()).unwrap();
        for s in &samples {
            assert!(s.point.is_ok());
            assert!(s.tangency.unwrap().abs() < TANGENCY_TOLERANCE, "{:?}", s);
        }
        assert!(envelope_curve(&fp, &[0.5, 0.4], &qs()).is_err());
    }
}
