//! CSV and OBJ output. Numbers are written with 17 significant digits in
//! Rust's locale-independent `{:e}` form, so identical inputs give
//! byte-identical files.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::curvature::{mean_curvatures, principal_curvatures, IDENTITY_TOLERANCE};
use crate::error::{Error, Result};
use crate::family::{FamilyParams, ProfilePoint};
use crate::profile::{first_integral_residual, integrate_profile, integrate_profile_at, OdeSettings};
use crate::quadrature::QuadratureSettings;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Bound on the exported first-integral residual.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A numeric table with `# key = value` metadata lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k} = {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| fmt_num(*x)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(str::to_string).collect()),
                Some(cols) => {
                    let row = line
                        .split(',')
                        .map(|c| c.parse::<f64>())
                        .collect::<std::result::Result<Vec<f64>, _>>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                    if row.len() != cols.len() {
                        return Err(Error::Parse(format!(
                            "line {}: {} cells, expected {}",
                            lineno + 1,
                            row.len(),
                            cols.len()
                        )));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns.ok_or_else(|| Error::Parse("missing column header".into()))?;
        Ok(CsvTable { meta, columns, rows })
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn meta_num<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.meta_value(key)
            .ok_or_else(|| Error::Parse(format!("missing metadata `{key}`")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad metadata `{key}`")))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Provenance lines shared by every export.
pub fn provenance(
    kind: &str,
    fp: &FamilyParams,
    ode: Option<&OdeSettings>,
    quad: &QuadratureSettings,
) -> Vec<(String, String)> {
    let mut meta = vec![
        ("rcatenoid".to_string(), kind.to_string()),
        ("version".into(), VERSION.into()),
        ("n".into(), fp.n().to_string()),
        ("r".into(), fp.r().to_string()),
        ("q".into(), fmt_num(fp.q())),
        ("quad_rel_tol".into(), fmt_num(quad.rel_tol)),
        ("quad_abs_tol".into(), fmt_num(quad.abs_tol)),
    ];
    if let Some(ode) = ode {
        meta.push(("ode_rel_tol".into(), fmt_num(ode.rel_tol)));
        meta.push(("ode_abs_tol".into(), fmt_num(ode.abs_tol)));
        meta.push(("f_cap".into(), fmt_num(ode.f_cap)));
    }
    meta
}

/// Upper half of a profile at `n_t + 1` heights, each an accepted ODE step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSamples {
    pub family: FamilyParams,
    pub a: f64,
    pub l_estimate: f64,
    pub ode: OdeSettings,
    pub quad: QuadratureSettings,
    pub points: Vec<ProfilePoint>,
}

/// Relative distance to the blow-up height kept by [`sample_profile`]. Near
/// `L(a)` the radius is so sensitive to `t` that two integrations with
/// different step sequences no longer agree.
pub const END_MARGIN: f64 = 1e-4;

/// Samples equally spaced in Euclidean arclength of the ball-model profile
/// `(tanh(f/2), t)`, ending at the last accepted step below `f_cap` and
/// below `(1 - END_MARGIN) L(a)`.
pub fn sample_profile(
    fp: &FamilyParams,
    a: f64,
    n_t: usize,
    ode: &OdeSettings,
    quad: &QuadratureSettings,
) -> Result<ProfileSamples> {
    if n_t < 1 {
        return Err(Error::domain("n_t must be at least 1"));
    }
    let curve = integrate_profile(fp, a, ode, quad)?;
    let t_end = (1.0 - END_MARGIN) * curve.l_estimate;
    let keep = curve.samples.partition_point(|p| p.f < ode.f_cap && p.t <= t_end);
    let below = &curve.samples[..keep];
    if below.len() < 2 {
        return Err(Error::domain("too few accepted steps before the sampling end"));
    }
    let mut arc = vec![0.0];
    for w in below.windows(2) {
        let dx = (0.5 * w[1].f).tanh() - (0.5 * w[0].f).tanh();
        let dt = w[1].t - w[0].t;
        arc.push(arc.last().unwrap() + dx.hypot(dt));
    }
    let total = *arc.last().unwrap();
    let mut times = Vec::with_capacity(n_t + 1);
    let mut seg = 0;
    for k in 0..=n_t {
        let t = if k == 0 {
            0.0
        } else if k == n_t {
            below.last().unwrap().t
        } else {
            let target = total * k as f64 / n_t as f64;
            while arc[seg + 1] < target {
                seg += 1;
            }
            let frac = (target - arc[seg]) / (arc[seg + 1] - arc[seg]);
            below[seg].t + frac * (below[seg + 1].t - below[seg].t)
        };
        if times.last().is_none_or(|&last| t > last) {
            times.push(t);
        }
    }
    if times.len() != n_t + 1 {
        return Err(Error::domain(format!(
            "only {} distinct heights for n_t = {n_t}; lower n_t",
            times.len()
        )));
    }
    let points = integrate_profile_at(fp, a, &times, ode)?;
    Ok(ProfileSamples {
        family: *fp,
        a,
        l_estimate: curve.l_estimate,
        ode: *ode,
        quad: *quad,
        points,
    })
}

impl ProfileSamples {
    /// Both halves, `t` ascending, with `2 n_t + 1` points.
    pub fn mirrored(&self) -> Vec<ProfilePoint> {
        let lower = self.points.iter().skip(1).rev().map(|p| ProfilePoint {
            t: -p.t,
            f_t: -p.f_t,
            ..*p
        });
        lower.chain(self.points.iter().copied()).collect()
    }

    fn meta(&self, kind: &str) -> Vec<(String, String)> {
        let mut meta = provenance(kind, &self.family, Some(&self.ode), &self.quad);
        meta.push(("a".into(), fmt_num(self.a)));
        meta.push(("L_estimate".into(), fmt_num(self.l_estimate)));
        meta.push(("n_t".into(), (self.points.len() - 1).to_string()));
        meta
    }

    pub fn to_table(&self) -> CsvTable {
        let n = self.family.n();
        let mut columns: Vec<String> = ["t", "f", "f_t", "f_tt", "k1", "kn"].map(String::from).to_vec();
        columns.extend((1..=n).map(|j| format!("H_{j}")));
        columns.push("first_integral_residual".into());
        let rows = self
            .mirrored()
            .iter()
            .map(|p| {
                let k = principal_curvatures(&self.family, p);
                let mut row = vec![p.t, p.f, p.f_t, p.f_tt, k[0], k[n - 1]];
                row.extend(mean_curvatures(&k));
                row.push(first_integral_residual(&self.family, self.a, p));
                row
            })
            .collect();
        CsvTable {
            meta: self.meta("profile"),
            columns,
            rows,
        }
    }
}

/// Outcome of re-checking a parsed profile CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCheck {
    pub rows: usize,
    pub max_abs_h_r1: f64,
    pub max_residual: f64,
    pub failures: Vec<String>,
}

impl ProfileCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-validates a parsed profile: layout, symmetry, neck data, `H_{r+1} = 0`,
/// the first integral, and consistency of the derived columns.
pub fn check_profile_table(table: &CsvTable) -> Result<ProfileCheck> {
    let n: i64 = table.meta_num("n")?;
    let r: i64 = table.meta_num("r")?;
    let a: f64 = table.meta_num("a")?;
    let fp = FamilyParams::new(n, r)?;
    let n = fp.n();
    if table.columns.len() != 7 + n {
        return Err(Error::Parse(format!("{} columns, expected {}", table.columns.len(), 7 + n)));
    }
    let col = |name: &str| table.column(name).ok_or_else(|| Error::Parse(format!("missing column {name}")));
    let (ct, cf, cft, cftt) = (col("t")?, col("f")?, col("f_t")?, col("f_tt")?);
    let chr = col(&format!("H_{}", fp.r() + 1))?;
    let cres = col("first_integral_residual")?;
    let rows = &table.rows;
    let mut check = ProfileCheck {
        rows: rows.len(),
        max_abs_h_r1: 0.0,
        max_residual: 0.0,
        failures: Vec::new(),
    };
    if rows.len().is_multiple_of(2) {
        check.failures.push("row count is even; expected 2 n_t + 1".into());
        return Ok(check);
    }
    if rows.windows(2).any(|w| !(w[1][ct] > w[0][ct])) {
        check.failures.push("t is not strictly increasing".into());
    }
    let mid = &rows[rows.len() / 2];
    if mid[ct] != 0.0 || mid[cf] != a || mid[cft] != 0.0 {
        check.failures.push(format!("neck row is {:?}", &mid[..3]));
    }
    for i in 0..rows.len() / 2 {
        let (lo, hi) = (&rows[i], &rows[rows.len() - 1 - i]);
        if lo[ct] != -hi[ct] || lo[cf] != hi[cf] || lo[cft] != -hi[cft] {
            check.failures.push(format!("rows at t = ±{} are not mirror images", hi[ct]));
            break;
        }
    }
    for row in rows {
        let p = match ProfilePoint::new(row[ct], row[cf], row[cft], row[cftt]) {
            Ok(p) => p,
            Err(e) => {
                check.failures.push(e.to_string());
                continue;
            }
        };
        check.max_abs_h_r1 = check.max_abs_h_r1.max(row[chr].abs());
        check.max_residual = check.max_residual.max(row[cres].abs());
        let k = principal_curvatures(&fp, &p);
        let mut expected = vec![k[0], k[n - 1]];
        expected.extend(mean_curvatures(&k));
        expected.push(first_integral_residual(&fp, a, &p));
        let stored = &row[4..];
        if expected.iter().zip(stored).any(|(e, s)| e != s) {
            check.failures.push(format!("derived columns disagree at t = {}", p.t));
        }
    }
    if check.max_abs_h_r1 >= IDENTITY_TOLERANCE {
        check.failures.push(format!("|H_{}| reaches {}", fp.r() + 1, check.max_abs_h_r1));
    }
    if check.max_residual >= RESIDUAL_TOLERANCE {
        check.failures.push(format!("first-integral residual reaches {}", check.max_residual));
    }
    Ok(check)
}

/// Surface of revolution for `n = 2` over a `(t, θ)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshData {
    /// `(x1, x2, t)` in the ball model times R.
    pub vertices: Vec<[f64; 3]>,
    /// 0-based quads, counter-clockwise seen from the unit normal.
    pub faces: Vec<[usize; 4]>,
    pub rows: usize,
    pub n_theta: usize,
    meta: Vec<(String, String)>,
}

/// Revolves the sampled profile; θ is uniform on `[0, 2π)` and the last
/// column is joined to the first.
pub fn build_mesh(samples: &ProfileSamples, n_theta: usize) -> Result<MeshData> {
    if samples.family.n() != 2 {
        return Err(Error::domain(format!(
            "mesh export needs n = 2 (got n = {}); use the profile export for higher dimensions",
            samples.family.n()
        )));
    }
    if n_theta < 3 {
        return Err(Error::domain("n_theta must be at least 3"));
    }
    let profile = samples.mirrored();
    let angles: Vec<(f64, f64)> = (0..n_theta)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n_theta as f64;
            (theta.cos(), theta.sin())
        })
        .collect();
    let mut vertices = Vec::with_capacity(profile.len() * n_theta);
    for p in &profile {
        let radius = (0.5 * p.f).tanh();
        for &(c, s) in &angles {
            vertices.push([radius * c, radius * s, p.t]);
        }
    }
    let idx = |i: usize, j: usize| i * n_theta + j % n_theta;
    let mut faces = Vec::with_capacity((profile.len() - 1) * n_theta);
    for i in 0..profile.len() - 1 {
        for j in 0..n_theta {
            // t first, then θ: the face normal points towards the axis
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let mut meta = samples.meta("mesh");
    meta.push(("n_theta".into(), n_theta.to_string()));
    Ok(MeshData {
        vertices,
        faces,
        rows: profile.len(),
        n_theta,
        meta,
    })
}

impl MeshData {
    pub fn write_obj<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k} = {v}")?;
        }
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", fmt_num(v[0]), fmt_num(v[1]), fmt_num(v[2]))?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_obj(&mut buf).expect("writing to memory");
        buf
    }

    /// Largest `|x|` over all vertices.
    pub fn max_ball_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max)
    }
}

/// Vertices and 0-based face index lists.
pub type ObjContents = (Vec<[f64; 3]>, Vec<Vec<usize>>);

/// Vertices and faces read back from OBJ text.
pub fn parse_obj(text: &str) -> Result<ObjContents> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for line in text.lines() {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Parse(format!("vertex: {e}")))?;
                if c.len() != 3 {
                    return Err(Error::Parse(format!("vertex with {} coordinates", c.len())));
                }
                vertices.push([c[0], c[1], c[2]]);
            }
            Some("f") => {
                let f: Vec<usize> = parts
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Parse(format!("face: {e}")))?;
                faces.push(f);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}
