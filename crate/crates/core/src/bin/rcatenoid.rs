//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rcatenoid::analysis::{
    count_bvp_scan, count_bvp_solutions, envelope_curve, height_threshold_t,
    profile_intersections,
};
use rcatenoid::curvature::{cylinder_case, verify_hj_signs};
use rcatenoid::export::{build_mesh, fmt_num, provenance, sample_profile, CsvTable};
use rcatenoid::quadrature::{half_height, half_height_derivative};
use rcatenoid::solve::log_grid;
use rcatenoid::verify::run_verification_suite;
use rcatenoid::{Error, Regime, Result, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "rcatenoid", version)]
#[command(about = "Catenoids with vanishing (r+1)-th mean curvature in H^n x R")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config file; flags given here override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Ambient dimension of H^n.
    #[arg(short, long, global = true)]
    n: Option<i64>,

    /// Curvature order: the family has H_{r+1} = 0.
    #[arg(short, long, global = true)]
    r: Option<i64>,

    /// Directory for output files.
    #[arg(long, global = true, env = "RCATENOID_OUT_DIR")]
    out_dir: Option<PathBuf>,

    /// Relative tolerance of the height quadrature.
    #[arg(long, global = true)]
    quad_rel_tol: Option<f64>,

    /// Absolute tolerance of the height quadrature.
    #[arg(long, global = true)]
    quad_abs_tol: Option<f64>,

    /// Relative tolerance of the profile ODE.
    #[arg(long, global = true)]
    ode_rel_tol: Option<f64>,

    /// Absolute tolerance of the profile ODE.
    #[arg(long, global = true)]
    ode_abs_tol: Option<f64>,

    /// Radius at which profile integration stops.
    #[arg(long, global = true)]
    f_cap: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the profile of one catenoid as CSV (both halves).
    Profile {
        /// Neck radius.
        #[arg(long)]
        a: Option<f64>,
        /// Samples per half profile.
        #[arg(long)]
        n_t: Option<usize>,
        /// Output file, relative to the output directory [default: profile.csv].
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Half-height L(a) and dL/da for one or more necks.
    Length {
        /// Neck radius; repeat for several.
        #[arg(long)]
        a: Vec<f64>,
        /// Output file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// L and dL/da over a logarithmic grid of necks.
    Sweep {
        #[arg(long)]
        a_min: Option<f64>,
        #[arg(long)]
        a_max: Option<f64>,
        #[arg(long)]
        a_count: Option<usize>,
        /// Output file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count the catenoids through the circles of radius R at heights ±t0.
    Bvp {
        #[arg(long)]
        t0: Option<f64>,
        /// Circle radius R.
        #[arg(long)]
        radius: Option<f64>,
        /// Answer heights t0 >= T by grid scan instead of failing.
        #[arg(long)]
        allow_unvalidated: bool,
        /// Output file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minimal radius m(t) over the family on a grid of heights in (0, T).
    Envelope {
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        t_count: Option<usize>,
        /// Output file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Crossing of the profiles with necks a and b.
    Intersect {
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        /// Output file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sign pattern of H_j along a catenoid (or the cylinder for n = r + 1).
    Curvature {
        /// Neck radius, or the cylinder radius when n = r + 1.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        n_samples: Option<usize>,
        /// Output file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Revolve the profile into an OBJ mesh (n = 2 only).
    Mesh {
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        n_t: Option<usize>,
        #[arg(long)]
        n_theta: Option<usize>,
        /// Output file, relative to the output directory [default: mesh.obj].
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every acceptance check and write a JSON report.
    Verify {
        /// Report zero for all runtimes so reports are byte-identical.
        #[arg(long)]
        no_timings: bool,
        /// Override the first-integral tolerance.
        #[arg(long)]
        conservation_tol: Option<f64>,
        /// Output file, relative to the output directory [default: verify_report.json].
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.n, common.n);
    set(&mut cfg.r, common.r);
    set(&mut cfg.output.dir, common.out_dir.clone());
    set(&mut cfg.quadrature.rel_tol, common.quad_rel_tol);
    set(&mut cfg.quadrature.abs_tol, common.quad_abs_tol);
    set(&mut cfg.ode.rel_tol, common.ode_rel_tol);
    set(&mut cfg.ode.abs_tol, common.ode_abs_tol);
    set(&mut cfg.ode.f_cap, common.f_cap);
    Ok(cfg)
}

fn apply_command(cfg: &mut RunConfig, cmd: &Command) {
    match cmd {
        Command::Profile { a, n_t, .. } => {
            cfg.a = a.or(cfg.a);
            set(&mut cfg.grid.n_t, *n_t);
        }
        Command::Length { a, .. } => {
            if !a.is_empty() {
                cfg.a_list = Some(a.clone());
            }
        }
        Command::Sweep { a_min, a_max, a_count, .. } => {
            set(&mut cfg.grid.a_min, *a_min);
            set(&mut cfg.grid.a_max, *a_max);
            set(&mut cfg.grid.a_count, *a_count);
        }
        Command::Bvp { t0, radius, .. } => {
            cfg.t0 = t0.or(cfg.t0);
            cfg.radius = radius.or(cfg.radius);
        }
        Command::Envelope { t_min, t_max, t_count, .. } => {
            cfg.grid.t_min = t_min.or(cfg.grid.t_min);
            cfg.grid.t_max = t_max.or(cfg.grid.t_max);
            set(&mut cfg.grid.t_count, *t_count);
        }
        Command::Intersect { a, b, .. } => {
            cfg.a = a.or(cfg.a);
            cfg.b = b.or(cfg.b);
        }
        Command::Curvature { a, n_samples, .. } => {
            cfg.a = a.or(cfg.a);
            set(&mut cfg.grid.n_samples, *n_samples);
        }
        Command::Mesh { a, n_t, n_theta, .. } => {
            cfg.a = a.or(cfg.a);
            set(&mut cfg.grid.n_t, *n_t);
            set(&mut cfg.grid.n_theta, *n_theta);
        }
        Command::Verify { no_timings, conservation_tol, .. } => {
            if *no_timings {
                cfg.output.timings = false;
            }
            set(&mut cfg.verify.conservation, *conservation_tol);
        }
    }
}

fn resolve(cfg: &RunConfig, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        cfg.output.dir.join(path)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Writes to `output` under the output directory, or to stdout.
fn emit(cfg: &RunConfig, output: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(p) => {
            let path = resolve(cfg, p);
            write_file(&path, bytes)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => std::io::stdout().write_all(bytes).map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn emit_default(cfg: &RunConfig, output: &Option<PathBuf>, default: &str, bytes: &[u8]) -> Result<()> {
    let target = output.clone().unwrap_or_else(|| PathBuf::from(default));
    emit(cfg, &Some(target), bytes)
}

fn json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s.into_bytes()
}

fn length_table(cfg: &RunConfig, necks: &[f64], kind: &str) -> Result<CsvTable> {
    use rayon::prelude::*;
    let fp = cfg.family()?;
    let q = &cfg.quadrature;
    let rows = necks
        .par_iter()
        .map(|&a| {
            let l = half_height(&fp, a, q)?;
            let d = half_height_derivative(&fp, a, q)?;
            Ok(vec![a, l.value, l.error_estimate, d.value, d.error_estimate])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CsvTable {
        meta: provenance(kind, &fp, None, q),
        columns: ["a", "L", "L_error", "dL_da", "dL_da_error"].map(String::from).to_vec(),
        rows,
    })
}

/// Returns the process exit code for a successful run.
fn run(cli: Cli) -> Result<u8> {
    let mut cfg = load_config(&cli.common)?;
    apply_command(&mut cfg, &cli.command);
    cfg.validate()?;
    let fp = cfg.family()?;
    match &cli.command {
        Command::Profile { output, .. } => {
            let samples = sample_profile(&fp, cfg.require_a()?, cfg.grid.n_t, &cfg.ode, &cfg.quadrature)?;
            emit_default(&cfg, output, "profile.csv", &samples.to_table().to_bytes())?;
        }
        Command::Length { output, .. } => {
            let necks = match (&cfg.a_list, cfg.a) {
                (Some(list), _) if !list.is_empty() => list.clone(),
                (_, Some(a)) => vec![a],
                _ => return Err(Error::Domain("length needs at least one --a".into())),
            };
            emit(&cfg, output, &length_table(&cfg, &necks, "length")?.to_bytes())?;
        }
        Command::Sweep { output, .. } => {
            let g = &cfg.grid;
            let necks = log_grid(g.a_min, g.a_max, g.a_count);
            emit(&cfg, output, &length_table(&cfg, &necks, "sweep")?.to_bytes())?;
        }
        Command::Bvp {
            allow_unvalidated,
            output,
            ..
        } => {
            let t0 = cfg.require_t0()?;
            let radius = cfg
                .radius
                .ok_or_else(|| Error::Domain("bvp needs a circle radius (--radius)".into()))?;
            let result = match count_bvp_solutions(&fp, t0, radius, &cfg.quadrature) {
                Err(Error::UnvalidatedRegime { .. }) if *allow_unvalidated => {
                    count_bvp_scan(&fp, t0, radius, &cfg.quadrature)?
                }
                other => other?,
            };
            emit(&cfg, output, &json(&result))?;
        }
        Command::Envelope { output, .. } => {
            let threshold = height_threshold_t(&fp, &cfg.quadrature)?;
            let g = &cfg.grid;
            let lo = g.t_min.unwrap_or(threshold / (g.t_count + 1) as f64);
            let hi = g.t_max.unwrap_or(threshold * g.t_count as f64 / (g.t_count + 1) as f64);
            if !(lo > 0.0 && hi < threshold && lo <= hi) {
                return Err(Error::Domain(format!(
                    "height range [{lo}, {hi}] must lie in (0, T) with T = {threshold}"
                )));
            }
            let grid: Vec<f64> = if g.t_count == 1 {
                vec![lo]
            } else {
                (0..g.t_count)
                    .map(|i| lo + (hi - lo) * i as f64 / (g.t_count - 1) as f64)
                    .collect()
            };
            let samples = envelope_curve(&fp, &grid, &cfg.quadrature)?;
            let mut rows = Vec::new();
            for s in samples.iter().rev().chain(samples.iter()) {
                let sign = if rows.len() < samples.len() { -1.0 } else { 1.0 };
                let (m, a_star, ok) = match &s.point {
                    Ok(p) => (p.m, p.a_star, 1.0),
                    Err(e) => {
                        eprintln!("t = {}: {e}", s.t);
                        (f64::NAN, f64::NAN, 0.0)
                    }
                };
                rows.push(vec![sign * s.t, m, a_star, s.tangency.unwrap_or(f64::NAN), ok]);
            }
            let mut meta = provenance("envelope", &fp, None, &cfg.quadrature);
            meta.push(("T".into(), fmt_num(threshold)));
            let table = CsvTable {
                meta,
                columns: ["t", "m", "a_star", "tangency", "ok"].map(String::from).to_vec(),
                rows,
            };
            emit(&cfg, output, &table.to_bytes())?;
        }
        Command::Intersect { output, .. } => {
            let a = cfg.require_a()?;
            let b = cfg.b.ok_or_else(|| Error::Domain("intersect needs a second neck (--b)".into()))?;
            let crossings = profile_intersections(&fp, a, b, &cfg.quadrature)?;
            let mut meta = provenance("intersect", &fp, None, &cfg.quadrature);
            meta.push(("a".into(), fmt_num(a)));
            meta.push(("b".into(), fmt_num(b)));
            let rows = crossings
                .iter()
                .flat_map(|c| [vec![c.rho, -c.t, c.residual], vec![c.rho, c.t, c.residual]])
                .collect();
            let table = CsvTable {
                meta,
                columns: ["rho", "t", "residual"].map(String::from).to_vec(),
                rows,
            };
            emit(&cfg, output, &table.to_bytes())?;
        }
        Command::Curvature { output, .. } => {
            let a = cfg.require_a()?;
            if fp.regime() == Regime::Cylinder {
                let rep = cylinder_case(&fp, a)?;
                emit(&cfg, output, &json(&rep))?;
                return Ok(if rep.pass { 0 } else { 1 });
            }
            let rep = verify_hj_signs(&fp, a, cfg.grid.n_samples, &cfg.ode, &cfg.quadrature)?;
            emit(&cfg, output, &json(&rep))?;
            return Ok(if rep.pass { 0 } else { 1 });
        }
        Command::Mesh { output, .. } => {
            if fp.n() != 2 {
                return Err(Error::Domain(format!(
                    "mesh export is for n = 2 only (got n = {}); use `profile` for the generating curve",
                    fp.n()
                )));
            }
            let samples = sample_profile(&fp, cfg.require_a()?, cfg.grid.n_t, &cfg.ode, &cfg.quadrature)?;
            let mesh = build_mesh(&samples, cfg.grid.n_theta)?;
            emit_default(&cfg, output, "mesh.obj", &mesh.to_bytes())?;
        }
        Command::Verify { output, .. } => {
            let report = run_verification_suite(&cfg);
            for c in &report.checks {
                let measured = c.measured.map_or("error".to_string(), |m| format!("{m:e}"));
                eprintln!(
                    "[{}] {:<36} measured {:<24} tolerance {:e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    measured,
                    c.tolerance
                );
            }
            emit_default(&cfg, output, "verify_report.json", report.to_json().as_bytes())?;
            return Ok(if report.summary.pass { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
