//! Run configuration read from TOML. Command-line flags are applied on top
//! of the file, which is applied on top of [`RunConfig::default`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::FamilyParams;
use crate::profile::OdeSettings;
use crate::quadrature::QuadratureSettings;
use crate::verify::VerifyTolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_t: usize,
    pub n_theta: usize,
    pub n_samples: usize,
    pub a_min: f64,
    pub a_max: f64,
    pub a_count: usize,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_t: 200,
            n_theta: 128,
            n_samples: 100,
            a_min: 0.05,
            a_max: 10.0,
            a_count: 50,
            t_min: None,
            t_max: None,
            t_count: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Wall-clock times in the verification report; off gives reproducible bytes.
    pub timings: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("."),
            timings: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: i64,
    pub r: i64,
    pub a: Option<f64>,
    pub a_list: Option<Vec<f64>>,
    pub b: Option<f64>,
    pub t0: Option<f64>,
    pub radius: Option<f64>,
    pub grid: GridConfig,
    pub quadrature: QuadratureSettings,
    pub ode: OdeSettings,
    pub verify: VerifyTolerances,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 4,
            r: 1,
            a: None,
            a_list: None,
            b: None,
            t0: None,
            radius: None,
            grid: GridConfig::default(),
            quadrature: QuadratureSettings::default(),
            ode: OdeSettings::default(),
            verify: VerifyTolerances::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn family(&self) -> Result<FamilyParams> {
        FamilyParams::new(self.n, self.r)
    }

    /// Checks everything that does not depend on the subcommand.
    pub fn validate(&self) -> Result<()> {
        self.family()?;
        self.quadrature.validate()?;
        self.ode.validate()?;
        let g = &self.grid;
        if g.n_t == 0 || g.n_theta < 3 || g.n_samples < 2 || g.a_count < 2 || g.t_count == 0 {
            return Err(Error::domain("grid counts: need n_t >= 1, n_theta >= 3, n_samples >= 2, a_count >= 2, t_count >= 1"));
        }
        if !(g.a_min > 0.0 && g.a_max > g.a_min) {
            return Err(Error::domain(format!(
                "a-range [{}, {}] must satisfy 0 < a_min < a_max",
                g.a_min, g.a_max
            )));
        }
        for (name, v) in [("a", self.a), ("b", self.b), ("radius", self.radius)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::domain(format!("{name} = {v} must be positive")));
                }
            }
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0) {
                return Err(Error::domain(format!("t0 = {t0} must be positive")));
            }
        }
        Ok(())
    }

    pub fn require_a(&self) -> Result<f64> {
        self.a.ok_or_else(|| Error::domain("this command needs a neck radius (--a)"))
    }

    pub fn require_t0(&self) -> Result<f64> {
        self.t0.ok_or_else(|| Error::domain("this command needs a height (--t0)"))
    }
}
