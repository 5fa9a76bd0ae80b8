//! Run configuration: a JSON document whose every key may be left out and
//! filled from command-line flags, then resolved into validated inputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lamb::{ShiftOptions, DEFAULT_SERIES_TOL};
use crate::model::SystemParams;
use crate::quadrature::PvConfig;
use crate::spectral::{BathSpec, SpectralKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LambMode {
    On,
    Off,
    #[default]
    Both,
}

impl std::str::FromStr for LambMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            "both" => Ok(Self::Both),
            other => Err(Error::Config(format!("unknown lamb mode `{other}` (expected on, off or both)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_variable")]
    pub variable: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: GridScale,
}

fn default_variable() -> String {
    "dT".to_string()
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.variable != "dT" {
            return Err(Error::Config(format!(
                "only the dT sweep variable is supported, got `{}`",
                self.variable
            )));
        }
        if !(self.min >= 0.0) || !self.max.is_finite() || self.max < self.min {
            return Err(Error::Config(format!(
                "sweep range must satisfy 0 <= min <= max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::Config(format!("sweep needs at least 2 points, got {}", self.points)));
        }
        if self.scale == GridScale::Log && !(self.min > 0.0) {
            return Err(Error::Config("log sweep needs min > 0".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                let f = i as f64 / last;
                match self.scale {
                    GridScale::Linear => self.min + (self.max - self.min) * f,
                    GridScale::Log => (self.min.ln() + (self.max / self.min).ln() * f).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub g: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub temperature: Option<f64>,
    pub gamma: Option<f64>,
    pub omega_d: Option<f64>,
    pub kind: Option<SpectralKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub series_tol: Option<f64>,
    pub quad_rel_tol: Option<f64>,
}

/// Everything optional; see [`RunConfig::resolve`] for what is required.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub bath1: BathSection,
    #[serde(default)]
    pub bath2: BathSection,
    /// `T₂ − T₁`; takes precedence over `bath2.temperature`.
    pub dt: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub lamb: Option<LambMode>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
}

/// Values given on the command line. Unset fields leave the file's value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub g: Option<f64>,
    pub t1: Option<f64>,
    pub dt: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    /// Applied to both baths.
    pub omega_d: Option<f64>,
    /// Applied to both baths.
    pub kind: Option<SpectralKind>,
    pub lamb: Option<LambMode>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub system: SystemParams,
    pub baths: Option<[BathSpec; 2]>,
    pub sweep: Option<SweepSpec>,
    pub lamb: LambMode,
    pub shift: ShiftOptions,
    pub output: Option<PathBuf>,
    /// True when `eps1 < eps2` was given and the qubit (and bath) labels were
    /// exchanged.
    pub swapped: bool,
}

impl Resolved {
    pub fn baths(&self) -> Result<[BathSpec; 2]> {
        self.baths.ok_or_else(|| {
            Error::Config("bath parameters missing: need t1, gamma1 (or gamma2) and omega_d".into())
        })
    }

    /// Baths with bath 1 at its configured temperature and bath 2 at `T₁ + dt`.
    pub fn baths_at(&self, dt: f64) -> Result<[BathSpec; 2]> {
        let [b1, b2] = self.baths()?;
        let hot = if self.swapped { 0 } else { 1 };
        let mut out = [b1, b2];
        let cold_t = out[1 - hot].temperature;
        out[hot] = out[hot].with_temperature(cold_t + dt);
        out[hot].validate()?;
        Ok(out)
    }
}

fn missing(name: &str) -> Error {
    Error::Config(format!("missing required parameter `{name}`"))
}

impl RunConfig {
    pub fn from_path(path: &Path) -> std::result::Result<Self, ConfigLoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigLoadError::Io(path.to_path_buf(), e))?;
        serde_json::from_str(&text).map_err(|e| ConfigLoadError::Parse(path.to_path_buf(), e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
            if value.is_some() {
                slot.clone_from(value);
            }
        }
        set(&mut self.system.eps1, &o.eps1);
        set(&mut self.system.eps2, &o.eps2);
        set(&mut self.system.g, &o.g);
        set(&mut self.bath1.temperature, &o.t1);
        set(&mut self.dt, &o.dt);
        set(&mut self.bath1.gamma, &o.gamma1);
        set(&mut self.bath2.gamma, &o.gamma2);
        set(&mut self.bath1.omega_d, &o.omega_d);
        set(&mut self.bath2.omega_d, &o.omega_d);
        set(&mut self.bath1.kind, &o.kind);
        set(&mut self.bath2.kind, &o.kind);
        set(&mut self.lamb, &o.lamb);
        set(&mut self.output, &o.output);
    }

    /// Validates and fills defaults. Bath 2 inherits `gamma`, `omega_d` and
    /// `kind` from bath 1 when not given, and its temperature is `T₁ + dt`
    /// (`dt` defaults to 0). Baths are optional as a whole: they are resolved
    /// only if a temperature is present.
    pub fn resolve(&self) -> Result<Resolved> {
        let eps1 = self.system.eps1.ok_or_else(|| missing("eps1"))?;
        let eps2 = self.system.eps2.ok_or_else(|| missing("eps2"))?;
        let g = self.system.g.ok_or_else(|| missing("g"))?;
        let given = SystemParams::new(eps1, eps2, g)?;
        let (system, swapped) = given.normalized();

        let baths = match self.bath1.temperature {
            None => None,
            Some(t1) => {
                let gamma1 = self.bath1.gamma.or(self.bath2.gamma).ok_or_else(|| missing("gamma1"))?;
                let gamma2 = self.bath2.gamma.unwrap_or(gamma1);
                let wd1 = self.bath1.omega_d.or(self.bath2.omega_d).ok_or_else(|| missing("omega_d"))?;
                let wd2 = self.bath2.omega_d.unwrap_or(wd1);
                let kind1 = self.bath1.kind.or(self.bath2.kind).unwrap_or(SpectralKind::Drude);
                let kind2 = self.bath2.kind.unwrap_or(kind1);
                let t2 = match (self.dt, self.bath2.temperature) {
                    (Some(dt), _) => t1 + dt,
                    (None, Some(t2)) => t2,
                    (None, None) => t1,
                };
                let b1 = BathSpec::new(t1, gamma1, wd1, kind1)?;
                let b2 = BathSpec::new(t2, gamma2, wd2, kind2)?;
                Some(if swapped { [b2, b1] } else { [b1, b2] })
            }
        };

        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        let series_tol = self.tolerances.series_tol.unwrap_or(DEFAULT_SERIES_TOL);
        let quad_rel_tol = self.tolerances.quad_rel_tol.unwrap_or(PvConfig::default().rel_tol);
        crate::error::require_positive("series_tol", series_tol)?;
        crate::error::require_positive("quad_rel_tol", quad_rel_tol)?;

        Ok(Resolved {
            system,
            baths,
            sweep: self.sweep.clone(),
            lamb: self.lamb.unwrap_or_default(),
            shift: ShiftOptions {
                series_tol,
                pv: PvConfig::default().with_rel_tol(quad_rel_tol),
                ..ShiftOptions::default()
            },
            output: self.output.clone(),
            swapped,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigLoadError {
    #[error("cannot read config {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid config {0}: {1}")]
    Parse(PathBuf, String),
}
