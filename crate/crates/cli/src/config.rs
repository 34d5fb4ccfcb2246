//! Run configuration, read from a single JSON document.
//!
//! Every section is optional and unknown keys are rejected.

use std::path::{Path, PathBuf};

use qmeas::survival::SurvivalDistribution;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub constants: Constants,
    pub packet: Packet,
    pub survival: Survival,
    pub grid: Grid,
    pub position: Position,
    pub output: Output,
    pub measure: Measure,
    pub fig1: Fig1,
    pub asymptotics: Asymptotics,
    pub scattering: Scattering,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    pub hbar: f64,
    pub m: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { hbar: 1.0, m: 1.0 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Packet {
    pub a: f64,
    pub p0: f64,
}

impl Default for Packet {
    fn default() -> Self {
        Self { a: 1.0, p0: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SurvivalKind {
    #[default]
    Exponential,
    Gamma,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Survival {
    pub kind: SurvivalKind,
    /// 0 selects the ideal measurement.
    pub tau: f64,
    pub s: f64,
    pub tau0: Option<f64>,
}

impl Default for Survival {
    fn default() -> Self {
        Self { kind: SurvivalKind::Exponential, tau: 0.0, s: 1.0, tau0: None }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    /// Momentum cell edge; defaults to b/10.
    pub epsilon: Option<f64>,
    /// Cells per side; defaults to the smallest grid reaching the coverage.
    pub n: Option<i64>,
    /// Coverage around p₀ in units of b.
    pub coverage: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self { epsilon: None, n: None, coverage: 6.0 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Position {
    /// Table range ±half_width·a.
    pub half_width: f64,
    /// Table step in units of a.
    pub step: f64,
    /// Include the cell-sum density column.
    pub exact: bool,
}

impl Default for Position {
    fn default() -> Self {
        Self { half_width: 8.0, step: 0.05, exact: true }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub precision: usize,
}

impl Default for Output {
    fn default() -> Self {
        Self { format: Format::Csv, path: None, precision: 15 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Measure {
    pub fixture: Option<PathBuf>,
    /// Eigenvalues closer than this are merged into one outcome.
    pub cluster_tol: f64,
    /// Free evolution after detection, applied to the post-measurement states.
    pub wait: f64,
}

impl Default for Measure {
    fn default() -> Self {
        Self { fixture: None, cluster_tol: 1e-9, wait: 0.0 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Fig1 {
    pub eps0: Vec<f64>,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_step: f64,
}

impl Default for Fig1 {
    fn default() -> Self {
        Self { eps0: vec![0.0, 0.1, 0.2], xi_min: -3.0, xi_max: 3.0, xi_step: 0.01 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Asymptotics {
    pub sigma: Vec<f64>,
}

impl Default for Asymptotics {
    fn default() -> Self {
        Self { sigma: vec![4.0, 9.0, 16.0, 25.0, 36.0, 64.0, 100.0] }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Scattering {
    pub model: Option<PathBuf>,
    /// Damping values; defaults to {1e−2, 1e−3, 1e−4} × spread(H)/ħ.
    pub nu: Option<Vec<f64>>,
    pub times: Vec<f64>,
    pub probe: Probe,
}

impl Default for Scattering {
    fn default() -> Self {
        Self { model: None, nu: None, times: vec![0.0, 1.0, 7.0], probe: Probe::default() }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Probe {
    pub levels: usize,
    pub spacing: f64,
    pub coupling: f64,
    pub epsilons: Vec<f64>,
    pub nus: Vec<f64>,
}

impl Default for Probe {
    fn default() -> Self {
        let band = qmeas::scattering::BandFamily::default();
        Self {
            levels: band.levels,
            spacing: band.spacing,
            coupling: band.coupling,
            epsilons: vec![0.4, 0.2, 0.1, 0.05],
            nus: vec![0.1, 0.05],
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fixture paths are relative to the config file.
    fn resolve_paths(&mut self, dir: &Path) {
        for p in [&mut self.measure.fixture, &mut self.scattering.model] {
            if let Some(path) = p.as_mut() {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("constants.hbar", self.constants.hbar)?;
        positive("constants.m", self.constants.m)?;
        positive("packet.a", self.packet.a)?;
        if !self.packet.p0.is_finite() {
            return Err(CliError::Config("packet.p0 must be finite".into()));
        }
        let sv = &self.survival;
        if !(sv.tau >= 0.0) || !sv.tau.is_finite() {
            return Err(CliError::Config(format!("survival.tau must be >= 0, got {}", sv.tau)));
        }
        if !(sv.s >= 1.0) || !sv.s.is_finite() {
            return Err(CliError::Config(format!("survival.s must be >= 1, got {}", sv.s)));
        }
        if sv.kind == SurvivalKind::Exponential && sv.s != 1.0 {
            return Err(CliError::Config("survival.s must be 1 for the exponential kind".into()));
        }
        if let Some(t0) = sv.tau0 {
            if !(t0 > sv.tau) {
                return Err(CliError::Config(format!("survival.tau0 must exceed tau, got {t0}")));
            }
        }
        if let Some(e) = self.grid.epsilon {
            positive("grid.epsilon", e)?;
        }
        if let Some(n) = self.grid.n {
            if n < 0 {
                return Err(CliError::Config(format!("grid.n must be >= 0, got {n}")));
            }
        }
        positive("grid.coverage", self.grid.coverage)?;
        positive("position.half_width", self.position.half_width)?;
        positive("position.step", self.position.step)?;
        if !(1..=17).contains(&self.output.precision) {
            return Err(CliError::Config(format!("output.precision must be in 1..=17, got {}", self.output.precision)));
        }
        if !(self.measure.wait >= 0.0) {
            return Err(CliError::Config("measure.wait must be >= 0".into()));
        }
        positive("measure.cluster_tol", self.measure.cluster_tol)?;
        let f = &self.fig1;
        if f.eps0.iter().any(|e| !(*e >= 0.0)) {
            return Err(CliError::Config("fig1.eps0 entries must be >= 0".into()));
        }
        positive("fig1.xi_step", f.xi_step)?;
        if !(f.xi_max > f.xi_min) {
            return Err(CliError::Config("fig1.xi_max must exceed xi_min".into()));
        }
        if self.asymptotics.sigma.iter().any(|s| !(*s > 1.0) || !s.is_finite()) {
            return Err(CliError::Config("asymptotics.sigma entries must exceed 1".into()));
        }
        if let Some(nus) = &self.scattering.nu {
            for &v in nus {
                positive("scattering.nu", v)?;
            }
        }
        let p = &self.scattering.probe;
        positive("scattering.probe.spacing", p.spacing)?;
        if p.levels == 0 || p.levels % 2 != 0 {
            return Err(CliError::Config("scattering.probe.levels must be even and positive".into()));
        }
        for &v in &p.nus {
            positive("scattering.probe.nus", v)?;
        }
        if p.epsilons.iter().any(|e| !(*e >= 0.0)) {
            return Err(CliError::Config("scattering.probe.epsilons must be >= 0".into()));
        }
        Ok(())
    }

    pub fn distribution(&self) -> Result<SurvivalDistribution> {
        let sv = &self.survival;
        let d = if sv.tau == 0.0 {
            SurvivalDistribution::ideal()
        } else {
            match sv.kind {
                SurvivalKind::Exponential => SurvivalDistribution::exponential(sv.tau)?,
                SurvivalKind::Gamma => SurvivalDistribution::gamma(sv.tau, sv.s)?,
            }
        };
        match sv.tau0 {
            Some(t0) if sv.tau > 0.0 => Ok(d.with_cutoff(t0)?),
            _ => Ok(d),
        }
    }
}
