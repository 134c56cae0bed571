//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use lrgap::ed::MAX_SITES;
use lrgap::response::{ProtocolKind, QuenchProtocol};
use lrgap::spectral::{NoiseFloor, SpectrumOptions, Window};
use lrgap::series::TimeGrid;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_VAR: &str = "LRGAP_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Tfim,
    Lrk,
    Longitudinal,
    LongRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    #[default]
    Mx,
    Mzz,
    Nf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default = "one")]
    pub j: f64,
    /// Transverse coupling (tfim, longitudinal, long_range).
    pub g: Option<f64>,
    /// Pre-quench longitudinal field (longitudinal).
    pub h: Option<f64>,
    /// Chemical potential (lrk).
    pub mu: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Interaction decay exponent (long_range).
    pub r: Option<f64>,
    pub observable: Option<ObservableKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default = "sudden")]
    pub kind: ProtocolKind,
    /// `δg`, `δh`, or `δμ` (in units of J) depending on the model.
    pub amplitude: f64,
    #[serde(default)]
    pub drive_frequency: f64,
    #[serde(default)]
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub duration: f64,
    pub samples: usize,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FloorKind {
    #[default]
    Relative,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub window: Window,
    #[serde(default = "default_floor")]
    pub noise_floor: f64,
    #[serde(default)]
    pub floor_kind: FloorKind,
    #[serde(default = "one_usize")]
    pub zero_pad: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            window: Window::None,
            noise_floor: default_floor(),
            floor_kind: FloorKind::Relative,
            zero_pad: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default)]
    pub with_oracle: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_dir(), with_oracle: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub protocol: ProtocolConfig,
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn sudden() -> ProtocolKind {
    ProtocolKind::Sudden
}

fn default_floor() -> f64 {
    lrgap::spectral::DEFAULT_NOISE_FLOOR
}

fn default_dir() -> PathBuf {
    PathBuf::from("lrgap-out")
}

fn bad(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

fn require(key: &str, v: Option<f64>) -> Result<f64, CliError> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => Err(bad(key, format!("must be finite, got {x}"))),
        None => Err(bad(key, "required for this model")),
    }
}

fn forbid(key: &str, v: Option<f64>, kind: ModelKind) -> Result<(), CliError> {
    match v {
        Some(_) => Err(bad(key, format!("not a parameter of model {kind:?}"))),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn is_ed(&self) -> bool {
        matches!(self.model.kind, ModelKind::Longitudinal | ModelKind::LongRange)
    }

    pub fn observable(&self) -> ObservableKind {
        match self.model.kind {
            ModelKind::Lrk => ObservableKind::Nf,
            ModelKind::Tfim => self.model.observable.unwrap_or(ObservableKind::Mx),
            _ => ObservableKind::Mx,
        }
    }

    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        TimeGrid::new(self.sampling.duration, self.sampling.samples)
            .map_err(|e| bad("sampling", e))
    }

    /// Protocol in the dimensionless amplitude the response modules expect.
    pub fn protocol(&self) -> QuenchProtocol {
        let p = &self.protocol;
        let amplitude = if self.model.kind == ModelKind::Lrk { p.amplitude / self.model.j } else { p.amplitude };
        QuenchProtocol { kind: p.kind, amplitude, drive_frequency: p.drive_frequency }
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        SpectrumOptions { window: self.spectrum.window, zero_pad: self.spectrum.zero_pad }
    }

    pub fn noise_floor(&self) -> NoiseFloor {
        match self.spectrum.floor_kind {
            FloorKind::Relative => NoiseFloor::Relative(self.spectrum.noise_floor),
            FloorKind::Absolute => NoiseFloor::Absolute(self.spectrum.noise_floor),
        }
    }

    /// Output directory after the environment override.
    pub fn output_dir(&self) -> PathBuf {
        resolve_output(&self.output.directory)
    }

    /// Checks every key against the preconditions of the modules it feeds.
    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.model;
        if !(m.j.is_finite() && m.j != 0.0) {
            return Err(bad("model.j", format!("must be finite and non-zero, got {}", m.j)));
        }
        match m.kind {
            ModelKind::Tfim => {
                if !(m.j > 0.0) {
                    return Err(bad("model.j", "must be positive for tfim"));
                }
                if require("model.g", m.g)? < 0.0 {
                    return Err(bad("model.g", "must be non-negative"));
                }
                for (k, v) in [("model.h", m.h), ("model.mu", m.mu), ("model.alpha", m.alpha), ("model.beta", m.beta), ("model.r", m.r)] {
                    forbid(k, v, m.kind)?;
                }
                if m.observable == Some(ObservableKind::Nf) {
                    return Err(bad("model.observable", "nf is only defined for lrk"));
                }
            }
            ModelKind::Lrk => {
                if !(m.j > 0.0) {
                    return Err(bad("model.j", "must be positive for lrk"));
                }
                require("model.mu", m.mu)?;
                for key in ["model.alpha", "model.beta"] {
                    let v = require(key, if key == "model.alpha" { m.alpha } else { m.beta })?;
                    if !(v > 1.0) {
                        return Err(bad(key, format!("must exceed 1, got {v}")));
                    }
                }
                for (k, v) in [("model.g", m.g), ("model.h", m.h), ("model.r", m.r)] {
                    forbid(k, v, m.kind)?;
                }
                if matches!(m.observable, Some(o) if o != ObservableKind::Nf) {
                    return Err(bad("model.observable", "lrk only supports nf"));
                }
            }
            ModelKind::Longitudinal | ModelKind::LongRange => {
                require("model.g", m.g)?;
                if m.kind == ModelKind::Longitudinal {
                    if m.h.is_some() {
                        require("model.h", m.h)?;
                    }
                    forbid("model.r", m.r, m.kind)?;
                } else {
                    if !(require("model.r", m.r)? > 0.0) {
                        return Err(bad("model.r", "must be positive"));
                    }
                    forbid("model.h", m.h, m.kind)?;
                }
                for (k, v) in [("model.mu", m.mu), ("model.alpha", m.alpha), ("model.beta", m.beta)] {
                    forbid(k, v, m.kind)?;
                }
                if matches!(m.observable, Some(o) if o != ObservableKind::Mx) {
                    return Err(bad("model.observable", "exact diagonalization measures mx only"));
                }
            }
        }

        let p = &self.protocol;
        self.protocol().validate().map_err(|e| bad("protocol", e))?;
        if !(p.temperature >= 0.0) || !p.temperature.is_finite() {
            return Err(bad("protocol.temperature", format!("must be finite and >= 0, got {}", p.temperature)));
        }
        if self.is_ed() {
            if p.kind != ProtocolKind::Sudden {
                return Err(bad("protocol.kind", "exact diagonalization runs support sudden quenches only"));
            }
            if p.temperature != 0.0 {
                return Err(bad("protocol.temperature", "exact diagonalization runs start from the ground state"));
            }
            if self.output.with_oracle {
                return Err(bad("output.with_oracle", "exact diagonalization is already exact"));
            }
        }
        if self.observable() == ObservableKind::Mzz && p.temperature != 0.0 {
            return Err(bad("protocol.temperature", "mzz is computed from the ground state only"));
        }

        let s = &self.sampling;
        self.grid()?;
        if s.samples < lrgap::spectral::MIN_SAMPLES {
            return Err(bad(
                "sampling.samples",
                format!("spectra need at least {} samples, got {}", lrgap::spectral::MIN_SAMPLES, s.samples),
            ));
        }
        if s.sizes.is_empty() {
            return Err(bad("sampling.sizes", "at least one system size is required"));
        }
        if s.sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("sampling.sizes", "must be strictly increasing"));
        }
        for &n in &s.sizes {
            if self.is_ed() {
                if !(2..=MAX_SITES).contains(&n) {
                    return Err(bad("sampling.sizes", format!("{n} is outside 2..={MAX_SITES} for exact diagonalization")));
                }
            } else if n < 4 || !n.is_multiple_of(2) {
                return Err(bad("sampling.sizes", format!("{n} must be even and at least 4")));
            }
        }

        let sp = &self.spectrum;
        if !(sp.noise_floor >= 0.0) || !sp.noise_floor.is_finite() {
            return Err(bad("spectrum.noise_floor", format!("must be finite and >= 0, got {}", sp.noise_floor)));
        }
        if sp.floor_kind == FloorKind::Relative && sp.noise_floor >= 1.0 {
            return Err(bad("spectrum.noise_floor", "a relative floor must be below 1"));
        }
        if sp.zero_pad == 0 {
            return Err(bad("spectrum.zero_pad", "must be at least 1"));
        }
        if self.output.directory.as_os_str().is_empty() {
            return Err(bad("output.directory", "must not be empty"));
        }
        Ok(())
    }
}

/// Relative paths are placed under `$LRGAP_OUTPUT_ROOT` when it is set.
pub fn resolve_output(dir: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_VAR) {
        Some(root) if dir.is_relative() && !root.is_empty() => PathBuf::from(root).join(dir),
        _ => dir.to_path_buf(),
    }
}
