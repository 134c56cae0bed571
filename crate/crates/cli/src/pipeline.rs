//! The three pipeline stages, in memory, plus their on-disk forms.

use std::fs;
use std::path::{Path, PathBuf};

use lrgap::ed::{quench_response, SpinModel};
use lrgap::lrk::{lrk_modes, LrkParams};
use lrgap::oracle::exact_response;
use lrgap::response::{assemble_response, lrk_terms, tfim_terms, ModeTerm, Observable, ThermalWeights};
use lrgap::scaling::{fit_exponent, GapPoint, ScalingFit};
use lrgap::spectral::{compute_spectrum, lowest_peak, NoiseFloor, Spectrum, SpectrumOptions};
use lrgap::tfim::{tfim_modes, TfimParams};
use lrgap::{Error, TimeSeries};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ModelKind, ObservableKind, RunConfig};
use crate::CliError;

/// Column holding the exact-dynamics overlay.
pub const ORACLE_COLUMN: &str = "exact";

#[derive(Debug, Clone)]
pub struct SeriesRecord {
    pub n: usize,
    pub series: TimeSeries,
}

impl SeriesRecord {
    pub fn file_stem(&self) -> String {
        format!("n{:04}", self.n)
    }
}

fn model_terms(cfg: &RunConfig, n: usize) -> lrgap::Result<Vec<ModeTerm>> {
    let m = &cfg.model;
    let t = cfg.protocol.temperature;
    match m.kind {
        ModelKind::Tfim => {
            let p = TfimParams::new(m.j, m.g.unwrap_or_default(), n)?;
            let weights = ThermalWeights::at_temperature(&tfim_modes(&p)?, t)?;
            let obs = match cfg.observable() {
                ObservableKind::Mzz => Observable::NearestNeighborZz,
                _ => Observable::TransverseMagnetization,
            };
            tfim_terms(&p, obs, &weights)
        }
        ModelKind::Lrk => {
            let p = LrkParams::new(m.j, m.mu.unwrap_or_default(), m.alpha.unwrap_or_default(), m.beta.unwrap_or_default(), n)?;
            let weights = ThermalWeights::at_temperature(&lrk_modes(&p)?, t)?;
            lrk_terms(&p, &weights)
        }
        _ => unreachable!("exact diagonalization models have no mode terms"),
    }
}

fn ed_models(cfg: &RunConfig) -> (SpinModel, SpinModel) {
    let m = &cfg.model;
    let a = cfg.protocol.amplitude;
    let g = m.g.unwrap_or_default();
    match m.kind {
        ModelKind::Longitudinal => {
            let h = m.h.unwrap_or_default();
            (
                SpinModel::TfimLongitudinal { g, h, j: m.j },
                SpinModel::TfimLongitudinal { g, h: h + a, j: m.j },
            )
        }
        ModelKind::LongRange => {
            let r = m.r.unwrap_or_default();
            (
                SpinModel::LongRangeIsing { g, r, j: m.j },
                SpinModel::LongRangeIsing { g: g + a, r, j: m.j },
            )
        }
        _ => unreachable!("free-fermion models are not diagonalized"),
    }
}

fn respond_one(cfg: &RunConfig, n: usize) -> lrgap::Result<TimeSeries> {
    let grid = cfg.grid().map_err(|e| Error::InvalidParams(e.to_string()))?;
    let m = &cfg.model;
    let series = if cfg.is_ed() {
        let (before, after) = ed_models(cfg);
        quench_response(&before, &after, n, &grid)?
    } else {
        let protocol = cfg.protocol();
        let terms = model_terms(cfg, n)?;
        let values = assemble_response(&terms, &protocol, &grid, m.j.abs())?;
        let mut s = TimeSeries::on_grid(&grid, values)?;
        if cfg.output.with_oracle {
            s = s.with_column(ORACLE_COLUMN, exact_response(&terms, &protocol, &grid)?)?;
        }
        s
    };
    let mut s = series
        .with_meta("model", format!("{:?}", m.kind).to_lowercase())
        .with_meta("n", n)
        .with_meta("j", m.j)
        .with_meta("observable", format!("{:?}", cfg.observable()).to_lowercase())
        .with_meta("protocol", format!("{:?}", cfg.protocol.kind).to_lowercase())
        .with_meta("amplitude", cfg.protocol.amplitude)
        .with_meta("drive_frequency", cfg.protocol.drive_frequency)
        .with_meta("temperature", cfg.protocol.temperature);
    for (key, v) in [("g", m.g), ("h", m.h), ("mu", m.mu), ("alpha", m.alpha), ("beta", m.beta), ("r", m.r)] {
        if let Some(v) = v {
            s = s.with_meta(key, v);
        }
    }
    Ok(s)
}

/// Response series for every configured system size, in size order.
pub fn respond(cfg: &RunConfig) -> Result<Vec<SeriesRecord>, CliError> {
    cfg.validate()?;
    cfg.sampling
        .sizes
        .par_iter()
        .map(|&n| {
            respond_one(cfg, n)
                .map(|series| SeriesRecord { n, series })
                .map_err(|e| CliError::module(format!("respond, N = {n}"), e))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakEntry {
    pub n: Option<usize>,
    pub source: String,
    pub omega_m: f64,
    pub amplitude: f64,
    pub bin: usize,
    pub uncertainty: f64,
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakFailure {
    pub n: Option<usize>,
    pub source: String,
    pub error: String,
}

/// Lowest peaks by input, in input order; inputs without a peak are listed separately.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakSummary {
    pub peaks: Vec<PeakEntry>,
    pub failures: Vec<PeakFailure>,
}

impl PeakSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("peak summary: {e}")))
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumRecord {
    pub n: Option<usize>,
    pub source: String,
    pub spectrum: Spectrum,
}

/// A series to analyze, labelled by its source and (if known) system size.
pub struct SpectrumInput<'a> {
    pub n: Option<usize>,
    pub source: String,
    pub series: &'a TimeSeries,
}

impl<'a> SpectrumInput<'a> {
    /// Takes `n` from the series metadata when present.
    pub fn new(source: impl Into<String>, series: &'a TimeSeries) -> Self {
        let n = series.meta.get("n").and_then(|v| v.parse().ok());
        Self { n, source: source.into(), series }
    }
}

/// Spectra and lowest peaks. A missing peak is recorded, not fatal.
pub fn analyze(
    inputs: &[SpectrumInput<'_>],
    options: SpectrumOptions,
    floor: NoiseFloor,
) -> Result<(Vec<SpectrumRecord>, PeakSummary), CliError> {
    let spectra: Vec<SpectrumRecord> = inputs
        .par_iter()
        .map(|inp| {
            compute_spectrum(inp.series, options)
                .map(|spectrum| SpectrumRecord { n: inp.n, source: inp.source.clone(), spectrum })
                .map_err(|e| CliError::module(format!("spectrum of {}", inp.source), e))
        })
        .collect::<Result<_, _>>()?;
    let mut summary = PeakSummary::default();
    for rec in &spectra {
        match lowest_peak(&rec.spectrum, floor) {
            Ok(p) => summary.peaks.push(PeakEntry {
                n: rec.n,
                source: rec.source.clone(),
                omega_m: p.omega_m,
                amplitude: p.amplitude,
                bin: p.bin,
                uncertainty: p.uncertainty,
                refined: p.refined,
            }),
            Err(e @ Error::NoPeakFound) => {
                log::warn!("{}: {e}", rec.source);
                summary.failures.push(PeakFailure { n: rec.n, source: rec.source.clone(), error: e.to_string() });
            }
            Err(e) => return Err(CliError::module(format!("peak of {}", rec.source), e)),
        }
    }
    Ok((spectra, summary))
}

/// Power-law fit of the peak positions, one DFT half-bin as the uncertainty.
pub fn fit(summary: &PeakSummary) -> Result<ScalingFit, CliError> {
    let mut points: Vec<GapPoint> = summary
        .peaks
        .iter()
        .filter_map(|p| p.n.map(|n| GapPoint { n, gap: p.omega_m, sigma: p.uncertainty }))
        .collect();
    points.sort_by_key(|p| p.n);
    fit_exponent(&points).map_err(|e| CliError::module("scaling", e))
}

/// Everything a pipeline run produces, before it is written out.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub series: Vec<SeriesRecord>,
    pub spectra: Vec<SpectrumRecord>,
    pub summary: PeakSummary,
    pub fit: Result<ScalingFit, String>,
    pub timings: Vec<(String, f64)>,
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineRun, CliError> {
    let clock = std::time::Instant::now();
    let series = respond(cfg)?;
    let t_respond = clock.elapsed().as_secs_f64();
    let inputs: Vec<SpectrumInput<'_>> = series
        .iter()
        .map(|r| SpectrumInput { n: Some(r.n), source: r.file_stem(), series: &r.series })
        .collect();
    let (spectra, summary) = analyze(&inputs, cfg.spectrum_options(), cfg.noise_floor())?;
    let t_spectrum = clock.elapsed().as_secs_f64() - t_respond;
    let fit = fit(&summary).map_err(|e| e.to_string());
    let t_scaling = clock.elapsed().as_secs_f64() - t_respond - t_spectrum;
    Ok(PipelineRun {
        series,
        spectra,
        summary,
        fit,
        timings: vec![
            ("respond".into(), t_respond),
            ("spectrum".into(), t_spectrum),
            ("scaling".into(), t_scaling),
        ],
    })
}

fn write(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(path.to_path_buf())
}

pub fn write_series(dir: &Path, records: &[SeriesRecord]) -> Result<Vec<PathBuf>, CliError> {
    records
        .iter()
        .map(|r| write(&dir.join("series").join(format!("{}.csv", r.file_stem())), &r.series.to_csv()))
        .collect()
}

pub fn write_spectra(dir: &Path, records: &[SpectrumRecord], summary: &PeakSummary) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::with_capacity(records.len() + 1);
    for r in records {
        out.push(write(&dir.join("spectra").join(format!("{}.csv", r.source)), &r.spectrum.to_csv())?);
    }
    out.push(write(&dir.join("peaks.json"), &summary.to_json())?);
    Ok(out)
}

pub fn write_fit(dir: &Path, fit: &ScalingFit) -> Result<Vec<PathBuf>, CliError> {
    let json = fit.to_json().map_err(|e| CliError::module("scaling", e))?;
    Ok(vec![write(&dir.join("fit.json"), &json)?, write(&dir.join("fit_plot.csv"), &fit.plot_csv())?])
}
