//! Fourier spectra of response traces and the lowest non-zero peak.
//!
//! `S(ω_j) = dt · Σ_i w_i (x_i - x̄) e^{-iω_j t_i}` on `ω_j = 2πj/(n_pad dt)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::TimeSeries;

pub const MIN_SAMPLES: usize = 64;
pub const DEFAULT_NOISE_FLOOR: f64 = 0.05;
/// Peaks below this fraction of the raw signal scale are numerical noise.
const SILENCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    None,
    Hann,
}

impl Window {
    fn weights(&self, n: usize) -> Vec<f64> {
        match self {
            Window::None => vec![1.0; n],
            // Periodic form, whose DFT has exactly three non-zero bins.
            Window::Hann => (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect(),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Window::None),
            "hann" => Ok(Window::Hann),
            other => Err(invalid(format!("unknown window {other:?}; expected none or hann"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub window: Window,
    /// Transform length as a multiple of the series length.
    pub zero_pad: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { window: Window::None, zero_pad: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Spacing of `frequencies`.
    pub bin_width: f64,
    /// Resolution of the unpadded record, `2π/τ`.
    pub resolution: f64,
    pub options: SpectrumOptions,
    /// `dt · Σ|x_i|` of the raw series, the reference for "silent" spectra.
    pub signal_scale: f64,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

pub fn compute_spectrum(series: &TimeSeries, options: SpectrumOptions) -> Result<Spectrum> {
    let n = series.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_SAMPLES, got: n });
    }
    if options.zero_pad == 0 {
        return Err(invalid("zero_pad must be at least 1"));
    }
    let dt = series.spacing()?;
    let mean = series.values.iter().sum::<f64>() / n as f64;
    let w = options.window.weights(n);
    let len = n * options.zero_pad;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for i in 0..n {
        buf[i].re = w[i] * (series.values[i] - mean);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let half = len / 2 + 1;
    // Shift the phase reference to t_0 so coefficients match the series clock.
    let t0 = series.times[0];
    let bin_width = 2.0 * PI / (len as f64 * dt);
    let mut spec = Spectrum {
        frequencies: Vec::with_capacity(half),
        magnitudes: Vec::with_capacity(half),
        re: Vec::with_capacity(half),
        im: Vec::with_capacity(half),
        bin_width,
        resolution: 2.0 * PI / (n as f64 * dt),
        options,
        signal_scale: dt * series.values.iter().map(|v| v.abs()).sum::<f64>(),
        meta: series.meta.clone(),
    };
    for (j, x) in buf.iter().take(half).enumerate() {
        let omega = j as f64 * bin_width;
        let c = x * Complex64::from_polar(dt, -omega * t0);
        spec.frequencies.push(omega);
        spec.magnitudes.push(c.norm());
        spec.re.push(c.re);
        spec.im.push(c.im);
    }
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum NoiseFloor {
    /// Fraction of the largest non-zero-frequency magnitude.
    Relative(f64),
    /// Absolute magnitude.
    Absolute(f64),
}

impl Default for NoiseFloor {
    fn default() -> Self {
        NoiseFloor::Relative(DEFAULT_NOISE_FLOOR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakEstimate {
    pub omega_m: f64,
    /// Magnitude at the peak bin.
    pub amplitude: f64,
    pub bin: usize,
    /// Half a resolution bin, `π/τ`.
    pub uncertainty: f64,
    pub refined: bool,
}

/// Lowest-frequency local maximum above the noise floor, with sub-bin refinement.
pub fn lowest_peak(s: &Spectrum, floor: NoiseFloor) -> Result<PeakEstimate> {
    let m = &s.magnitudes;
    if m.len() < 3 {
        return Err(Error::NoPeakFound);
    }
    let max = m[1..].iter().copied().fold(0.0, f64::max);
    if max <= SILENCE * s.signal_scale {
        return Err(Error::NoPeakFound);
    }
    let threshold = match floor {
        NoiseFloor::Relative(f) => f * max,
        NoiseFloor::Absolute(a) => a,
    };
    // Padded bins at multiples of the pad factor are exactly the unpadded
    // bins. The peak is picked on those, so padding can only refine it.
    let pad = s.options.zero_pad;
    let coarse: Vec<f64> = m.iter().step_by(pad).copied().collect();
    if coarse.len() < 3 {
        return Err(Error::NoPeakFound);
    }
    let j = (1..coarse.len() - 1)
        .find(|&j| coarse[j] > threshold && coarse[j] > coarse[j - 1] && coarse[j] >= coarse[j + 1])
        .ok_or(Error::NoPeakFound)?;
    let (bin, offset) = if pad == 1 {
        (j, refine(s, j))
    } else {
        // Highest padded bin strictly inside the neighbouring coarse bins.
        let lo = (j - 1) * pad + 1;
        let hi = ((j + 1) * pad - 1).min(m.len() - 2);
        let k = (lo..=hi).fold(lo, |best, i| if m[i] > m[best] { i } else { best });
        (k, refine(s, k))
    };
    Ok(PeakEstimate {
        omega_m: (bin as f64 + offset.unwrap_or(0.0)) * s.bin_width,
        amplitude: m[bin],
        bin,
        uncertainty: 0.5 * s.resolution,
        refined: offset.is_some(),
    })
}

/// Fractional bin offset of the true tone from bin `j`.
fn refine(s: &Spectrum, j: usize) -> Option<f64> {
    let c = |i: usize| Complex64::new(s.re[i], s.im[i]);
    let (a, b, d) = (c(j - 1), c(j), c(j + 1));
    let delta = if s.options.zero_pad == 1 {
        // Three-bin complex estimators, exact for a lone complex tone: the bins
        // go as 1/u (rectangular) or 1/(u(u²-1)) (Hann) in the offset u.
        let ratio = ((a - d) / (2.0 * b - a - d)).re;
        match s.options.window {
            Window::None => ratio,
            Window::Hann => 2.0 * ratio,
        }
    } else {
        let (ma, mb, md) = (a.norm(), b.norm(), d.norm());
        0.5 * (ma - md) / (ma - 2.0 * mb + md)
    };
    // A tone midway between two bins can land just past ±0.5 once leakage from
    // its negative-frequency image is included; beyond one bin the estimate is junk.
    (delta.is_finite() && delta.abs() < 1.0).then_some(delta)
}

/// `dt · |Σ w_i (x_i - x̄) e^{-iω t_i}|` at an arbitrary frequency.
pub fn amplitude_at(series: &TimeSeries, omega: f64, window: Window) -> Result<f64> {
    let n = series.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_SAMPLES, got: n });
    }
    let dt = series.spacing()?;
    let mean = series.values.iter().sum::<f64>() / n as f64;
    let w = window.weights(n);
    let mut acc = Complex64::new(0.0, 0.0);
    for ((wi, v), t) in w.iter().zip(&series.values).zip(&series.times) {
        acc += Complex64::from_polar(wi * (v - mean), -omega * t);
    }
    Ok(dt * acc.norm())
}

impl Spectrum {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str("omega,magnitude,re,im\n");
        for i in 0..self.frequencies.len() {
            let _ = writeln!(out, "{},{},{},{}", self.frequencies[i], self.magnitudes[i], self.re[i], self.im[i]);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
