//! Evenly sampled time series and their CSV form.
//!
//! The CSV layout is a block of `# key = value` metadata lines, a header row
//! starting with `t,value`, then one row per sample. Extra columns are
//! preserved by name.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative tolerance on sample spacing used to decide that a grid is even.
const SPACING_TOL: f64 = 1e-9;

/// Sampling of `[0, τ)` at `t_i = i τ / n`, `i = 0..n`.
///
/// Dropping the endpoint makes the DFT frequencies exactly `2πj/τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub duration: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn new(duration: f64, samples: usize) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(invalid(format!("duration must be positive, got {duration}")));
        }
        if samples < 2 {
            return Err(invalid(format!("need at least 2 samples, got {samples}")));
        }
        Ok(Self { duration, samples })
    }

    pub fn dt(&self) -> f64 {
        self.duration / self.samples as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.duration / self.samples as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.time(i)).collect()
    }

    /// Grid with `factor` times as many samples over the same duration.
    pub fn refined(&self, factor: usize) -> Self {
        Self { duration: self.duration, samples: self.samples * factor.max(1) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Free-form provenance: model, observable, protocol, parameters.
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
    /// Additional named columns sampled on the same grid.
    #[serde(default)]
    pub extra: BTreeMap<String, Vec<f64>>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let s = Self { times, values, meta: BTreeMap::new(), extra: BTreeMap::new() };
        s.validate()?;
        Ok(s)
    }

    pub fn on_grid(grid: &TimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid.times(), values)
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.insert(key.into(), value.to_string());
        self
    }

    pub fn with_column(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::GridMismatch);
        }
        self.extra.insert(name.into(), values);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.values.len() {
            return Err(Error::GridMismatch);
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("times must be strictly increasing"));
        }
        Ok(())
    }

    /// Sample spacing; fails when the grid is uneven.
    pub fn spacing(&self) -> Result<f64> {
        self.validate()?;
        if self.times.len() < 2 {
            return Err(Error::TooFewSamples { min: 2, got: self.times.len() });
        }
        let n = self.times.len() - 1;
        let dt = (self.times[n] - self.times[0]) / n as f64;
        let worst = self
            .times
            .windows(2)
            .map(|w| ((w[1] - w[0]) / dt - 1.0).abs())
            .fold(0.0, f64::max);
        if worst > SPACING_TOL {
            return Err(Error::UnevenGrid(worst));
        }
        Ok(dt)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str("t,value");
        for name in self.extra.keys() {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{},{}", self.times[i], self.values[i]);
            for col in self.extra.values() {
                let _ = write!(out, ",{}", col[i]);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = BTreeMap::new();
        let mut header: Option<Vec<String>> = None;
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            match &header {
                None => {
                    let names: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
                    if names.len() < 2 || names[0] != "t" || names[1] != "value" {
                        return Err(Error::Parse(format!("line {}: expected header t,value", lineno + 1)));
                    }
                    cols = vec![Vec::new(); names.len()];
                    header = Some(names);
                }
                Some(names) => {
                    let fields: Vec<&str> = line.split(',').collect();
                    if fields.len() != names.len() {
                        return Err(Error::Parse(format!(
                            "line {}: expected {} fields, got {}",
                            lineno + 1,
                            names.len(),
                            fields.len()
                        )));
                    }
                    for (col, f) in cols.iter_mut().zip(fields) {
                        let v = f.trim().parse::<f64>().map_err(|e| {
                            Error::Parse(format!("line {}: {e}", lineno + 1))
                        })?;
                        col.push(v);
                    }
                }
            }
        }
        let names = header.ok_or_else(|| Error::Parse("missing header".into()))?;
        let mut cols = cols.into_iter();
        let times = cols.next().unwrap_or_default();
        let values = cols.next().unwrap_or_default();
        let extra = names[2..].iter().cloned().zip(cols).collect();
        let s = Self { times, values, meta, extra };
        s.validate()?;
        Ok(s)
    }
}
