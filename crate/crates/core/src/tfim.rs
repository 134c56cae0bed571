//! Transverse-field Ising chain, `H = -J Σ (g σ^x_j + σ^z_j σ^z_{j+1})`, in
//! its free-fermion form: N/2 independent two-level modes on the
//! antiperiodic momentum grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mode::TwoLevelMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    pub j: f64,
    pub g: f64,
    pub n: usize,
    /// Lattice spacing. Only the products `k·b` enter, so energies do not
    /// depend on it.
    #[serde(default = "unit_spacing")]
    pub spacing: f64,
}

fn unit_spacing() -> f64 {
    1.0
}

impl TfimParams {
    pub fn new(j: f64, g: f64, n: usize) -> Result<Self> {
        let p = Self { j, g, n, spacing: 1.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(invalid(format!("n must be even and at least 4, got {}", self.n)));
        }
        if !(self.j > 0.0) || !self.j.is_finite() {
            return Err(invalid(format!("j must be positive, got {}", self.j)));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(invalid(format!("g must be non-negative, got {}", self.g)));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(invalid(format!("spacing must be positive, got {}", self.spacing)));
        }
        Ok(())
    }

    /// Wavenumbers `k_n = (2n-1)π/(N b)`, `n = 1..N/2`.
    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n / 2).map(move |m| (2 * m - 1) as f64 * PI / (self.n as f64 * self.spacing))
    }
}

/// Single-mode energy `2J sqrt(g² + 1 - 2g cos(kb))` for the dimensionless
/// phase `kb`.
pub fn dispersion(j: f64, g: f64, kb: f64) -> f64 {
    let (s, c) = kb.sin_cos();
    // (g - cos)² + sin² avoids the cancellation in g² + 1 - 2g cos near g = 1, k = 0.
    2.0 * j * (g - c).hypot(s)
}

pub fn tfim_modes(p: &TfimParams) -> Result<Vec<TwoLevelMode>> {
    p.validate()?;
    Ok(p.momenta()
        .map(|k| {
            let (s, c) = (k * p.spacing).sin_cos();
            TwoLevelMode::new(k, 2.0 * p.j * (p.g - c), 2.0 * p.j * s)
        })
        .collect())
}

/// Gap between the ground state and the lowest excitation reachable within
/// the ground-state parity sector, `2ε_{k1}`.
pub fn tfim_gap(p: &TfimParams) -> Result<f64> {
    p.validate()?;
    Ok(2.0 * dispersion(p.j, p.g, PI / p.n as f64))
}

/// `E_0 = -Σ_n ε_{k_n}`.
pub fn ground_energy(p: &TfimParams) -> Result<f64> {
    p.validate()?;
    Ok(-p.momenta().map(|k| dispersion(p.j, p.g, k * p.spacing)).sum::<f64>())
}

/// Lowest energy in the opposite parity sector,
/// `E_0^- = -2J (1 + Σ_{n=1}^{N/2-1} sqrt(g² + 1 - 2g cos(2nπ/N)))`.
pub fn odd_sector_ground_energy(p: &TfimParams) -> Result<f64> {
    p.validate()?;
    let n = p.n as f64;
    let sum: f64 = (1..p.n / 2)
        .map(|m| 0.5 * dispersion(1.0, p.g, 2.0 * PI * m as f64 / n))
        .sum();
    Ok(-2.0 * p.j * (1.0 + sum))
}

/// Splitting between the ground states of the two parity sectors.
pub fn tfim_sector_gap(p: &TfimParams) -> Result<f64> {
    Ok(odd_sector_ground_energy(p)? - ground_energy(p)?)
}
