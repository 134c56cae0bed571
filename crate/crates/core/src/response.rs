//! First-order (Kubo) response of free-fermion chains to a weak quench.
//!
//! Each momentum mode is a two-level system `ε σ̃_z` in its eigenframe,
//! prepared in `ρ = (1 + f_z σ̃_z)/2` and perturbed by `λ(s) c·σ̃`, where
//! `λ(s)` is the protocol profile times its amplitude. To first order in `λ`
//!
//! ```text
//! ⟨B⟩(t) = f_z b_z + 2 f_z [ (b_x c_y - b_y c_x) I_cos(t) + (b_x c_x + b_y c_y) I_sin(t) ]
//! I_sin(t) = ∫_0^t λ(s) sin(2ε(t-s)) ds,   I_cos(t) = ∫_0^t λ(s) cos(2ε(t-s)) ds
//! ```
//!
//! Many-body observables are sums of such terms over modes in ascending `k`.

use std::f64::consts::PI;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lrk::{lrk_modes, LrkParams};
use crate::mode::{Bloch, TwoLevelMode};
use crate::series::{TimeGrid, TimeSeries};
use crate::tfim::{tfim_modes, TfimParams};

/// Drive frequencies closer than this (in units of J) to a mode energy use the
/// resonant closed form.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Detuning (in units of J) below which the non-resonant form is flagged as
/// ill-conditioned.
pub const CONDITIONING_TOL: f64 = 1e-6;
/// Largest accepted quench amplitude.
pub const MAX_AMPLITUDE: f64 = 0.2;
/// Amplitudes above this trigger a warning.
pub const WARN_AMPLITUDE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Step switched on at `t = 0`.
    Sudden,
    /// `λ(t) = amplitude · cos(2 ω_d t)`.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchProtocol {
    pub kind: ProtocolKind,
    pub amplitude: f64,
    #[serde(default)]
    pub drive_frequency: f64,
}

impl QuenchProtocol {
    pub fn sudden(amplitude: f64) -> Self {
        Self { kind: ProtocolKind::Sudden, amplitude, drive_frequency: 0.0 }
    }

    pub fn cosine(amplitude: f64, drive_frequency: f64) -> Self {
        Self { kind: ProtocolKind::Cosine, amplitude, drive_frequency }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() || self.amplitude.abs() > MAX_AMPLITUDE {
            return Err(invalid(format!(
                "amplitude must satisfy |a| <= {MAX_AMPLITUDE}, got {}",
                self.amplitude
            )));
        }
        if !self.drive_frequency.is_finite() || self.drive_frequency < 0.0 {
            return Err(invalid(format!(
                "drive frequency must be non-negative, got {}",
                self.drive_frequency
            )));
        }
        if self.amplitude.abs() > WARN_AMPLITUDE {
            warn!("amplitude {} is large for a linear-response estimate", self.amplitude);
        }
        Ok(())
    }

    /// `λ(t)`, including the amplitude.
    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            ProtocolKind::Sudden => self.amplitude,
            ProtocolKind::Cosine => self.amplitude * (2.0 * self.drive_frequency * t).cos(),
        }
    }
}

/// The two response kernels of a mode, per unit amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelIntegrals {
    pub i_sin: f64,
    pub i_cos: f64,
}

/// Evaluates the kernels for a mode of energy `epsilon` at time `t`.
///
/// `energy_scale` sets the units of the resonance tolerance.
pub fn kernel_integrals(
    epsilon: f64,
    protocol: &QuenchProtocol,
    t: f64,
    energy_scale: f64,
) -> KernelIntegrals {
    let b = 2.0 * epsilon;
    let (sb, cb) = (b * t).sin_cos();
    match protocol.kind {
        ProtocolKind::Sudden => KernelIntegrals { i_sin: (1.0 - cb) / b, i_cos: sb / b },
        ProtocolKind::Cosine => {
            let wd = protocol.drive_frequency;
            if (wd - epsilon).abs() < RESONANCE_TOL * energy_scale {
                KernelIntegrals { i_sin: 0.5 * t * sb, i_cos: 0.5 * (t * cb + sb / b) }
            } else {
                let a = 2.0 * wd;
                let (sa, ca) = (a * t).sin_cos();
                let d = (b - a) * (b + a);
                KernelIntegrals { i_sin: b * (ca - cb) / d, i_cos: (b * sb - a * sa) / d }
            }
        }
    }
}

/// First-order expectation of `B = b·σ̃` for one mode.
///
/// `perturbation` holds the eigenframe coefficients per unit amplitude; the
/// protocol supplies amplitude and time profile.
pub fn single_mode_response(
    mode: &TwoLevelMode,
    perturbation: Bloch,
    observable: Bloch,
    f_z: f64,
    protocol: &QuenchProtocol,
    t: f64,
) -> Result<f64> {
    if !(mode.epsilon > 0.0) {
        return Err(Error::DegenerateMode(mode.epsilon));
    }
    Ok(eigenframe_response(mode.epsilon, perturbation, observable, f_z, protocol, t, 1.0))
}

fn eigenframe_response(
    epsilon: f64,
    c: Bloch,
    b: Bloch,
    f_z: f64,
    protocol: &QuenchProtocol,
    t: f64,
    energy_scale: f64,
) -> f64 {
    let k = kernel_integrals(epsilon, protocol, t, energy_scale);
    let rotating = b.x * c.y - b.y * c.x;
    let in_phase = b.x * c.x + b.y * c.y;
    f_z * b.z + 2.0 * f_z * protocol.amplitude * (rotating * k.i_cos + in_phase * k.i_sin)
}

/// Per-mode thermal occupation parameters `f_z = -tanh(ε/T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalWeights {
    pub f_z: Vec<f64>,
}

impl ThermalWeights {
    pub fn ground(n_modes: usize) -> Self {
        Self { f_z: vec![-1.0; n_modes] }
    }

    pub fn at_temperature(modes: &[TwoLevelMode], temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) || temperature.is_infinite() {
            return Err(invalid(format!("temperature must be finite and >= 0, got {temperature}")));
        }
        if temperature == 0.0 {
            return Ok(Self::ground(modes.len()));
        }
        Ok(Self { f_z: modes.iter().map(|m| -(m.epsilon / temperature).tanh()).collect() })
    }
}

/// Observables with a known momentum-space form, as lab-frame coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `M_x = (1/N) Σ_j σ^x_j`, mode coefficient `-(2/N) σ_z^k`.
    TransverseMagnetization,
    /// `M_zz = (1/N) Σ_j σ^z_j σ^z_{j+1}`, mode coefficient
    /// `(2/N)(cos k σ_z^k - sin k σ_x^k)`.
    NearestNeighborZz,
    /// Fermion number, mode coefficient `σ_z^k`.
    FermionNumber,
}

impl Observable {
    pub fn lab_coefficients(&self, mode: &TwoLevelMode, n: usize) -> Bloch {
        let scale = 2.0 / n as f64;
        match self {
            Observable::TransverseMagnetization => Bloch::along_z(-scale),
            Observable::NearestNeighborZz => {
                let (s, c) = mode.k.sin_cos();
                Bloch::new(-scale * s, 0.0, scale * c)
            }
            Observable::FermionNumber => Bloch::along_z(1.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Observable::TransverseMagnetization => "mx",
            Observable::NearestNeighborZz => "mzz",
            Observable::FermionNumber => "nf",
        }
    }
}

/// Lab-frame perturbation per unit amplitude for a TFIM coupling quench `δg`.
pub fn tfim_coupling_perturbation(j: f64) -> Bloch {
    Bloch::along_z(2.0 * j)
}

/// Lab-frame perturbation per unit amplitude for an LRK chemical-potential
/// quench `δμ`.
pub fn lrk_mu_perturbation() -> Bloch {
    Bloch::along_z(0.5)
}

/// One mode of an assembled response, in lab-frame terms.
#[derive(Debug, Clone, Copy)]
pub struct ModeTerm {
    pub mode: TwoLevelMode,
    pub observable: Bloch,
    pub perturbation: Bloch,
    pub f_z: f64,
}

/// Sums single-mode responses over `terms` on every grid time.
///
/// Terms are added in the order given, so callers fix the summation order.
pub fn assemble_response(
    terms: &[ModeTerm],
    protocol: &QuenchProtocol,
    grid: &TimeGrid,
    energy_scale: f64,
) -> Result<Vec<f64>> {
    protocol.validate()?;
    let mut eigen = Vec::with_capacity(terms.len());
    for term in terms {
        let m = &term.mode;
        if !(m.epsilon > 0.0) {
            return Err(Error::DegenerateMode(m.epsilon));
        }
        if protocol.kind == ProtocolKind::Cosine {
            let detuning = (protocol.drive_frequency - m.epsilon).abs();
            if detuning >= RESONANCE_TOL * energy_scale && detuning < CONDITIONING_TOL * energy_scale {
                warn!(
                    "drive frequency {} is within {detuning:e} of mode energy {}; closed form is ill-conditioned",
                    protocol.drive_frequency, m.epsilon
                );
            }
        }
        eigen.push((m.epsilon, m.to_eigenframe(term.perturbation), m.to_eigenframe(term.observable), term.f_z));
    }
    Ok((0..grid.samples)
        .into_par_iter()
        .map(|i| {
            let t = grid.time(i);
            eigen
                .iter()
                .map(|&(e, c, b, f)| eigenframe_response(e, c, b, f, protocol, t, energy_scale))
                .sum()
        })
        .collect())
}

/// Lab-frame mode terms for a TFIM observable under a coupling change, per unit `δg`.
pub fn tfim_terms(
    p: &TfimParams,
    observable: Observable,
    weights: &ThermalWeights,
) -> Result<Vec<ModeTerm>> {
    let modes = tfim_modes(p)?;
    if weights.f_z.len() != modes.len() {
        return Err(invalid(format!(
            "expected {} thermal weights, got {}",
            modes.len(),
            weights.f_z.len()
        )));
    }
    Ok(modes
        .into_iter()
        .zip(&weights.f_z)
        .map(|(mode, &f_z)| ModeTerm {
            mode,
            observable: observable.lab_coefficients(&mode, p.n),
            perturbation: tfim_coupling_perturbation(p.j),
            f_z,
        })
        .collect())
}

fn tfim_series(
    p: &TfimParams,
    observable: Observable,
    weights: &ThermalWeights,
    protocol: QuenchProtocol,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let terms = tfim_terms(p, observable, weights)?;
    let values = assemble_response(&terms, &protocol, grid, p.j)?;
    Ok(TimeSeries::on_grid(grid, values)?
        .with_meta("model", "tfim")
        .with_meta("observable", observable.name())
        .with_meta("n", p.n)
        .with_meta("j", p.j)
        .with_meta("g0", p.g)
        .with_meta("amplitude", protocol.amplitude)
        .with_meta("protocol", format!("{:?}", protocol.kind).to_lowercase())
        .with_meta("drive_frequency", protocol.drive_frequency))
}

/// Transverse magnetization after a sudden coupling quench `g_0 → g_0 + δg`.
pub fn mx_response_sudden(
    p: &TfimParams,
    dg: f64,
    weights: &ThermalWeights,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    tfim_series(p, Observable::TransverseMagnetization, weights, QuenchProtocol::sudden(dg), grid)
}

/// Transverse magnetization under `δg(t) = δg cos(2 ω_d t)`, from the ground state.
pub fn mx_response_cosine(
    p: &TfimParams,
    dg: f64,
    omega_d: f64,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let weights = ThermalWeights::ground(p.n / 2);
    tfim_series(
        p,
        Observable::TransverseMagnetization,
        &weights,
        QuenchProtocol::cosine(dg, omega_d),
        grid,
    )
}

/// Nearest-neighbour `σ^z σ^z` correlation after a sudden quench, from the ground state.
pub fn mzz_response_sudden(p: &TfimParams, dg: f64, grid: &TimeGrid) -> Result<TimeSeries> {
    let weights = ThermalWeights::ground(p.n / 2);
    tfim_series(p, Observable::NearestNeighborZz, &weights, QuenchProtocol::sudden(dg), grid)
}

/// Transverse magnetization after a sudden quench from a thermal state.
pub fn mx_response_thermal(
    p: &TfimParams,
    dg: f64,
    temperature: f64,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let weights = ThermalWeights::at_temperature(&tfim_modes(p)?, temperature)?;
    Ok(mx_response_sudden(p, dg, &weights, grid)?.with_meta("temperature", temperature))
}

/// Lab-frame mode terms for the fermion number of a long-range Kitaev chain,
/// per unit of the dimensionless amplitude `δμ/J`.
pub fn lrk_terms(p: &LrkParams, weights: &ThermalWeights) -> Result<Vec<ModeTerm>> {
    let modes = lrk_modes(p)?;
    if weights.f_z.len() != modes.len() {
        return Err(invalid("thermal weight count does not match mode count"));
    }
    Ok(modes
        .into_iter()
        .zip(&weights.f_z)
        .map(|(mode, &f_z)| ModeTerm {
            mode,
            observable: Observable::FermionNumber.lab_coefficients(&mode, p.n),
            perturbation: lrk_mu_perturbation() * p.j,
            f_z,
        })
        .collect())
}

/// Fermion number after a sudden chemical-potential quench `μ_0 → μ_0 + δμ`.
pub fn nf_response_sudden(p: &LrkParams, dmu: f64, grid: &TimeGrid) -> Result<TimeSeries> {
    let protocol = QuenchProtocol::sudden(dmu / p.j);
    let terms = lrk_terms(p, &ThermalWeights::ground(p.n / 2))?;
    let values = assemble_response(&terms, &protocol, grid, p.j)?;
    Ok(TimeSeries::on_grid(grid, values)?
        .with_meta("model", "lrk")
        .with_meta("observable", "nf")
        .with_meta("n", p.n)
        .with_meta("j", p.j)
        .with_meta("mu0", p.mu)
        .with_meta("alpha", p.alpha)
        .with_meta("beta", p.beta)
        .with_meta("amplitude", dmu)
        .with_meta("protocol", "sudden"))
}

/// Absolute tolerance of [`mx_thermodynamic_limit`].
pub const CONTINUUM_TOL: f64 = 1e-8;

/// Infinite-chain limit of the sudden-quench `⟨M_x⟩(t)` at `J = 1`:
/// `(1/π) ∫_0^π [h_z/ε + 4δg (h_x/ε)² sin²(εt)/ε] dk`.
pub fn mx_thermodynamic_limit(g0: f64, dg: f64, t: f64) -> Result<f64> {
    if !(g0 > 0.0) || !g0.is_finite() {
        return Err(invalid(format!("g0 must be positive, got {g0}")));
    }
    if !t.is_finite() || !dg.is_finite() {
        return Err(invalid("time and amplitude must be finite"));
    }
    let integrand = |k: f64| {
        let (s, c) = k.sin_cos();
        let hz = 2.0 * (g0 - c);
        let hx = 2.0 * s;
        let e = hz.hypot(hx);
        if e == 0.0 {
            // Integrable endpoint singularity at g0 = 1, k = 0: the static
            // term jumps but stays bounded and the dynamic term vanishes.
            return 0.0;
        }
        let se = (e * t).sin();
        hz / e + 4.0 * dg * (hx / e).powi(2) * se * se / e
    };
    // The highest frequency in k is about 2(1 + g0) t; give every panel a
    // handful of oscillations at most.
    let panels = ((2.0 * (1.0 + g0) * t.abs() / PI).ceil() as usize).clamp(8, 100_000);
    let width = PI / panels as f64;
    let per_panel = CONTINUUM_TOL / (10.0 * panels as f64);
    let (mut total, mut err) = (0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * width;
        let out = quadrature::double_exponential::integrate(integrand, a, a + width, per_panel);
        total += out.integral;
        err += out.error_estimate;
    }
    let err = err / PI;
    if !(err <= CONTINUUM_TOL) {
        return Err(Error::QuadratureFailure { estimate: err, tolerance: CONTINUUM_TOL });
    }
    Ok(total / PI)
}
