//! Finite-size scaling fits.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lrk::{lrk_gap, LrkParams};
use crate::tfim::{tfim_gap, TfimParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub n: usize,
    pub gap: f64,
    /// Standard deviation of `gap`.
    pub sigma: f64,
}

/// Weighted least-squares fit of `ln Δ = ln A - z ln N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<GapPoint>,
    pub z: f64,
    pub z_err: f64,
    pub prefactor: f64,
    /// Unweighted RMS residual in `ln Δ`.
    pub residual: f64,
}

pub fn fit_exponent(points: &[GapPoint]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints { min: 3, got: points.len() });
    }
    if let Some(p) = points.iter().find(|p| !(p.gap > 0.0) || !p.gap.is_finite()) {
        return Err(Error::NonPositiveGap(p.gap));
    }
    if points.windows(2).any(|w| w[1].n <= w[0].n) {
        return Err(invalid("system sizes must be strictly increasing"));
    }
    if points.iter().any(|p| !(p.sigma > 0.0) || !p.sigma.is_finite()) {
        return Err(invalid("gap uncertainties must be positive"));
    }
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let x = (p.n as f64).ln();
        let y = p.gap.ln();
        // σ_ln Δ = σ_Δ / Δ.
        let w = (p.gap / p.sigma).powi(2);
        s += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let residual = (points
        .iter()
        .map(|p| (p.gap.ln() - intercept - slope * (p.n as f64).ln()).powi(2))
        .sum::<f64>()
        / points.len() as f64)
        .sqrt();
    Ok(ScalingFit {
        points: points.to_vec(),
        z: -slope,
        z_err: (s / det).sqrt(),
        prefactor: intercept.exp(),
        residual,
    })
}

impl ScalingFit {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Plot data `ln N, ln Δ, fitted ln Δ`.
    pub fn plot_csv(&self) -> String {
        let mut out = String::from("log_n,log_gap,log_fit\n");
        for p in &self.points {
            let x = (p.n as f64).ln();
            out.push_str(&format!("{},{},{}\n", x, p.gap.ln(), self.prefactor.ln() - self.z * x));
        }
        out
    }
}

/// Convergence tolerance of the per-size minimization, in the coupling.
pub const SCAN_TOL: f64 = 1e-6;
const COARSE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapMinimum {
    pub n: usize,
    pub g_star: f64,
    pub gap: f64,
}

/// Pseudo-critical couplings and the fit `g*(N) = g_c + a N^{-1/ν}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuScan {
    pub minima: Vec<GapMinimum>,
    pub nu: f64,
    pub g_c: f64,
    pub amplitude: f64,
    pub residual: f64,
}

/// Minimizes `gap(n, g)` over `g ∈ [lo, hi]` for each `n`, then fits the drift.
pub fn scan_gap_minimum(
    gap: impl Fn(usize, f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    ns: &[usize],
) -> Result<NuScan> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("empty coupling range [{lo}, {hi}]")));
    }
    let mut minima = Vec::with_capacity(ns.len());
    for &n in ns {
        let (g_star, value) = minimize(|g| gap(n, g), lo, hi).map_err(|e| match e {
            Error::NoBracket { .. } => Error::NoBracket { n, lo, hi },
            other => other,
        })?;
        minima.push(GapMinimum { n, g_star, gap: value });
    }
    let pts: Vec<(f64, f64)> = minima.iter().map(|m| (m.n as f64, m.g_star)).collect();
    let fit = fit_drift(&pts)?;
    Ok(NuScan { minima, nu: 1.0 / fit.power, g_c: fit.offset, amplitude: fit.amplitude, residual: fit.residual })
}

/// Coarse scan to bracket the global minimum, then golden-section search.
fn minimize(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let step = (hi - lo) / COARSE_SAMPLES as f64;
    let mut values = Vec::with_capacity(COARSE_SAMPLES + 1);
    for i in 0..=COARSE_SAMPLES {
        values.push(f(lo + i as f64 * step)?);
    }
    let best = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    if best == 0 || best == COARSE_SAMPLES {
        return Err(Error::NoBracket { n: 0, lo, hi });
    }
    let (mut a, mut b) = (lo + (best - 1) as f64 * step, lo + (best + 1) as f64 * step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > SCAN_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

struct DriftFit {
    offset: f64,
    amplitude: f64,
    power: f64,
    residual: f64,
}

/// Least squares for `y = c + a x^{-p}`: linear in `(c, a)` at fixed `p`, so
/// only `p` is searched.
fn fit_drift(pts: &[(f64, f64)]) -> Result<DriftFit> {
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints { min: 3, got: pts.len() });
    }
    let solve = |p: f64| {
        let n = pts.len() as f64;
        let u: Vec<f64> = pts.iter().map(|&(x, _)| x.powf(-p)).collect();
        let mu = u.iter().sum::<f64>() / n;
        let my = pts.iter().map(|q| q.1).sum::<f64>() / n;
        let suu: f64 = u.iter().map(|v| (v - mu).powi(2)).sum();
        let suy: f64 = u.iter().zip(pts).map(|(v, q)| (v - mu) * (q.1 - my)).sum();
        let a = if suu > 0.0 { suy / suu } else { 0.0 };
        let c = my - a * mu;
        let sse: f64 = u.iter().zip(pts).map(|(v, q)| (q.1 - c - a * v).powi(2)).sum();
        (c, a, sse)
    };
    let sse = |p: f64| Ok(solve(p).2);
    // Search ln p so small and large exponents are sampled evenly.
    let (lp, _) = match minimize(|lp: f64| sse(lp.exp()), (0.05f64).ln(), (20f64).ln()) {
        Ok(v) => v,
        Err(Error::NoBracket { .. }) => {
            return Err(invalid("drift exponent outside [0.05, 20]; cannot fit g*(N)"));
        }
        Err(e) => return Err(e),
    };
    let p = lp.exp();
    let (c, a, s) = solve(p);
    Ok(DriftFit { offset: c, amplitude: a, power: p, residual: (s / pts.len() as f64).sqrt() })
}

/// Gap-minimum scan for the transverse-field Ising chain in `g`.
pub fn tfim_nu_scan(j: f64, lo: f64, hi: f64, ns: &[usize]) -> Result<NuScan> {
    scan_gap_minimum(|n, g| tfim_gap(&TfimParams::new(j, g.max(0.0), n)?), lo, hi, ns)
}

/// Gap-minimum scan for the long-range Kitaev chain in `μ`.
pub fn lrk_nu_scan(base: &LrkParams, lo: f64, hi: f64, ns: &[usize]) -> Result<NuScan> {
    scan_gap_minimum(|n, mu| lrk_gap(&LrkParams { n, mu, ..*base }), lo, hi, ns)
}
