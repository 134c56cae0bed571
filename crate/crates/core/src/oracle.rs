//! Exact (non-perturbative) dynamics of the decoupled two-level modes.
//!
//! Works in the lab frame, independent of the mixing-angle bookkeeping used by
//! the response formulas. A mode with field `h` evolves as `dr/dt = 2 h × r`.
//! Sudden quenches are a single exact rotation; cosine drives use a
//! fourth-order commutator-free Magnus scheme built from exact rotations, with
//! step doubling until successive refinements agree.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode::{Bloch, TwoLevelMode};
use crate::response::{ModeTerm, ProtocolKind, QuenchProtocol};
use crate::series::TimeGrid;

/// Largest admissible `dt · ε_max`.
pub const MAX_PHASE_STEP: f64 = 0.05;
/// Agreement required between successive step refinements.
pub const REFINEMENT_TOL: f64 = 1e-9;
const MAX_SUBSTEPS: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub r: Bloch,
}

/// Lab-frame Bloch vector of `(1 + f_z σ̃_z)/2`.
pub fn initial_bloch(mode: &TwoLevelMode, f_z: f64) -> Bloch {
    mode.field() * (f_z / mode.epsilon)
}

fn rotate_in_field(r: Bloch, h: Bloch, dt: f64) -> Bloch {
    let norm = h.norm();
    if norm == 0.0 {
        return r;
    }
    r.rotate(h * (1.0 / norm), 2.0 * norm * dt)
}

/// Largest field magnitude the mode sees during the protocol.
fn peak_field(mode: &TwoLevelMode, perturbation: Bloch, protocol: &QuenchProtocol) -> f64 {
    let a = protocol.amplitude.abs();
    (mode.field() + perturbation * a).norm().max((mode.field() - perturbation * a).norm())
}

/// Evolves one mode from its (thermal) eigenstate under `h + λ(t) perturbation`.
///
/// `perturbation` is the lab-frame field change per unit amplitude.
pub fn evolve_mode(
    mode: &TwoLevelMode,
    perturbation: Bloch,
    protocol: &QuenchProtocol,
    f_z: f64,
    grid: &TimeGrid,
) -> Result<Vec<ModeState>> {
    if !(mode.epsilon > 0.0) {
        return Err(Error::DegenerateMode(mode.epsilon));
    }
    let limit = MAX_PHASE_STEP / peak_field(mode, perturbation, protocol);
    if grid.dt() > limit * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt: grid.dt(), limit });
    }
    let r0 = initial_bloch(mode, f_z);
    match protocol.kind {
        ProtocolKind::Sudden => {
            let h = mode.field() + perturbation * protocol.amplitude;
            Ok((0..grid.samples).map(|i| ModeState { r: rotate_in_field(r0, h, grid.time(i)) }).collect())
        }
        ProtocolKind::Cosine => {
            let field = |t: f64| mode.field() + perturbation * protocol.value(t);
            let mut substeps = 1;
            let mut coarse = magnus_trajectory(r0, &field, grid, substeps);
            loop {
                let fine = magnus_trajectory(r0, &field, grid, 2 * substeps);
                let diff = coarse
                    .iter()
                    .zip(&fine)
                    .map(|(a, b)| (a.r - b.r).norm())
                    .fold(0.0, f64::max);
                substeps *= 2;
                if diff < REFINEMENT_TOL || substeps >= MAX_SUBSTEPS {
                    if diff >= REFINEMENT_TOL {
                        log::warn!("step refinement stopped at {substeps} substeps, difference {diff:e}");
                    }
                    return Ok(fine);
                }
                coarse = fine;
            }
        }
    }
}

fn magnus_trajectory(
    r0: Bloch,
    field: &impl Fn(f64) -> Bloch,
    grid: &TimeGrid,
    substeps: usize,
) -> Vec<ModeState> {
    let sqrt3 = 3f64.sqrt();
    let (w_early, w_late) = ((3.0 + 2.0 * sqrt3) / 12.0, (3.0 - 2.0 * sqrt3) / 12.0);
    let (c1, c2) = (0.5 - sqrt3 / 6.0, 0.5 + sqrt3 / 6.0);
    let h = grid.dt() / substeps as f64;
    let mut out = Vec::with_capacity(grid.samples);
    let mut r = r0;
    out.push(ModeState { r });
    for i in 1..grid.samples {
        let t_start = grid.time(i - 1);
        for s in 0..substeps {
            let t = t_start + s as f64 * h;
            let (f1, f2) = (field(t + c1 * h), field(t + c2 * h));
            r = rotate_in_field(r, f1 * w_early + f2 * w_late, h);
            r = rotate_in_field(r, f1 * w_late + f2 * w_early, h);
        }
        out.push(ModeState { r });
    }
    out
}

/// `Σ_k b_k · r_k(t)` with modes summed in the order given.
pub fn assemble_observable(states: &[Vec<ModeState>], coefficients: &[Bloch]) -> Result<Vec<f64>> {
    if states.len() != coefficients.len() {
        return Err(Error::GridMismatch);
    }
    let len = states.first().map_or(0, Vec::len);
    if states.iter().any(|s| s.len() != len) {
        return Err(Error::GridMismatch);
    }
    Ok((0..len)
        .map(|i| states.iter().zip(coefficients).map(|(s, b)| b.dot(s[i].r)).sum())
        .collect())
}

/// Exact observable on `grid` for a set of mode terms.
///
/// Integrates on a grid refined enough for [`evolve_mode`] and decimates back.
pub fn exact_response(terms: &[ModeTerm], protocol: &QuenchProtocol, grid: &TimeGrid) -> Result<Vec<f64>> {
    let peak = terms
        .iter()
        .map(|t| peak_field(&t.mode, t.perturbation, protocol))
        .fold(0.0, f64::max);
    let factor = if peak > 0.0 { (grid.dt() * peak / MAX_PHASE_STEP).ceil().max(1.0) as usize } else { 1 };
    let fine = grid.refined(factor);
    let states: Vec<Vec<ModeState>> = terms
        .par_iter()
        .map(|t| {
            evolve_mode(&t.mode, t.perturbation, protocol, t.f_z, &fine)
                .map(|s| s.into_iter().step_by(factor).collect())
        })
        .collect::<Result<_>>()?;
    let coeffs: Vec<Bloch> = terms.iter().map(|t| t.observable).collect();
    assemble_observable(&states, &coeffs)
}
