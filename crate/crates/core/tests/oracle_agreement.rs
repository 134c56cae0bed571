//! Closed-form responses against the exact two-level dynamics.

use lrgap::lrk::LrkParams;
use lrgap::oracle::exact_response;
use lrgap::response::{
    assemble_response, lrk_terms, tfim_terms, ModeTerm, Observable, QuenchProtocol, ThermalWeights,
};
use lrgap::tfim::{tfim_modes, TfimParams};
use lrgap::TimeGrid;

fn max_error(terms: &[ModeTerm], protocol: QuenchProtocol, grid: &TimeGrid) -> f64 {
    let lr = assemble_response(terms, &protocol, grid, 1.0).unwrap();
    let exact = exact_response(terms, &protocol, grid).unwrap();
    lr.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Error at `a` and `a/2`; second-order agreement quarters it.
fn halving_ratio(terms: &[ModeTerm], make: impl Fn(f64) -> QuenchProtocol, a: f64, grid: &TimeGrid) -> (f64, f64) {
    let e1 = max_error(terms, make(a), grid);
    let e2 = max_error(terms, make(a / 2.0), grid);
    (e1, e1 / e2)
}

#[test]
fn nearest_neighbour_correlation() {
    let p = TfimParams::new(1.0, 0.5, 20).unwrap();
    let terms = tfim_terms(&p, Observable::NearestNeighborZz, &ThermalWeights::ground(10)).unwrap();
    let grid = TimeGrid::new(20.0, 400).unwrap();
    let (err, ratio) = halving_ratio(&terms, QuenchProtocol::sudden, 0.02, &grid);
    assert!(err < 10.0 * 0.02f64.powi(2), "{err}");
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn thermal_initial_state() {
    let p = TfimParams::new(1.0, 1.3, 16).unwrap();
    let weights = ThermalWeights::at_temperature(&tfim_modes(&p).unwrap(), 0.8).unwrap();
    let terms = tfim_terms(&p, Observable::TransverseMagnetization, &weights).unwrap();
    let grid = TimeGrid::new(30.0, 600).unwrap();
    let (err, ratio) = halving_ratio(&terms, QuenchProtocol::sudden, 0.02, &grid);
    assert!(err < 20.0 * 0.02f64.powi(2), "{err}");
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn driven_chain_off_resonance() {
    let p = TfimParams::new(1.0, 1.5, 24).unwrap();
    let terms = tfim_terms(&p, Observable::TransverseMagnetization, &ThermalWeights::ground(12)).unwrap();
    let grid = TimeGrid::new(30.0, 600).unwrap();
    let (err, ratio) = halving_ratio(&terms, |a| QuenchProtocol::cosine(a, 0.4), 0.02, &grid);
    assert!(err < 10.0 * 0.02f64.powi(2), "{err}");
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn kitaev_chain_away_from_criticality() {
    let p = LrkParams::new(1.0, 3.0, 2.5, 1.5, 40).unwrap();
    let terms = lrk_terms(&p, &ThermalWeights::ground(20)).unwrap();
    let grid = TimeGrid::new(40.0, 800).unwrap();
    let (err, ratio) = halving_ratio(&terms, QuenchProtocol::sudden, 0.02, &grid);
    assert!(err < 10.0 * 0.02f64.powi(2), "{err}");
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn first_order_term_is_captured() {
    // Dropping the linear term must leave an error of order the amplitude itself.
    let p = TfimParams::new(1.0, 0.8, 12).unwrap();
    let terms = tfim_terms(&p, Observable::TransverseMagnetization, &ThermalWeights::ground(6)).unwrap();
    let grid = TimeGrid::new(10.0, 200).unwrap();
    let exact = exact_response(&terms, &QuenchProtocol::sudden(0.01), &grid).unwrap();
    let statics = assemble_response(&terms, &QuenchProtocol::sudden(0.0), &grid, 1.0).unwrap();
    let lr = assemble_response(&terms, &QuenchProtocol::sudden(0.01), &grid, 1.0).unwrap();
    let drop = exact.iter().zip(&statics).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let keep = exact.iter().zip(&lr).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(drop > 1e-3 && keep < drop / 10.0, "{drop} {keep}");
}
