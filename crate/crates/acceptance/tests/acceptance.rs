//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use lrgap::ed::{build_longitudinal, diagonalize, ground_state, sector_eigenvalues, state_at, SpectralEvolution};
use lrgap::lrk::LrkParams;
use lrgap::oracle::{evolve_mode, exact_response};
use lrgap::response::{
    assemble_response, lrk_terms, mx_response_sudden, mx_response_thermal, tfim_coupling_perturbation, tfim_terms,
    ModeTerm, Observable, QuenchProtocol, ThermalWeights,
};
use lrgap::scaling::{fit_exponent, tfim_nu_scan, GapPoint};
use lrgap::spectral::{amplitude_at, compute_spectrum, lowest_peak, NoiseFloor, SpectrumOptions, Window};
use lrgap::tfim::{ground_energy, tfim_gap, tfim_modes, tfim_sector_gap, TfimParams};
use lrgap::{TimeGrid, TimeSeries};
use lrgap_cli::pipeline::{run_pipeline, PipelineRun};
use lrgap_cli::RunConfig;

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} [{id}] {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id.to_string());
        }
    }

    fn error(&mut self, id: &str, what: &str, e: impl std::fmt::Display) {
        self.check(id, false, format!("{what}: error: {e}"));
    }
}

fn config(model: &str, protocol: &str, duration: f64, samples: usize, sizes: &[usize], spectrum: &str) -> RunConfig {
    let text = format!(
        "[model]\n{model}\n[protocol]\n{protocol}\n[sampling]\nduration = {duration:?}\nsamples = {samples}\nsizes = {sizes:?}\n[spectrum]\n{spectrum}\n"
    );
    RunConfig::from_toml(&text).expect("acceptance config is valid")
}

fn tfim_critical(duration: f64, samples: usize) -> RunConfig {
    config("kind = \"tfim\"\ng = 1.0", "amplitude = 0.01", duration, samples, &[8, 12, 16, 20, 28, 40], "")
}

fn in_range(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn exponent(r: &mut Report, id: &str, what: &str, run: &PipelineRun, lo: f64, hi: f64) {
    match &run.fit {
        Ok(fit) => r.check(
            id,
            in_range(fit.z, lo, hi),
            format!("{what}: z = {:.4} ± {:.4}, required [{lo}, {hi}]", fit.z, fit.z_err),
        ),
        Err(e) => r.error(id, what, e),
    }
}

fn criterion_1_2(r: &mut Report) {
    match run_pipeline(&tfim_critical(500.0, 1000)) {
        Ok(run) => {
            exponent(r, "1a", "TFIM exponent, Jτ = 500, n = 1000", &run, 0.94, 1.02);
            let bin = 2.0 * PI / 500.0;
            let mut worst = 0.0f64;
            for p in &run.summary.peaks {
                let n = p.n.unwrap_or(0);
                let exact = 8.0 * (PI / (2.0 * n as f64)).sin();
                worst = worst.max((p.omega_m - exact).abs() / bin);
            }
            let complete = run.summary.failures.is_empty() && run.summary.peaks.len() == 6;
            r.check(
                "2",
                complete && worst <= 1.0,
                format!("TFIM gap exactness: max |ω_m − 8J sin(π/2N)| = {worst:.4} bins over {} sizes, required ≤ 1 bin", run.summary.peaks.len()),
            );
        }
        Err(e) => {
            r.error("1a", "TFIM exponent, Jτ = 500", &e);
            r.error("2", "TFIM gap exactness", &e);
        }
    }
    match run_pipeline(&tfim_critical(100.0, 100)) {
        Ok(run) => exponent(r, "1b", "TFIM exponent, Jτ = 100, n = 100", &run, 0.85, 1.00),
        Err(e) => r.error("1b", "TFIM exponent, Jτ = 100", e),
    }
}

fn criterion_3(r: &mut Report) {
    let cfg = config(
        "kind = \"lrk\"\nmu = 2.0\nalpha = 2.5\nbeta = 1.5",
        "amplitude = 0.01",
        500.0,
        1000,
        &[20, 40, 80, 160],
        "",
    );
    match run_pipeline(&cfg) {
        Ok(run) => exponent(r, "3", "LRK exponent, α = 5/2, β = 3/2, Jτ = 500", &run, 0.47, 0.53),
        Err(e) => r.error("3", "LRK exponent", e),
    }
}

/// One oracle-agreement configuration; `terms` are per unit amplitude.
struct OracleCase {
    id: &'static str,
    label: String,
    terms: Vec<ModeTerm>,
    amplitude: f64,
    drive: Option<f64>,
    window: (f64, f64),
}

impl OracleCase {
    fn max_error(&self, amplitude: f64) -> lrgap::Result<f64> {
        let protocol = match self.drive {
            Some(w) => QuenchProtocol::cosine(amplitude, w),
            None => QuenchProtocol::sudden(amplitude),
        };
        let (t0, t1) = self.window;
        // Ten samples per unit time resolves every mode in these cases.
        let grid = TimeGrid::new(t1, (10.0 * t1).round() as usize + 1)?;
        let lr = assemble_response(&self.terms, &protocol, &grid, 1.0)?;
        let exact = exact_response(&self.terms, &protocol, &grid)?;
        Ok((0..grid.samples)
            .filter(|&i| grid.time(i) >= t0)
            .map(|i| (lr[i] - exact[i]).abs())
            .fold(0.0, f64::max))
    }
}

fn tfim_case(id: &'static str, n: usize, g0: f64, dg: f64, window: (f64, f64), drive: Option<f64>) -> OracleCase {
    let p = TfimParams::new(1.0, g0, n).unwrap();
    let terms = tfim_terms(&p, Observable::TransverseMagnetization, &ThermalWeights::ground(n / 2)).unwrap();
    let drive_label = drive.map_or(String::new(), |w| format!(", cos drive ω_d = {w}"));
    OracleCase {
        id,
        label: format!("TFIM N = {n}, g0 = {g0}, δg = {dg}{drive_label}, t ∈ [{}, {}]", window.0, window.1),
        terms,
        amplitude: dg,
        drive,
        window,
    }
}

fn lrk_case(id: &'static str, beta: f64, dmu: f64) -> OracleCase {
    let p = LrkParams::new(1.0, 2.0, 2.5, beta, 100).unwrap();
    OracleCase {
        id,
        label: format!("LRK N = 100, μ0 = 2J, α = 5/2, β = {beta}, δμ = {dmu}J, t ∈ [0, 100]"),
        terms: lrk_terms(&p, &ThermalWeights::ground(50)).unwrap(),
        amplitude: dmu,
        drive: None,
        window: (0.0, 100.0),
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_4(r: &mut Report) {
    let cases = [
        tfim_case("4a", 20, 0.5, 0.02, (0.0, 10.0), None),
        tfim_case("4b", 1000, 1.01, -0.02, (0.0, 100.0), None),
        tfim_case("4c", 100, 1.0, 0.01, (0.0, 100.0), None),
        tfim_case("4d", 1000, 0.99, 0.02, (0.0, 300.0), None),
        tfim_case("4e", 1000, 0.99, 0.02, (200.0, 300.0), None),
        tfim_case("4f", 500, 0.5, 0.05, (0.0, 100.0), Some(0.28)),
        lrk_case("4g", 1.5, 0.01),
        lrk_case("4h", 1.25, -0.01),
    ];
    let amplitudes = [0.04, 0.02, 0.01, 0.005];
    for case in &cases {
        let tau = case.window.1;
        let bound = 10.0 * case.amplitude.powi(2) * (tau / 100.0).max(1.0);
        match case.max_error(case.amplitude) {
            Ok(err) => r.check(
                case.id,
                err <= bound,
                format!("oracle agreement, {}: max error {err:.3e}, bound {bound:.3e}", case.label),
            ),
            Err(e) => r.error(case.id, "oracle agreement", e),
        }
        let errs: lrgap::Result<Vec<f64>> =
            amplitudes.iter().map(|a| case.max_error(a * case.amplitude.signum())).collect();
        let id = format!("{}-slope", case.id);
        match errs {
            Ok(errs) => {
                let s = slope(&amplitudes, &errs);
                r.check(
                    &id,
                    in_range(s, 1.8, 2.2),
                    format!("error-vs-amplitude slope, {}: {s:.3}, required [1.8, 2.2]", case.label),
                );
            }
            Err(e) => r.error(&id, "error-vs-amplitude slope", e),
        }
    }
}

fn criterion_5(r: &mut Report) {
    let result = (|| -> lrgap::Result<Vec<(f64, f64, f64)>> {
        let p = TfimParams::new(1.0, 1.0, 40)?;
        let grid = TimeGrid::new(500.0, 1000)?;
        let zero = mx_response_sudden(&p, 0.01, &ThermalWeights::ground(20), &grid)?;
        let options = SpectrumOptions { window: Window::Hann, zero_pad: 1 };
        let omega = lowest_peak(&compute_spectrum(&zero, options)?, NoiseFloor::default())?.omega_m;
        let s0 = amplitude_at(&zero, omega, Window::Hann)?;
        let eps1 = tfim_modes(&p)?[0].epsilon;
        [10.0, 1.0, 0.1]
            .iter()
            .map(|&x| {
                let thermal = mx_response_thermal(&p, 0.01, eps1 / x, &grid)?;
                Ok((x, amplitude_at(&thermal, omega, Window::Hann)? / s0, f64::tanh(x)))
            })
            .collect()
    })();
    match result {
        Ok(rows) => {
            for (x, ratio, expect) in rows {
                let rel = (ratio / expect - 1.0).abs();
                r.check(
                    &format!("5 ε/T={x}"),
                    rel <= 1e-4,
                    format!("thermal suppression: S(ω_m;T)/S(ω_m;0) = {ratio:.8}, tanh = {expect:.8}, rel err {rel:.2e}, required ≤ 1e-4"),
                );
            }
        }
        Err(e) => r.error("5", "thermal suppression", e),
    }
}

fn criterion_6(r: &mut Report) {
    let cfg = config("kind = \"longitudinal\"\ng = 1.0", "amplitude = 0.001", 500.0, 1000, &[6, 8, 10, 12], "");
    let run = match run_pipeline(&cfg) {
        Ok(run) => run,
        Err(e) => return r.error("6", "longitudinal ED", e),
    };
    let bin = 2.0 * PI / 500.0;
    let mut worst = 0.0f64;
    for p in &run.summary.peaks {
        let n = p.n.unwrap_or(0);
        let exact = tfim_sector_gap(&TfimParams::new(1.0, 1.0, n).unwrap()).unwrap();
        worst = worst.max((p.omega_m - exact).abs() / bin);
    }
    let complete = run.summary.failures.is_empty() && run.summary.peaks.len() == 4;
    r.check(
        "6-peaks",
        complete && worst <= 1.0,
        format!("longitudinal ED: max |ω_m − Δ_s| = {worst:.4} bins over {} sizes, required ≤ 1 bin", run.summary.peaks.len()),
    );
    exponent(r, "6-z", "longitudinal ED exponent, g0 = 1, δh = 1e-3, Jτ = 500", &run, 0.95, 1.07);
}

fn criterion_7(r: &mut Report) {
    let cfg = config(
        "kind = \"long_range\"\nj = -1.0\ng = 2.52\nr = 2.0",
        "amplitude = 0.01",
        200.0,
        4000,
        &[6, 8, 10, 12],
        "",
    );
    match run_pipeline(&cfg) {
        Ok(run) => exponent(r, "7", "long-range ED exponent, r = 2, J < 0, g0 = 2.52, |J|τ = 200", &run, 0.40, 0.54),
        Err(e) => r.error("7", "long-range ED", e),
    }
}

fn criterion_8(r: &mut Report) {
    // Linearity: the dynamic part scales exactly with the amplitude.
    let p = TfimParams::new(1.0, 1.0, 40).unwrap();
    let grid = TimeGrid::new(500.0, 1000).unwrap();
    let w = ThermalWeights::ground(20);
    let base = mx_response_sudden(&p, 0.0, &w, &grid).unwrap().values;
    let one = mx_response_sudden(&p, 0.01, &w, &grid).unwrap().values;
    let two = mx_response_sudden(&p, 0.02, &w, &grid).unwrap().values;
    let scale = one.iter().zip(&base).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let dev = (0..base.len())
        .map(|i| ((two[i] - base[i]) - 2.0 * (one[i] - base[i])).abs())
        .fold(0.0, f64::max);
    r.check(
        "8a",
        dev <= 1e-12 * scale,
        format!("linearity in amplitude: max |Δ(2δg) − 2Δ(δg)| = {dev:.2e} relative to dynamic scale {scale:.2e}"),
    );

    // Single tone sin²(εt) has its lowest peak at 2ε.
    let tone = TimeSeries::on_grid(&grid, grid.times().iter().map(|t| (0.5 * t).sin().powi(2)).collect()).unwrap();
    let bin = 2.0 * PI / 500.0;
    match compute_spectrum(&tone, SpectrumOptions::default()).and_then(|s| lowest_peak(&s, NoiseFloor::default())) {
        Ok(peak) => {
            let off = (peak.omega_m - 1.0).abs() / bin;
            r.check("8b", peak.refined && off <= 0.1, format!("DFT single-tone recovery: ω_m = {:.6}, offset {off:.2e} bins, required ≤ 0.1", peak.omega_m));
        }
        Err(e) => r.error("8b", "DFT single-tone recovery", e),
    }

    // Exact power law.
    let pts: Vec<GapPoint> = [8, 12, 16, 20, 28, 40].iter().map(|&n| GapPoint { n, gap: 3.0 / n as f64, sigma: bin / 2.0 }).collect();
    match fit_exponent(&pts) {
        Ok(fit) => r.check(
            "8c",
            (fit.z - 1.0).abs() < 1e-12 && fit.residual < 1e-12,
            format!("power-law fit exactness: z − 1 = {:.1e}, residual {:.1e}", fit.z - 1.0, fit.residual),
        ),
        Err(e) => r.error("8c", "power-law fit exactness", e),
    }

    // Norm conservation, free-fermion oracle and ED.
    let modes = tfim_modes(&p).unwrap();
    let long = TimeGrid::new(500.0, 50000).unwrap();
    let mut drift = 0.0f64;
    for m in &modes {
        let states = evolve_mode(m, tfim_coupling_perturbation(1.0), &QuenchProtocol::cosine(0.02, 0.7), -1.0, &long).unwrap();
        drift = states.iter().map(|s| (s.r.norm() - 1.0).abs()).fold(drift, f64::max);
    }
    let ed_norm = (|| -> lrgap::Result<f64> {
        let before = ground_state(&diagonalize(&build_longitudinal(8, 1.0, 0.0, 1.0)?)?);
        let eig = diagonalize(&build_longitudinal(8, 1.0, 0.01, 1.0)?)?;
        let evo = SpectralEvolution::new(&eig, &before.vector)?;
        let mut worst = (evo.weight() - 1.0).abs();
        for t in [1.0, 17.3, 250.0, 500.0] {
            let (re, im) = state_at(&eig, &before.vector, t);
            let norm: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum();
            worst = worst.max((norm - 1.0).abs());
        }
        Ok(worst)
    })();
    match ed_norm {
        Ok(ed) => r.check(
            "8d",
            drift <= 1e-10 && ed <= 1e-12,
            format!("norm conservation over Jτ = 500: Bloch drift {drift:.2e} (≤ 1e-10), ED state {ed:.2e} (≤ 1e-12)"),
        ),
        Err(e) => r.error("8d", "norm conservation", e),
    }

    // ED against free fermions at h = 0.
    let ed_gaps = (|| -> lrgap::Result<f64> {
        let mut worst = 0.0f64;
        for n in [4, 6, 8, 10, 12] {
            let h = build_longitudinal(n, 1.0, 0.0, 1.0)?;
            let even = sector_eigenvalues(&h, true)?;
            let odd = sector_eigenvalues(&h, false)?;
            let tp = TfimParams::new(1.0, 1.0, n)?;
            worst = worst
                .max((even[0] - ground_energy(&tp)?).abs())
                .max((even[1] - even[0] - tfim_gap(&tp)?).abs())
                .max((odd[0] - even[0] - tfim_sector_gap(&tp)?).abs());
        }
        Ok(worst)
    })();
    match ed_gaps {
        Ok(worst) => r.check(
            "8e",
            worst <= 1e-9,
            format!("ED vs free fermions at h = 0, N = 4..12: max deviation {worst:.2e}, required ≤ 1e-9"),
        ),
        Err(e) => r.error("8e", "ED vs free fermions", e),
    }

    match tfim_nu_scan(1.0, 0.5, 1.5, &[20, 40, 60, 80, 100, 140, 200]) {
        Ok(scan) => r.check(
            "8f",
            (scan.g_c - 1.0).abs() <= 0.05 && (scan.nu - 1.0).abs() <= 0.05,
            format!("gap-minimum scan, TFIM N = 20..200: g_c = {:.6}, ν = {:.4}, required both within 5% of 1", scan.g_c, scan.nu),
        ),
        Err(e) => r.error("8f", "gap-minimum scan", e),
    }
}

fn main() {
    let mut report = Report { failed: Vec::new() };
    type Criterion = (&'static str, fn(&mut Report));
    let criteria: [Criterion; 7] = [
        ("1-2", criterion_1_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
    ];
    for (name, f) in criteria {
        let clock = Instant::now();
        f(&mut report);
        println!("     criterion {name} took {:.1} s", clock.elapsed().as_secs_f64());
    }
    if report.failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {}", report.failed.len(), report.failed.join(", "));
        std::process::exit(1);
    }
}
