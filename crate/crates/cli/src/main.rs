#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lrgap::spectral::{NoiseFloor, SpectrumOptions, Window};
use lrgap::TimeSeries;
use lrgap_cli::config::{resolve_output, FloorKind, RunConfig, OUTPUT_ROOT_VAR};
use lrgap_cli::manifest::RunManifest;
use lrgap_cli::pipeline::{self, PeakSummary, SpectrumInput};
use lrgap_cli::CliError;

#[derive(Parser)]
#[command(name = "lrgap", version, about = "Finite-size gaps from linear-response spectra")]
struct Cli {
    /// Record that the run consults no random number generator (none ever is).
    #[arg(long, global = true)]
    seedless: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one response series per system size.
    Respond(RunArgs),
    /// Transform series files and locate their lowest peaks.
    Spectrum {
        /// Series CSV files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        spectral: SpectralArgs,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Fit Δ_N ∝ N^{-z} to a peak summary.
    Scaling {
        /// `peaks.json` from the spectrum stage.
        summary: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Run respond, spectrum and scaling in sequence.
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        spectral: SpectralArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, short)]
    config: PathBuf,
    /// Add an exact-dynamics column to every series.
    #[arg(long)]
    with_oracle: bool,
    /// Overrides `protocol.temperature`.
    #[arg(long)]
    temperature: Option<f64>,
    /// Overrides `output.directory`.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long, value_parser = parse_window)]
    window: Option<Window>,
    #[arg(long)]
    noise_floor: Option<f64>,
    /// Treat the noise floor as an absolute magnitude.
    #[arg(long)]
    absolute_floor: bool,
    #[arg(long)]
    zero_pad: Option<usize>,
}

fn parse_window(s: &str) -> Result<Window, String> {
    s.parse().map_err(|e: lrgap::Error| e.to_string())
}

fn load_config(args: &RunArgs, spectral: Option<&SpectralArgs>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if args.with_oracle {
        cfg.output.with_oracle = true;
    }
    if let Some(t) = args.temperature {
        cfg.protocol.temperature = t;
    }
    if let Some(dir) = &args.output {
        cfg.output.directory = dir.clone();
    }
    if let Some(s) = spectral {
        if let Some(w) = s.window {
            cfg.spectrum.window = w;
        }
        if let Some(f) = s.noise_floor {
            cfg.spectrum.noise_floor = f;
        }
        if s.absolute_floor {
            cfg.spectrum.floor_kind = FloorKind::Absolute;
        }
        if let Some(z) = s.zero_pad {
            cfg.spectrum.zero_pad = z;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn spectral_settings(s: &SpectralArgs) -> Result<(SpectrumOptions, NoiseFloor), CliError> {
    let f = s.noise_floor.unwrap_or(lrgap::spectral::DEFAULT_NOISE_FLOOR);
    if !(f >= 0.0) || !f.is_finite() || (!s.absolute_floor && f >= 1.0) {
        return Err(CliError::Config(format!("--noise-floor: invalid value {f}")));
    }
    let zero_pad = s.zero_pad.unwrap_or(1);
    if zero_pad == 0 {
        return Err(CliError::Config("--zero-pad: must be at least 1".into()));
    }
    let floor = if s.absolute_floor { NoiseFloor::Absolute(f) } else { NoiseFloor::Relative(f) };
    Ok((SpectrumOptions { window: s.window.unwrap_or_default(), zero_pad }, floor))
}

fn finish(manifest: &RunManifest, dir: &Path) -> Result<(), CliError> {
    let path = manifest.write(dir)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn respond(args: &RunArgs, seedless: bool) -> Result<(), CliError> {
    let cfg = load_config(args, None)?;
    let dir = cfg.output_dir();
    let clock = Instant::now();
    let records = pipeline::respond(&cfg)?;
    let mut manifest = RunManifest::new("respond", seedless);
    manifest.stage("respond", clock.elapsed().as_secs_f64());
    let files = pipeline::write_series(&dir, &records)?;
    manifest.add_files(&dir, &files)?;
    manifest.config = Some(cfg);
    finish(&manifest, &dir)
}

fn spectrum(inputs: &[PathBuf], s: &SpectralArgs, output: &Path, seedless: bool) -> Result<(), CliError> {
    let (options, floor) = spectral_settings(s)?;
    let dir = resolve_output(output);
    let mut series = Vec::with_capacity(inputs.len());
    for p in inputs {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
        let ts = TimeSeries::from_csv(&text).map_err(|e| CliError::module(p.display().to_string(), e))?;
        let stem = p.file_stem().map_or_else(|| "series".into(), |s| s.to_string_lossy().into_owned());
        series.push((stem, ts));
    }
    let mut stems: Vec<&str> = series.iter().map(|(s, _)| s.as_str()).collect();
    stems.sort_unstable();
    if stems.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Config("input files must have distinct names".into()));
    }
    let clock = Instant::now();
    let inputs_ref: Vec<SpectrumInput<'_>> = series.iter().map(|(stem, ts)| SpectrumInput::new(stem.clone(), ts)).collect();
    let (spectra, summary) = pipeline::analyze(&inputs_ref, options, floor)?;
    let mut manifest = RunManifest::new("spectrum", seedless);
    manifest.stage("spectrum", clock.elapsed().as_secs_f64());
    manifest.inputs = inputs.iter().map(|p| p.display().to_string()).collect();
    let files = pipeline::write_spectra(&dir, &spectra, &summary)?;
    manifest.add_files(&dir, &files)?;
    finish(&manifest, &dir)
}

fn scaling(summary: &Path, output: &Path, seedless: bool) -> Result<(), CliError> {
    let text = std::fs::read_to_string(summary).map_err(|e| CliError::Config(format!("{}: {e}", summary.display())))?;
    let peaks = PeakSummary::from_json(&text)?;
    let dir = resolve_output(output);
    let clock = Instant::now();
    let fit = pipeline::fit(&peaks)?;
    let mut manifest = RunManifest::new("scaling", seedless);
    manifest.stage("scaling", clock.elapsed().as_secs_f64());
    manifest.inputs = vec![summary.display().to_string()];
    let files = pipeline::write_fit(&dir, &fit)?;
    manifest.add_files(&dir, &files)?;
    println!("z = {:.4} ± {:.4}", fit.z, fit.z_err);
    finish(&manifest, &dir)
}

fn run_pipeline(args: &RunArgs, s: &SpectralArgs, seedless: bool) -> Result<(), CliError> {
    let cfg = load_config(args, Some(s))?;
    let dir = cfg.output_dir();
    let run = pipeline::run_pipeline(&cfg)?;
    let mut manifest = RunManifest::new("pipeline", seedless);
    for (stage, secs) in &run.timings {
        manifest.stage(stage, *secs);
    }
    let mut files = pipeline::write_series(&dir, &run.series)?;
    files.extend(pipeline::write_spectra(&dir, &run.spectra, &run.summary)?);
    for f in &run.summary.failures {
        manifest.errors.push(format!("{}: {}", f.source, f.error));
    }
    match &run.fit {
        Ok(fit) => {
            files.extend(pipeline::write_fit(&dir, fit)?);
            println!("z = {:.4} ± {:.4}", fit.z, fit.z_err);
        }
        Err(e) => manifest.errors.push(e.clone()),
    }
    manifest.add_files(&dir, &files)?;
    manifest.config = Some(cfg);
    finish(&manifest, &dir)?;
    match run.fit {
        Ok(_) => Ok(()),
        Err(e) => Err(CliError::Failed(e)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors are configuration errors, so they exit with 1 rather than clap's 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    log::debug!("output root override: {:?}", std::env::var_os(OUTPUT_ROOT_VAR));
    let result = match &cli.command {
        Command::Respond(args) => respond(args, cli.seedless),
        Command::Spectrum { inputs, spectral, output } => spectrum(inputs, spectral, output, cli.seedless),
        Command::Scaling { summary, output } => scaling(summary, output, cli.seedless),
        Command::Pipeline { run, spectral } => run_pipeline(run, spectral, cli.seedless),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
